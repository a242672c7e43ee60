"""Bounded quantifier instantiation of sentences against a ``BitModel``.

Universal variables range over ``[0, B]`` and existential ones over ``[0, B_e]``.
Instances are evaluated a whole quantifier level at a time with numpy: the rows
of the current partial assignments are extended by every value of the next
variable and then filtered by the premise conjuncts whose variables are all
bound.  Conjunctions short-circuit row by row, so a bit is only read for rows
where every earlier conjunct holds.

A universal sentence with no counterexample up to the bound is ``Satisfied``;
anything involving an existential is at best ``BoundedSatisfied``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import kernels
from .encoder import EncodingResult
from .logic import (
    And,
    Bottom,
    Eq,
    Exists,
    FnEq,
    FnGe,
    FnGt0,
    FnLe,
    Forall,
    Formula,
    Implies,
    Le,
    LinearTerm,
    LogicError,
    Lt,
    Macro,
    Not,
    Or,
    Pred,
    free_vars,
    has_quantifier,
    render,
    substitute,
    symbols_used,
)
from .model import BitModel, FixedWidth, ModelAccessError

# rows materialised at once when a quantifier level is expanded
ROW_BLOCK = 1 << 21
UNLIMITED = 1 << 62


def required_length(bound: int) -> int:
    return 16 * bound + 8


@dataclass(frozen=True)
class CheckerConfig:
    bound: int
    exists_bound: Optional[int] = None
    access_limit: Optional[int] = None

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("bound must be a natural number")
        if self.exists_bound is None:
            object.__setattr__(self, "exists_bound", self.bound)
        if self.access_limit is not None and self.access_limit < required_length(self.bound):
            raise ValueError(
                f"access limit {self.access_limit} below {required_length(self.bound)} "
                f"required for bound {self.bound}"
            )


@dataclass(frozen=True)
class Satisfied:
    verdict = "satisfied"


@dataclass(frozen=True)
class Violated:
    witness: Mapping[str, int]
    failing_literal: str
    verdict = "violated"


@dataclass(frozen=True)
class BoundedSatisfied:
    """``witnesses`` pairs each instantiated universal assignment with the first
    existential assignment that works for it."""

    witnesses: tuple[tuple[Mapping[str, int], Mapping[str, int]], ...] = ()
    verdict = "bounded-satisfied"


Verdict = Union[Satisfied, Violated, BoundedSatisfied]


# ---------------------------------------------------------------------------
# vectorised evaluation


class _Evaluator:
    def __init__(self, model: BitModel, mode: str, access_limit: Optional[int]):
        if mode not in ("P", "f"):
            raise ValueError("mode is 'P' (predicate) or 'f' (function with f(n) = bit n)")
        self.mode = mode
        self.bits = model.bits
        if model.finite_support:
            self.limit = access_limit if access_limit is not None else UNLIMITED
        else:
            self.limit = model.length if access_limit is None else min(model.length, access_limit)

    def term(self, t: LinearTerm, env: Mapping[str, np.ndarray], n: int) -> np.ndarray:
        out = np.full(n, t.constant, dtype=np.int64)
        for v, c in t.coeffs:
            try:
                out += c * env[v]
            except KeyError:
                raise LogicError(f"unbound variable {v!r}") from None
        return out

    def read(self, t: LinearTerm, env, n: int, want: str) -> np.ndarray:
        pos = self.term(t, env, n)
        values, bad = kernels.gather(self.bits, pos, self.limit)
        if bad >= 0:
            raise ModelAccessError(int(pos[bad]), self.limit)
        if (self.mode == "P") != (want == "P"):
            raise LogicError(f"sentence uses {want} but the checker runs in mode {self.mode}")
        return values

    def eval(self, f: Formula, env: Mapping[str, np.ndarray], n: int) -> np.ndarray:
        if isinstance(f, Macro):
            return self.eval(f.body, env, n)
        if isinstance(f, Eq):
            return self.term(f.lhs, env, n) == self.term(f.rhs, env, n)
        if isinstance(f, Le):
            return self.term(f.lhs, env, n) <= self.term(f.rhs, env, n)
        if isinstance(f, Lt):
            return self.term(f.lhs, env, n) < self.term(f.rhs, env, n)
        if isinstance(f, Pred):
            return self.read(f.arg, env, n, "P") == 1
        if isinstance(f, FnEq):
            return self.read(f.arg, env, n, "f") == f.value
        if isinstance(f, FnGt0):
            return self.read(f.arg, env, n, "f") > 0
        if isinstance(f, FnLe):
            return self.read(f.arg, env, n, "f") <= f.value
        if isinstance(f, FnGe):
            return self.read(f.arg, env, n, "f") >= f.value
        if isinstance(f, Bottom):
            return np.zeros(n, dtype=np.bool_)
        if isinstance(f, Not):
            return ~self.eval(f.arg, env, n)
        if isinstance(f, And):
            return self._chain(f.args, env, n, stop_on=False)
        if isinstance(f, Or):
            return self._chain(f.args, env, n, stop_on=True)
        if isinstance(f, Implies):
            prem = self.eval(f.premise, env, n)
            out = ~prem
            idx = np.flatnonzero(prem)
            if idx.size:
                out[idx] = self.eval(f.conclusion, _take(env, idx), idx.size)
            return out
        raise LogicError("nested quantifiers are evaluated by check_bounded, not inside a matrix")

    def _chain(self, args, env, n: int, stop_on: bool) -> np.ndarray:
        # And keeps evaluating the rows that are still true, Or the rows still false
        out = self.eval(args[0], env, n)
        for a in args[1:]:
            idx = np.flatnonzero(out != stop_on)
            if idx.size == 0:
                break
            if idx.size == n:
                out = self.eval(a, env, n)
            else:
                out[idx] = self.eval(a, _take(env, idx), idx.size)
        return out


def _take(env: Mapping[str, np.ndarray], idx: np.ndarray) -> dict[str, np.ndarray]:
    return {k: a[idx] for k, a in env.items()}


def _conjuncts(f: Formula) -> list[Formula]:
    return list(f.args) if isinstance(f, And) else [f]


# ---------------------------------------------------------------------------
# checking


class _Checker:
    def __init__(self, model: BitModel, cfg: CheckerConfig, mode: str):
        self.cfg = cfg
        self.ev = _Evaluator(model, mode, cfg.access_limit)

    def truth(self, f: Formula) -> bool:
        return bool(self.ev.eval(f, {}, 1)[0])

    def failing(self, f: Formula) -> str:
        """Render the first false conjunct of a false ground formula."""
        while isinstance(f, And):
            f = next(a for a in f.args if not self.truth(a))
        return render(f)

    def check(self, s: Formula) -> Verdict:
        if not has_quantifier(s):
            if free_vars(s):
                raise LogicError(f"free variables {sorted(free_vars(s))} in sentence")
            if self.truth(s):
                return Satisfied()
            return Violated({}, self.failing(s))
        if isinstance(s, Forall):
            if isinstance(s.body, Exists) and not has_quantifier(s.body.body):
                return self.forall_exists(s.vars, s.body.vars, s.body.body)
            if not has_quantifier(s.body):
                return self.forall(s.vars, s.body)
        if isinstance(s, Exists):
            return self.exists(s.vars, s.body)
        raise LogicError("supported shapes: ground, forall*, forall* exists*, exists* over a conjunction")

    # -- universal ---------------------------------------------------------

    def forall(self, names: Sequence[str], body: Formula) -> Verdict:
        if isinstance(body, Implies):
            premise, conclusion = _conjuncts(body.premise), body.conclusion
        else:
            premise, conclusion = [], body
        order = {v: i for i, v in enumerate(names)}
        staged: list[list[Formula]] = [[] for _ in range(len(names) + 1)]
        for c in premise:
            used = free_vars(c)
            unknown = used - order.keys()
            if unknown:
                raise LogicError(f"free variables {sorted(unknown)} in sentence")
            staged[max((order[v] + 1 for v in used), default=0)].append(c)
        if set(free_vars(conclusion)) - order.keys():
            raise LogicError("free variables in conclusion")
        env, n = self._filter(staged[0], {}, 1)
        if n == 0:
            return Satisfied()
        hit = self._search(list(names), staged, conclusion, 0, env, n)
        if hit is None:
            return Satisfied()
        ground = substitute(conclusion, hit)
        return Violated(hit, self.failing(ground))

    def _filter(self, conds, env, n):
        for c in conds:
            keep = np.flatnonzero(self.ev.eval(c, env, n))
            if keep.size != n:
                env = _take(env, keep)
                n = keep.size
            if n == 0:
                break
        return env, n

    def _search(self, names, staged, conclusion, level, env, n) -> Optional[dict[str, int]]:
        if level == len(names):
            ok = self.ev.eval(conclusion, env, n)
            bad = np.flatnonzero(~ok)
            if bad.size == 0:
                return None
            i = int(bad[0])
            return {v: int(env[v][i]) for v in names}
        width = self.cfg.bound + 1
        block = max(1, ROW_BLOCK // width)
        values = np.arange(width, dtype=np.int64)
        for lo in range(0, n, block):
            hi = min(n, lo + block)
            sub = {k: np.repeat(a[lo:hi], width) for k, a in env.items()}
            sub[names[level]] = np.tile(values, hi - lo)
            sub, m = self._filter(staged[level + 1], sub, (hi - lo) * width)
            if m:
                hit = self._search(names, staged, conclusion, level + 1, sub, m)
                if hit is not None:
                    return hit
        return None

    # -- alternation --------------------------------------------------------

    def _grid(self, names: Sequence[str], bound: int) -> tuple[dict[str, np.ndarray], int]:
        width = bound + 1
        k = len(names)
        n = width**k
        if n > ROW_BLOCK * 64:
            raise LogicError(f"{n} assignments for {names} exceed the enumeration budget")
        idx = np.arange(n, dtype=np.int64)
        env = {}
        for pos, v in enumerate(names):
            env[v] = (idx // width ** (k - 1 - pos)) % width
        return env, n

    def forall_exists(self, outer: Sequence[str], inner: Sequence[str], body: Formula) -> Verdict:
        o_env, o_n = self._grid(outer, self.cfg.bound)
        i_env, i_n = self._grid(inner, self.cfg.exists_bound)
        block = max(1, ROW_BLOCK // i_n)
        witnesses = []
        for lo in range(0, o_n, block):
            hi = min(o_n, lo + block)
            m = hi - lo
            env = {k: np.repeat(a[lo:hi], i_n) for k, a in o_env.items()}
            env.update({k: np.tile(a, m) for k, a in i_env.items()})
            ok = self.ev.eval(body, env, m * i_n).reshape(m, i_n)
            found = ok.any(axis=1)
            first = ok.argmax(axis=1)
            for r in range(m):
                outer_w = {v: int(o_env[v][lo + r]) for v in outer}
                if not found[r]:
                    return Violated(outer_w, f"no witness for {' '.join(inner)} in [0, {self.cfg.exists_bound}]")
                witnesses.append((outer_w, {v: int(i_env[v][first[r]]) for v in inner}))
        return BoundedSatisfied(tuple(witnesses))

    def exists(self, names: Sequence[str], body: Formula) -> Verdict:
        bound_names = set(names)
        parts = _conjuncts(body)
        closed = [c for c in parts if not (free_vars(c) & bound_names)]
        open_ = [c for c in parts if free_vars(c) & bound_names]
        # quantifier-free parts first: cheap and they prune the candidates
        closed.sort(key=has_quantifier)
        for c in closed:
            v = self.check(c)
            if isinstance(v, Violated):
                return v
        flat = [c for c in open_ if not has_quantifier(c)]
        deep = [c for c in open_ if has_quantifier(c)]
        env, n = self._grid(names, self.cfg.exists_bound)
        env, n = self._filter(flat, env, n)
        for r in range(n):
            cand = {v: int(env[v][r]) for v in names}
            if all(not isinstance(self.check(substitute(c, cand)), Violated) for c in deep):
                return BoundedSatisfied((({}, cand),))
        return Violated({}, f"no witness for {' '.join(names)} in [0, {self.cfg.exists_bound}]")


def _resolve_mode(mode: Optional[str], s: Formula) -> str:
    if mode is not None:
        return mode
    return "f" if "f" in symbols_used(s) else "P"


def eval_ground(
    s: Formula,
    model: BitModel,
    mode: Optional[str] = None,
    constants: Optional[Mapping[str, int]] = None,
) -> bool:
    """Truth of a quantifier-free sentence; reads past the model raise."""
    if constants:
        s = substitute(s, constants)
    if has_quantifier(s) or free_vars(s):
        raise LogicError("eval_ground needs a ground, quantifier-free formula")
    chk = _Checker(model, CheckerConfig(0), _resolve_mode(mode, s))
    return chk.truth(s)


def check_bounded(
    s: Formula,
    model: BitModel,
    cfg: CheckerConfig,
    constants: Optional[Mapping[str, int]] = None,
    mode: Optional[str] = None,
) -> Verdict:
    if constants:
        s = substitute(s, constants)
    return _Checker(model, cfg, _resolve_mode(mode, s)).check(s)


@dataclass
class Report:
    results: list[tuple[str, Verdict]]
    bound: int
    exists_bound: int
    model_length: int
    constants: dict[str, int] = field(default_factory=dict)

    @property
    def violations(self) -> list[str]:
        return [n for n, v in self.results if isinstance(v, Violated)]

    @property
    def summary(self) -> str:
        bad = self.violations
        if bad:
            return f"violated: {bad[0]}"
        if all(isinstance(v, Satisfied) for _, v in self.results):
            return "all-satisfied"
        return "bounded-satisfied"

    def __getitem__(self, name: str) -> Verdict:
        for n, v in self.results:
            if n == name:
                return v
        raise KeyError(name)


def model_constants(model: BitModel) -> dict[str, int]:
    """Values for ``d`` and ``e`` read off a fixed-width model."""
    layout = model.layout
    if not isinstance(layout, FixedWidth):
        raise LogicError("only fixed-width models determine d and e")
    return {"d": layout.d, "e": layout.e}


def check_report(
    enc: EncodingResult,
    model: BitModel,
    cfg: CheckerConfig,
    constants: Optional[Mapping[str, int]] = None,
    jobs: int = 1,
) -> Report:
    """Check every sentence of an encoding; ``jobs > 1`` checks sentences in parallel
    (the result order and witnesses do not depend on it)."""
    if enc.constants and constants is None:
        constants = model_constants(model)
    constants = dict(constants or {})
    mode = "f" if enc.flavor is not None else "P"

    def one(item):
        name, s = item
        return name, check_bounded(s, model, cfg, constants, mode)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, enc.sentences))
    else:
        results = [one(item) for item in enc.sentences]
    return Report(results, cfg.bound, cfg.exists_bound, model.length, constants)


__all__ = [
    "CheckerConfig",
    "Satisfied",
    "Violated",
    "BoundedSatisfied",
    "Report",
    "required_length",
    "eval_ground",
    "check_bounded",
    "check_report",
    "model_constants",
]
