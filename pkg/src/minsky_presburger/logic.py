"""First-order formulas over <0, 1, +, <=, <, => with one unary symbol P (or f).

Terms are linear with natural-number coefficients; ``<=`` and ``<`` are primitive
atoms.  Macros (``chunk(t)``, ``end(t)``, ...) stay as labelled nodes so that
renderings and checker diagnostics read like the schemes they came from; every
traversal that cares about semantics looks through them.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Union


class LogicError(Exception):
    pass


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class LinearTerm:
    """``sum(coeff * var) + constant`` with positive coefficients."""

    coeffs: tuple[tuple[str, int], ...] = ()
    constant: int = 0

    def __post_init__(self):
        names = [v for v, _ in self.coeffs]
        if names != sorted(set(names)):
            raise LogicError(f"coefficients must be keyed by sorted unique names: {names}")
        if any(c <= 0 for _, c in self.coeffs):
            raise LogicError("coefficients must be positive")
        if self.constant < 0:
            raise LogicError("the constant part of a term must be a natural number")

    @classmethod
    def var(cls, name: str) -> "LinearTerm":
        return cls(((name, 1),), 0)

    @classmethod
    def num(cls, k: int) -> "LinearTerm":
        return cls((), k)

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.coeffs)

    @property
    def is_ground(self) -> bool:
        return not self.coeffs

    def coeff(self, name: str) -> int:
        for v, c in self.coeffs:
            if v == name:
                return c
        return 0

    def __add__(self, other: Union["LinearTerm", int]) -> "LinearTerm":
        return normalize_term([self, other])

    __radd__ = __add__

    def __mul__(self, k: int) -> "LinearTerm":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        if k == 0:
            return LinearTerm()
        return LinearTerm(tuple((v, c * k) for v, c in self.coeffs), self.constant * k)

    __rmul__ = __mul__

    def substitute(self, env: Mapping[str, int]) -> "LinearTerm":
        const = self.constant
        rest = []
        for v, c in self.coeffs:
            if v in env:
                const += c * env[v]
            else:
                rest.append((v, c))
        return LinearTerm(tuple(rest), const)

    def __str__(self) -> str:
        parts = [v if c == 1 else f"{c}{v}" for v, c in self.coeffs]
        if self.constant or not parts:
            parts.append(str(self.constant))
        return "+".join(parts)


TermLike = Union[LinearTerm, int, str, tuple]


def normalize_term(parts: Iterable[TermLike]) -> LinearTerm:
    """Merge a raw sum into a canonical ``LinearTerm``.

    Items may be terms, numerals, variable names or ``(coeff, name)`` pairs, so
    ``normalize_term(["x", "x", "x", 1, 1])`` is ``3x+2``.
    """
    acc: Counter[str] = Counter()
    const = 0
    for part in parts:
        if isinstance(part, LinearTerm):
            for v, c in part.coeffs:
                acc[v] += c
            const += part.constant
        elif isinstance(part, bool):
            raise LogicError("booleans are not terms")
        elif isinstance(part, int):
            const += part
        elif isinstance(part, str):
            acc[part] += 1
        elif isinstance(part, tuple) and len(part) == 2:
            k, name = part
            acc[name] += k
        else:
            raise LogicError(f"cannot read {part!r} as a term")
    return LinearTerm(tuple(sorted((v, c) for v, c in acc.items() if c)), const)


def as_term(t: TermLike) -> LinearTerm:
    if isinstance(t, LinearTerm):
        return t
    return normalize_term([t])


def eval_term(t: LinearTerm, env: Mapping[str, int]) -> int:
    total = t.constant
    for v, c in t.coeffs:
        try:
            total += c * env[v]
        except KeyError:
            raise LogicError(f"unbound variable {v!r}") from None
    return total


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class Eq:
    lhs: LinearTerm
    rhs: LinearTerm


@dataclass(frozen=True)
class Le:
    lhs: LinearTerm
    rhs: LinearTerm


@dataclass(frozen=True)
class Lt:
    lhs: LinearTerm
    rhs: LinearTerm


@dataclass(frozen=True)
class Pred:
    """``P(arg)``."""

    arg: LinearTerm


@dataclass(frozen=True)
class FnEq:
    """``f(arg) = value``."""

    arg: LinearTerm
    value: int


@dataclass(frozen=True)
class FnGt0:
    """``f(arg) > 0``."""

    arg: LinearTerm


@dataclass(frozen=True)
class FnLe:
    """``f(arg) <= value``; used by the range axioms."""

    arg: LinearTerm
    value: int


@dataclass(frozen=True)
class FnGe:
    """``f(arg) >= value``; used by the range axioms."""

    arg: LinearTerm
    value: int


@dataclass(frozen=True)
class Bottom:
    pass


Atom = Union[Eq, Le, Lt, Pred, FnEq, FnGt0, FnLe, FnGe, Bottom]
ATOM_TYPES = (Eq, Le, Lt, Pred, FnEq, FnGt0, FnLe, FnGe, Bottom)
ARITH_ATOMS = (Eq, Le, Lt)
SYMBOL_ATOMS = (Pred, FnEq, FnGt0, FnLe, FnGe)

# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    premise: "Formula"
    conclusion: "Formula"


@dataclass(frozen=True)
class Forall:
    vars: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True)
class Macro:
    """A named abbreviation such as ``chunk(4x)``; ``body`` is its meaning."""

    name: str
    arg: LinearTerm
    body: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, Forall, Exists, Macro]
Quantifier = (Forall, Exists)


def conj(*args: Formula) -> Formula:
    flat: list[Formula] = []
    for a in args:
        flat.extend(a.args if isinstance(a, And) else (a,))
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*args: Formula) -> Formula:
    flat: list[Formula] = []
    for a in args:
        flat.extend(a.args if isinstance(a, Or) else (a,))
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def P(t: TermLike) -> Pred:
    return Pred(as_term(t))


def nP(t: TermLike) -> Not:
    return Not(Pred(as_term(t)))


def le(s: TermLike, t: TermLike) -> Le:
    return Le(as_term(s), as_term(t))


def lt(s: TermLike, t: TermLike) -> Lt:
    return Lt(as_term(s), as_term(t))


def eq(s: TermLike, t: TermLike) -> Eq:
    return Eq(as_term(s), as_term(t))


def forall(names: str, body: Formula) -> Forall:
    return Forall(tuple(names.split()), body)


def exists(names: str, body: Formula) -> Exists:
    return Exists(tuple(names.split()), body)


# ---------------------------------------------------------------------------
# traversal


def atom_terms(a: Atom) -> tuple[LinearTerm, ...]:
    if isinstance(a, ARITH_ATOMS):
        return (a.lhs, a.rhs)
    if isinstance(a, Bottom):
        return ()
    return (a.arg,)


def map_atom_terms(a: Atom, fn) -> Atom:
    if isinstance(a, ARITH_ATOMS):
        return type(a)(fn(a.lhs), fn(a.rhs))
    if isinstance(a, Bottom):
        return a
    if isinstance(a, (FnEq, FnLe, FnGe)):
        return type(a)(fn(a.arg), a.value)
    return type(a)(fn(a.arg))


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, ATOM_TYPES):
        out: frozenset[str] = frozenset()
        for t in atom_terms(f):
            out |= t.variables
        return out
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for a in f.args:
            out |= free_vars(a)
        return out
    if isinstance(f, Implies):
        return free_vars(f.premise) | free_vars(f.conclusion)
    if isinstance(f, Quantifier):
        return free_vars(f.body) - frozenset(f.vars)
    if isinstance(f, Macro):
        return free_vars(f.body)
    raise LogicError(f"not a formula: {f!r}")


def has_quantifier(f: Formula, kind=Quantifier) -> bool:
    if isinstance(f, kind):
        return True
    if isinstance(f, ATOM_TYPES):
        return False
    return any(has_quantifier(c, kind) for c in children(f))


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, Implies):
        return (f.premise, f.conclusion)
    if isinstance(f, (Forall, Exists, Macro)):
        return (f.body,)
    return ()


def substitute(f: Formula, env: Mapping[str, int]) -> Formula:
    """Replace free occurrences of the variables in ``env`` by numerals."""
    if not env:
        return f
    if isinstance(f, ATOM_TYPES):
        return map_atom_terms(f, lambda t: t.substitute(env))
    if isinstance(f, Not):
        return Not(substitute(f.arg, env))
    if isinstance(f, And):
        return And(tuple(substitute(a, env) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(substitute(a, env) for a in f.args))
    if isinstance(f, Implies):
        return Implies(substitute(f.premise, env), substitute(f.conclusion, env))
    if isinstance(f, Quantifier):
        inner = {k: v for k, v in env.items() if k not in f.vars}
        return type(f)(f.vars, substitute(f.body, inner))
    if isinstance(f, Macro):
        return Macro(f.name, f.arg.substitute(env), substitute(f.body, env))
    raise LogicError(f"not a formula: {f!r}")


def expand_macros(f: Formula) -> Formula:
    if isinstance(f, Macro):
        return expand_macros(f.body)
    if isinstance(f, ATOM_TYPES):
        return f
    if isinstance(f, Not):
        return Not(expand_macros(f.arg))
    if isinstance(f, And):
        return conj(*(expand_macros(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(expand_macros(a) for a in f.args))
    if isinstance(f, Implies):
        return Implies(expand_macros(f.premise), expand_macros(f.conclusion))
    return type(f)(f.vars, expand_macros(f.body))


def symbols_used(f: Formula) -> set[str]:
    """Which uninterpreted symbols occur: a subset of ``{"P", "f"}``."""
    if isinstance(f, Pred):
        return {"P"}
    if isinstance(f, (FnEq, FnGt0, FnLe, FnGe)):
        return {"f"}
    out: set[str] = set()
    for c in children(f):
        out |= symbols_used(c)
    return out


# ---------------------------------------------------------------------------
# rendering

_PREC = {Forall: 0, Exists: 0, Implies: 1, Or: 2, And: 3, Not: 4}


def render_atom(a: Atom) -> str:
    if isinstance(a, Eq):
        return f"{a.lhs} = {a.rhs}"
    if isinstance(a, Le):
        return f"{a.lhs} <= {a.rhs}"
    if isinstance(a, Lt):
        return f"{a.lhs} < {a.rhs}"
    if isinstance(a, Pred):
        return f"P({a.arg})"
    if isinstance(a, FnEq):
        return f"f({a.arg}) = {a.value}"
    if isinstance(a, FnGt0):
        return f"f({a.arg}) > 0"
    if isinstance(a, FnLe):
        return f"f({a.arg}) <= {a.value}"
    if isinstance(a, FnGe):
        return f"f({a.arg}) >= {a.value}"
    return "false"


def render(f: Formula, macros: bool = True) -> str:
    """Human-readable text; ``macros=False`` shows the expanded literals."""
    if not macros:
        f = expand_macros(f)
    return _render(f, 0)


def _render(f: Formula, outer: int) -> str:
    if isinstance(f, ATOM_TYPES):
        return render_atom(f)
    if isinstance(f, Macro):
        return f"{f.name}({f.arg})"
    prec = _PREC[type(f)]
    if isinstance(f, Not):
        inner = _render(f.arg, prec + 1)
        text = f"~({inner})" if isinstance(f.arg, ARITH_ATOMS) else "~" + inner
    elif isinstance(f, And):
        text = " & ".join(_render(a, prec + 1) for a in f.args)
    elif isinstance(f, Or):
        text = " | ".join(_render(a, prec + 1) for a in f.args)
    elif isinstance(f, Implies):
        text = f"{_render(f.premise, prec + 1)} -> {_render(f.conclusion, prec + 1)}"
    else:
        word = "forall" if isinstance(f, Forall) else "exists"
        text = f"{word} {' '.join(f.vars)}. {_render(f.body, 0)}"
    return f"({text})" if prec < outer else text


# ---------------------------------------------------------------------------
# clauses


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def negate(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def __str__(self) -> str:
        text = render_atom(self.atom)
        return text if self.positive else f"~{text}" if isinstance(self.atom, SYMBOL_ATOMS) else f"~({text})"


Clause = tuple[Literal, ...]


@dataclass(frozen=True)
class ClauseSet:
    """Clauses with implicitly universal free variables.

    ``constants`` names free symbols that are uninterpreted constants rather
    than variables (``d`` and ``e`` of the fixed-width encoding).
    """

    clauses: tuple[Clause, ...]
    constants: frozenset[str] = frozenset()

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __add__(self, other: "ClauseSet") -> "ClauseSet":
        return ClauseSet(self.clauses + other.clauses, self.constants | other.constants)

    def render(self) -> str:
        return "".join(" | ".join(map(str, c)) + "\n" for c in self.clauses)


def clause_vars(c: Clause) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for lit in c:
        for t in atom_terms(lit.atom):
            out |= t.variables
    return out


def _strip_universal(f: Formula) -> Formula:
    while isinstance(f, Forall):
        f = f.body
    if has_quantifier(f):
        raise LogicError("to_cnf needs a universally quantified prenex sentence")
    return f


def _nnf(f: Formula, positive: bool = True) -> Formula:
    if isinstance(f, ATOM_TYPES):
        return f if positive else Not(f)
    if isinstance(f, Macro):
        return _nnf(f.body, positive)
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    if isinstance(f, Implies):
        parts = (_nnf(f.premise, False), _nnf(f.conclusion, True))
        return disj(*parts) if positive else conj(_nnf(f.premise, True), _nnf(f.conclusion, False))
    if isinstance(f, (And, Or)):
        parts = [_nnf(a, positive) for a in f.args]
        return conj(*parts) if isinstance(f, And) == positive else disj(*parts)
    raise LogicError(f"unexpected quantifier inside matrix: {f!r}")


def _distribute(f: Formula) -> list[list[Literal]]:
    if isinstance(f, Not):
        return [[Literal(f.arg, False)]]
    if isinstance(f, ATOM_TYPES):
        return [[Literal(f, True)]]
    if isinstance(f, And):
        out: list[list[Literal]] = []
        for a in f.args:
            out.extend(_distribute(a))
        return out
    # Or: cross product of the operands' clause lists
    out = [[]]
    for a in f.args:
        out = [left + right for left, right in product(out, _distribute(a))]
    return out


def _tidy(clause: list[Literal]) -> Clause | None:
    """Drop duplicates and false literals; ``None`` for a tautology."""
    seen: dict[Literal, None] = {}
    for lit in clause:
        if isinstance(lit.atom, Bottom):
            if lit.positive:
                continue
            return None
        if lit.negate() in seen:
            return None
        seen.setdefault(lit)
    return tuple(seen)


def to_cnf(s: Formula, constants: Iterable[str] = ()) -> ClauseSet:
    """CNF by plain distribution (no fresh symbols), tautologies removed."""
    if has_quantifier(s, Exists):
        raise LogicError("existential quantifier present; to_cnf handles universal sentences only")
    matrix = _strip_universal(s)
    clauses = []
    for raw in _distribute(_nnf(matrix)):
        c = _tidy(raw)
        if c is not None:
            clauses.append(c)
    return ClauseSet(tuple(clauses), frozenset(constants))


def is_horn(cs: ClauseSet) -> bool:
    return all(sum(lit.positive for lit in c) <= 1 for c in cs)


def max_vars_per_clause(cs: ClauseSet) -> int:
    return max((len(clause_vars(c) - cs.constants) for c in cs), default=0)


def clause_formula(c: Clause, constants: Iterable[str] = ()) -> Formula:
    """A clause as a universal sentence ``forall vs. ~(l1 | ... | ln) -> false``.

    Written as an implication with the negated literals as premises so the
    bounded checker can prune on them.  Variables are bound in order of first
    occurrence, which keeps the chunk variable outermost for encoder clauses.
    """
    premise = conj(*(Not(l.atom) if l.positive else l.atom for l in c)) if c else None
    matrix = Implies(premise, Bottom()) if premise is not None else Bottom()
    constants = frozenset(constants)
    names: dict[str, None] = {}
    for lit in c:
        for t in atom_terms(lit.atom):
            names.update(dict.fromkeys(v for v, _ in t.coeffs if v not in constants))
    return Forall(tuple(names), matrix) if names else matrix


# ---------------------------------------------------------------------------
# P -> f


class Flavor(enum.Enum):
    NAT = "nat"
    REAL = "real"


def predicate_to_function(s: Formula, flavor: Flavor = Flavor.NAT) -> tuple[Formula, Formula]:
    """Replace ``P`` by a unary function ``f``; returns the new formula and range axiom.

    Literal occurrences are rewritten where they stand: ``~P(t)`` becomes
    ``f(t) = 0``; ``P(t)`` becomes ``f(t) = 1`` (nat) or ``f(t) > 0`` (real).
    """
    if "f" in symbols_used(s):
        raise LogicError("formula already uses f")
    pos = (lambda t: FnEq(t, 1)) if flavor is Flavor.NAT else FnGt0
    out = _p2f(s, pos)
    if flavor is Flavor.NAT:
        axiom: Formula = Forall(("x",), FnLe(LinearTerm.var("x"), 1))
    else:
        x = LinearTerm.var("x")
        axiom = Forall(("x",), conj(FnGe(x, 0), FnLe(x, 1)))
    return out, axiom


def _p2f(f: Formula, pos) -> Formula:
    if isinstance(f, Not) and isinstance(f.arg, Pred):
        return FnEq(f.arg.arg, 0)
    if isinstance(f, Pred):
        return pos(f.arg)
    if isinstance(f, ATOM_TYPES):
        return f
    if isinstance(f, Not):
        return Not(_p2f(f.arg, pos))
    if isinstance(f, And):
        return And(tuple(_p2f(a, pos) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_p2f(a, pos) for a in f.args))
    if isinstance(f, Implies):
        return Implies(_p2f(f.premise, pos), _p2f(f.conclusion, pos))
    if isinstance(f, Macro):
        return Macro(f.name, f.arg, _p2f(f.body, pos))
    return type(f)(f.vars, _p2f(f.body, pos))


def relativize_nat(f: Formula) -> Formula:
    """Guard every bound variable with ``v >= 0`` (for export over the integers)."""
    if isinstance(f, ATOM_TYPES):
        return f
    if isinstance(f, (Forall, Exists)):
        guard = conj(*(le(0, v) for v in f.vars))
        body = relativize_nat(f.body)
        if isinstance(f, Forall):
            return Forall(f.vars, Implies(guard, body))
        return Exists(f.vars, conj(guard, body))
    if isinstance(f, Not):
        return Not(relativize_nat(f.arg))
    if isinstance(f, And):
        return And(tuple(relativize_nat(a) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(relativize_nat(a) for a in f.args))
    if isinstance(f, Implies):
        return Implies(relativize_nat(f.premise), relativize_nat(f.conclusion))
    return Macro(f.name, f.arg, relativize_nat(f.body))
