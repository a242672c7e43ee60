"""SMT-LIB 2.6 export of sentence sets, plus a reader for the emitted subset."""
from __future__ import annotations

import re
from typing import Iterable, Optional, Sequence

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
    normalize_term,
    relativize_nat,
    symbols_used,
)


def term_to_smt(t: LinearTerm, real: bool = False) -> str:
    num = (lambda k: f"{k}.0") if real else str
    parts = [v if c == 1 else f"(* {num(c)} {v})" for v, c in t.coeffs]
    if t.constant or not parts:
        parts.append(num(t.constant))
    return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"


def formula_to_smt(f: Formula, real: bool = False) -> str:
    term = lambda t: term_to_smt(t, real)  # noqa: E731
    num = (lambda k: f"{k}.0") if real else str
    if isinstance(f, Macro):
        return formula_to_smt(f.body, real)
    if isinstance(f, Eq):
        return f"(= {term(f.lhs)} {term(f.rhs)})"
    if isinstance(f, Le):
        return f"(<= {term(f.lhs)} {term(f.rhs)})"
    if isinstance(f, Lt):
        return f"(< {term(f.lhs)} {term(f.rhs)})"
    if isinstance(f, Pred):
        return f"(P {term(f.arg)})"
    if isinstance(f, FnEq):
        return f"(= (f {term(f.arg)}) {num(f.value)})"
    if isinstance(f, FnGt0):
        return f"(> (f {term(f.arg)}) {num(0)})"
    if isinstance(f, FnLe):
        return f"(<= (f {term(f.arg)}) {num(f.value)})"
    if isinstance(f, FnGe):
        return f"(>= (f {term(f.arg)}) {num(f.value)})"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Not):
        return f"(not {formula_to_smt(f.arg, real)})"
    if isinstance(f, And):
        return f"(and {' '.join(formula_to_smt(a, real) for a in f.args)})"
    if isinstance(f, Or):
        return f"(or {' '.join(formula_to_smt(a, real) for a in f.args)})"
    if isinstance(f, Implies):
        return f"(=> {formula_to_smt(f.premise, real)} {formula_to_smt(f.conclusion, real)})"
    sort = "Real" if real else "Int"
    binder = "forall" if isinstance(f, Forall) else "exists"
    decls = " ".join(f"({v} {sort})" for v in f.vars)
    return f"({binder} ({decls}) {formula_to_smt(f.body, real)})"


def to_smtlib(
    sentences: Sequence[tuple[str, Formula]],
    *,
    variant: str,
    machine_hash: str,
    real: bool = False,
    constants: Iterable[str] = (),
    unguarded: Iterable[str] = (),
    extra_comments: Sequence[str] = (),
) -> str:
    """Render a named sentence list as an SMT-LIB script ending in ``(check-sat)``.

    Over the integers every bound variable is guarded with ``v >= 0`` (except in
    sentences listed in ``unguarded``) and ``f`` gets a codomain guard, so the
    script has the same models as the sentences over the naturals.
    """
    used: set[str] = set()
    for _, s in sentences:
        used |= symbols_used(s)
    if used == {"P", "f"}:
        raise LogicError("sentence set mixes P and f")
    sort = "Real" if real else "Int"
    unguarded = set(unguarded)
    out = [f"; variant: {variant}", f"; machine: sha256:{machine_hash}"]
    out += [f"; {c}" for c in extra_comments]
    out.append(f"(set-logic {'UFLRA' if real else 'UFLIA'})")
    if "f" in used:
        out.append(f"(declare-fun f ({sort}) {sort})")
    else:
        out.append(f"(declare-fun P ({sort}) Bool)")
    for c in constants:
        out.append(f"(declare-const {c} {sort})")
    if "f" in used and not real:
        out.append("; codomain of f is the naturals")
        out.append("(assert (forall ((x Int)) (=> (<= 0 x) (<= 0 (f x)))))")
    for name, s in sentences:
        if not real and name not in unguarded:
            s = relativize_nat(s)
        out.append(f"; {name}")
        out.append(f"(assert {formula_to_smt(s, real)})")
    out.append("(check-sat)")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# reading back

_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|([^\s()]+))")


def parse_sexprs(text: str) -> list:
    stack: list[list] = [[]]
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip():
                raise LogicError(f"cannot tokenize at offset {pos}")
            break
        pos = m.end()
        comment, lpar, rpar, atom = m.groups()
        if comment:
            continue
        if lpar:
            stack.append([])
        elif rpar:
            if len(stack) == 1:
                raise LogicError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        elif atom:
            stack[-1].append(atom)
    if len(stack) != 1:
        raise LogicError("unbalanced '('")
    return stack[0]


def _num(tok: str) -> int:
    value = float(tok) if "." in tok else int(tok)
    if value != int(value) or value < 0:
        raise LogicError(f"not a natural numeral: {tok}")
    return int(value)


def term_from_sexpr(e) -> LinearTerm:
    if isinstance(e, str):
        if re.fullmatch(r"\d+(\.0+)?", e):
            return LinearTerm.num(_num(e))
        return LinearTerm.var(e)
    head, *rest = e
    if head == "+":
        return normalize_term([term_from_sexpr(r) for r in rest])
    if head == "*" and len(rest) == 2 and isinstance(rest[0], str):
        return _num(rest[0]) * term_from_sexpr(rest[1])
    raise LogicError(f"unsupported term {e!r}")


def _fn_app(e) -> Optional[LinearTerm]:
    if isinstance(e, list) and len(e) == 2 and e[0] == "f":
        return term_from_sexpr(e[1])
    return None


def formula_from_sexpr(e) -> Formula:
    if e == "false":
        return Bottom()
    head, *rest = e
    if head == "not":
        return Not(formula_from_sexpr(rest[0]))
    if head == "and":
        return And(tuple(formula_from_sexpr(r) for r in rest))
    if head == "or":
        return Or(tuple(formula_from_sexpr(r) for r in rest))
    if head == "=>":
        return Implies(formula_from_sexpr(rest[0]), formula_from_sexpr(rest[1]))
    if head in ("forall", "exists"):
        names = tuple(d[0] for d in rest[0])
        body = formula_from_sexpr(rest[1])
        return Forall(names, body) if head == "forall" else Exists(names, body)
    if head == "P":
        return Pred(term_from_sexpr(rest[0]))
    fn_arg = _fn_app(rest[0]) if rest else None
    if fn_arg is not None:
        value = _num(rest[1])
        if head == "=":
            return FnEq(fn_arg, value)
        if head == ">" and value == 0:
            return FnGt0(fn_arg)
        if head == "<=":
            return FnLe(fn_arg, value)
        if head == ">=":
            return FnGe(fn_arg, value)
    fn_arg = _fn_app(rest[1]) if len(rest) == 2 else None
    if fn_arg is not None and head in ("<=", ">="):
        # numeral on the left, as in the codomain guard (<= 0 (f x))
        value = _num(rest[0])
        return FnGe(fn_arg, value) if head == "<=" else FnLe(fn_arg, value)
    ops = {"=": Eq, "<=": Le, "<": Lt}
    if head in ops:
        return ops[head](term_from_sexpr(rest[0]), term_from_sexpr(rest[1]))
    raise LogicError(f"unsupported formula {e!r}")


def parse_asserts(script: str) -> list[Formula]:
    """The asserted formulas of a script, in order (codomain guards included)."""
    return [formula_from_sexpr(cmd[1]) for cmd in parse_sexprs(script) if cmd and cmd[0] == "assert"]


def canonical(f: Formula) -> Formula:
    """What a reparse of the emitted text yields for ``f``: macros gone, nesting kept."""
    if isinstance(f, Macro):
        return canonical(f.body)
    if isinstance(f, Not):
        return Not(canonical(f.arg))
    if isinstance(f, And):
        return And(tuple(canonical(a) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(canonical(a) for a in f.args))
    if isinstance(f, Implies):
        return Implies(canonical(f.premise), canonical(f.conclusion))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.vars, canonical(f.body))
    return f


__all__ = [
    "to_smtlib",
    "term_to_smt",
    "formula_to_smt",
    "parse_sexprs",
    "parse_asserts",
    "term_from_sexpr",
    "formula_from_sexpr",
    "canonical",
]
