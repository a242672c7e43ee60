"""Slow, independent reference implementations used as test oracles.

Nothing here imports the package's model, checker or kernels code: layouts are
assembled as Python strings and sentences are evaluated by scalar recursion over
``itertools.product``.
"""
from __future__ import annotations

from itertools import product

from minsky_presburger.logic import (
    And,
    Bottom,
    Eq,
    FnEq,
    FnGe,
    FnGt0,
    FnLe,
    Forall,
    Implies,
    Le,
    Lt,
    Macro,
    Not,
    Or,
    Pred,
)

# ---------------------------------------------------------------------------
# layouts as strings


def _unary(value: int, width: int) -> str:
    assert value <= width
    return "1" * value + "0" * (width - value)


def growing_string(configs, d: int, trailer: bool = True) -> str:
    out = "0" * d
    s = d
    for line, c1, c2 in configs:
        out += "001011" + _unary(line, s - 6)
        out += "0011" + _unary(c1, s - 4)
        out += "0011" + _unary(c2, s - 4)
        s *= 4
    if configs and trailer:
        out += "001011"
    return out


def fixed_string(configs, d: int) -> str:
    out = ""
    for line, c1, c2 in configs:
        out += "001011" + _unary(line, d - 6) + "0011" + _unary(c1, d - 4) + "0011" + _unary(c2, d - 4)
    return out


# ---------------------------------------------------------------------------
# scalar semantics


class OutOfModel(Exception):
    pass


def term(t, env) -> int:
    return t.constant + sum(c * env[v] for v, c in t.coeffs)


def holds(f, env, bits: str, finite: bool = False) -> bool:
    def bit(t):
        i = term(t, env)
        if i < len(bits):
            return int(bits[i])
        if finite:
            return 0
        raise OutOfModel(i)

    if isinstance(f, Macro):
        return holds(f.body, env, bits, finite)
    if isinstance(f, Eq):
        return term(f.lhs, env) == term(f.rhs, env)
    if isinstance(f, Le):
        return term(f.lhs, env) <= term(f.rhs, env)
    if isinstance(f, Lt):
        return term(f.lhs, env) < term(f.rhs, env)
    if isinstance(f, Pred):
        return bit(f.arg) == 1
    if isinstance(f, FnEq):
        return bit(f.arg) == f.value
    if isinstance(f, FnGt0):
        return bit(f.arg) > 0
    if isinstance(f, FnLe):
        return bit(f.arg) <= f.value
    if isinstance(f, FnGe):
        return bit(f.arg) >= f.value
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Not):
        return not holds(f.arg, env, bits, finite)
    if isinstance(f, And):
        return all(holds(a, env, bits, finite) for a in f.args)
    if isinstance(f, Or):
        return any(holds(a, env, bits, finite) for a in f.args)
    if isinstance(f, Implies):
        return (not holds(f.premise, env, bits, finite)) or holds(f.conclusion, env, bits, finite)
    raise TypeError(f"quantifier inside matrix: {f!r}")


def first_counterexample(s, bits: str, bound: int, finite: bool = False):
    """Lexicographically first assignment in ``[0, bound]`` falsifying a
    universal sentence, or ``None``."""
    names, body = (s.vars, s.body) if isinstance(s, Forall) else ((), s)
    for values in product(range(bound + 1), repeat=len(names)):
        env = dict(zip(names, values))
        if not holds(body, env, bits, finite):
            return env
    return None


# ---------------------------------------------------------------------------
# machine semantics straight from the instruction table


def reference_run(lines, m, n, steps):
    """``lines`` is a list of tuples ('inc', c) / ('tdec', c, target) / ('halt',)."""
    K = len(lines) - 1
    line, c = 0, [m, n]
    out = [(0, m, n)]
    if lines[0][0] == "halt":
        return out, 0
    for s in range(1, steps + 1):
        ins = lines[line]
        if ins[0] == "inc":
            c[ins[1] - 1] += 1
            line += 1
        elif c[ins[1] - 1] == 0:
            line = ins[2]
        else:
            c[ins[1] - 1] -= 1
            line += 1
        out.append((line, c[0], c[1]))
        if lines[line][0] == "halt":
            return out, s
    assert line <= K
    return out, None
