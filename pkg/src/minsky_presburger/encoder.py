"""Compile a two-counter program and its input into named sentence sets.

Seven variants share the delimiter macros below.  Growing-layout variants place
chunk ``i`` at ``d * 4**i``; the fixed-width variant uses stride ``3d`` with
``d`` and ``e`` left as uninterpreted constants.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .logic import (
    Bottom,
    ClauseSet,
    Exists,
    Flavor,
    Formula,
    Implies,
    LinearTerm,
    Macro,
    Not,
    P,
    TermLike,
    as_term,
    conj,
    disj,
    eq,
    exists,
    forall,
    has_quantifier,
    le,
    lt,
    nP,
    normalize_term,
    predicate_to_function,
    render,
    to_cnf,
)
from .machine import Halt, Inc, MachineError, Program, validate_program


class EncodingError(MachineError):
    pass


class Variant(enum.Enum):
    STANDARD = "standard"
    TWO_VAR = "two-var"
    FN_HORN_NAT = "fn-horn-nat"
    FN_HORN_REAL = "fn-horn-real"
    NONDET_RECURRENCE = "nondet-recurrence"
    FINITE_EXISTS = "finite-exists"
    FIXED_WIDTH = "fixed-width"

    @classmethod
    def parse(cls, name: str) -> "Variant":
        try:
            return cls(name.strip().lower().replace("_", "-"))
        except ValueError:
            raise EncodingError(
                f"unknown variant {name!r}; choose from {', '.join(v.value for v in cls)}"
            ) from None


# ---------------------------------------------------------------------------
# macros


def chunk(t: TermLike) -> Macro:
    t = as_term(t)
    return Macro("chunk", t, conj(nP(t), nP(t + 1), P(t + 2), nP(t + 3), P(t + 4), P(t + 5)))


def brk(t: TermLike) -> Macro:
    t = as_term(t)
    return Macro("break", t, conj(nP(t), nP(t + 1), P(t + 2), P(t + 3)))


def start(t: TermLike) -> Macro:
    t = as_term(t)
    return Macro("start", t, conj(nP(t), P(t + 1)))


def end(t: TermLike) -> Macro:
    t = as_term(t)
    return Macro("end", t, conj(P(t), nP(t + 1)))


def chi(j: int, t: TermLike) -> Macro:
    """Line ``j`` is active in the chunk starting at ``t``."""
    t = as_term(t)
    return Macro(f"chi{j}", t, end(t + 5 + j).body)


def compute_d(p: Program, m: int, n: int) -> int:
    return max(p.K + 6, m + 4, n + 4)


# ---------------------------------------------------------------------------
# result


@dataclass(frozen=True)
class EncodingResult:
    variant: Variant
    sentences: tuple[tuple[str, Formula], ...]
    machine_hash: str
    d: Optional[int] = None
    k: Optional[int] = None
    constants: tuple[str, ...] = ()
    flavor: Optional[Flavor] = None
    unguarded: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        names = [n for n, _ in self.sentences]
        if len(set(names)) != len(names):
            raise EncodingError(f"duplicate sentence names in {names}")

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.sentences]

    def __getitem__(self, name: str) -> Formula:
        for n, s in self.sentences:
            if n == name:
                return s
        raise KeyError(name)

    def __iter__(self) -> Iterator[tuple[str, Formula]]:
        return iter(self.sentences)

    def __len__(self) -> int:
        return len(self.sentences)

    def render(self) -> str:
        return "".join(f"{name}: {render(s)}\n" for name, s in self.sentences)


# ---------------------------------------------------------------------------
# growing layout pieces


def phi1(d: int, two_var: bool = False, guard_z: bool = False) -> list[tuple[str, Formula]]:
    """The delimiter axioms.  ``guard_z`` adds ``x < z`` to the third one."""
    pre3 = conj(lt("x", "z"), chunk("x")) if guard_z else chunk("x")
    if two_var:
        s8 = forall(
            "x y",
            Implies(
                conj(chunk("x"), start(as_term("y") + 1), lt(as_term("x") + 5, as_term("y") + 1), lt(as_term("y") + 1, (4, "x"))),
                brk("y"),
            ),
        )
    else:
        s8 = forall(
            "x y u",
            Implies(
                conj(chunk("x"), start("y"), lt(as_term("x") + 5, "y"), lt("y", (4, "x")), eq(as_term("u") + 1, "y")),
                brk("u"),
            ),
        )
    return [
        ("phi1.1", chunk(d)),
        ("phi1.2", forall("x", Implies(lt("x", d), nP("x")))),
        ("phi1.3", forall("x", Implies(pre3, conj(brk((2, "x")), brk((3, "x")), chunk((4, "x")))))),
        ("phi1.4", forall("x y", Implies(conj(chunk("x"), chunk("y"), le("x", "y"), lt("y", (4, "x"))), eq("x", "y")))),
        ("phi1.5", forall("x y", Implies(conj(chunk("x"), brk("y"), le("x", "y")), le((2, "x"), "y")))),
        ("phi1.6", forall("x y", Implies(conj(chunk("x"), brk("y"), lt((2, "x"), "y")), le((3, "x"), "y")))),
        ("phi1.7", forall("x y", Implies(conj(chunk("x"), brk("y"), lt((3, "x"), "y")), le((4, "x"), "y")))),
        ("phi1.8", s8),
    ]


def phi2(d: int, m: int, n: int) -> Formula:
    return conj(chi(0, d), end(2 * d + 3 + m), end(3 * d + 3 + n))


def phi3(K: int) -> Formula:
    x = as_term("x")
    return forall(
        "x y",
        Implies(conj(chunk(x), end("y"), le(x + 5, "y"), le("y", (2, "x"))), le("y", x + 5 + K)),
    )


def phi4(K: int) -> Formula:
    return forall("x", Implies(chunk("x"), Not(chi(K, "x"))))


def _t(*parts) -> LinearTerm:
    return normalize_term(parts)


def _next_line(p: Program, j: int, nondet: bool):
    """The chi-consequent for the fall-through successor of line ``j`` at ``4x``."""
    ins = p[j]
    if nondet and ins.branch is not None:
        a, b = ins.branch
        return disj(chi(a, (4, "x")), chi(b, (4, "x")))
    return chi(j + 1, (4, "x"))


def standard_line(p: Program, j: int, nondet: bool = False) -> list[tuple[str, Formula]]:
    """The three-variable scheme(s) for line ``j``."""
    ins = p[j]
    x4 = (4, "x")
    y_pre = [chunk("x"), le((2, "x"), "y"), le("y", (3, "x")), end("y")]
    z_pre = [le((3, "x"), "z"), le("z", x4), end("z")]
    base = y_pre + z_pre + [chi(j, "x")]
    same_y, same_z = end(_t((6, "x"), "y")), end(_t((9, "x"), "z"))
    name = f"instr.{j}"
    if isinstance(ins, Halt):
        return [(name, forall("x y z", Implies(conj(*base), conj(same_y, same_z, chi(p.K, x4)))))]
    nxt = _next_line(p, j, nondet)
    if isinstance(ins, Inc):
        if ins.counter == 1:
            concl = conj(end(_t((6, "x"), "y", 1)), same_z, nxt)
        else:
            concl = conj(same_y, end(_t((9, "x"), "z", 1)), nxt)
        return [(name, forall("x y z", Implies(conj(*base), concl)))]
    jump = chi(ins.target, x4)
    if ins.counter == 1:
        zero = conj(*base, eq("y", _t((2, "x"), 3)))
        pos = conj(*base, lt(_t((2, "x"), 3), "y"), eq(_t("u", 1), _t((6, "x"), "y")))
        pos_concl = conj(end("u"), same_z, nxt)
    else:
        zero = conj(*base, eq("z", _t((3, "x"), 3)))
        pos = conj(*base, lt(_t((3, "x"), 3), "z"), eq(_t("u", 1), _t((9, "x"), "z")))
        pos_concl = conj(same_y, end("u"), nxt)
    return [
        (f"{name}.zero", forall("x y z", Implies(zero, conj(same_y, same_z, jump)))),
        (f"{name}.pos", forall("x y z u", Implies(pos, pos_concl))),
    ]


def two_var_line(p: Program, j: int) -> list[tuple[str, Formula]]:
    """Line ``j`` split into formulas with at most two variables each."""
    ins = p[j]
    x4 = (4, "x")
    y1 = _t("y", 1)
    z1 = _t("z", 1)
    y_pre = [chunk("x"), le((2, "x"), "y"), le("y", (3, "x")), end("y"), chi(j, "x")]
    z_pre = [chunk("x"), le((3, "x"), "z"), le("z", x4), end("z"), chi(j, "x")]
    same_y, same_z = end(_t((6, "x"), "y")), end(_t((9, "x"), "z"))
    name = f"instr.{j}"

    def split(y_concl, z_concl):
        return [
            (f"{name}.y", forall("x y", Implies(conj(*y_pre), y_concl))),
            (f"{name}.z", forall("x z", Implies(conj(*z_pre), z_concl))),
        ]

    if isinstance(ins, Halt):
        return split(conj(same_y, chi(p.K, x4)), same_z)
    nxt = chi(j + 1, x4)
    if isinstance(ins, Inc):
        if ins.counter == 1:
            return split(conj(end(_t((6, "x"), "y", 1)), nxt), same_z)
        return split(conj(same_y, nxt), end(_t((9, "x"), "z", 1)))
    jump = chi(ins.target, x4)
    if ins.counter == 1:
        c_zero = end(_t((2, "x"), 3))
        zero = forall(
            "x z", Implies(conj(*z_pre, c_zero), conj(end(_t((8, "x"), 3)), same_z, jump))
        )
        pos_y = forall(
            "x y",
            Implies(
                conj(chunk("x"), le((2, "x"), y1), le(y1, (3, "x")), end(y1), chi(j, "x"), lt(_t((2, "x"), 3), y1)),
                conj(same_y, nxt),
            ),
        )
        pos_z = forall("x z", Implies(conj(*z_pre, Not(c_zero)), same_z))
    else:
        c_zero = end(_t((3, "x"), 3))
        zero = forall(
            "x y", Implies(conj(*y_pre, c_zero), conj(same_y, end(_t((12, "x"), 3)), jump))
        )
        pos_y = forall("x y", Implies(conj(*y_pre, Not(c_zero)), conj(same_y, nxt)))
        pos_z = forall(
            "x z",
            Implies(
                conj(chunk("x"), le((3, "x"), z1), le(z1, x4), end(z1), chi(j, "x"), lt(_t((3, "x"), 3), z1)),
                same_z,
            ),
        )
    return [(f"{name}.zero", zero), (f"{name}.pos.y", pos_y), (f"{name}.pos.z", pos_z)]


# ---------------------------------------------------------------------------
# fixed-width pieces


def fixed_width_line(p: Program, j: int) -> list[tuple[str, Formula]]:
    """Stride-``3d`` analogue of the two-variable scheme for line ``j``."""
    ins = p[j]
    d3 = (3, "d")
    xd, x2d, x3d = _t("x", "d"), _t("x", (2, "d")), _t("x", d3)
    y1, z1 = _t("y", 1), _t("z", 1)
    y_pre = [chunk("x"), le(xd, "y"), le("y", x2d), end("y"), chi(j, "x")]
    z_pre = [chunk("x"), le(x2d, "z"), le("z", x3d), end("z"), chi(j, "x")]
    same_y, same_z = end(_t("y", d3)), end(_t("z", d3))
    name = f"instr.{j}"

    def split(y_concl, z_concl):
        return [
            (f"{name}.y", forall("x y", Implies(conj(*y_pre), y_concl))),
            (f"{name}.z", forall("x z", Implies(conj(*z_pre), z_concl))),
        ]

    if isinstance(ins, Halt):
        return split(conj(same_y, chi(p.K, x3d)), same_z)
    nxt = chi(j + 1, x3d)
    if isinstance(ins, Inc):
        if ins.counter == 1:
            return split(conj(end(_t("y", d3, 1)), nxt), same_z)
        return split(conj(same_y, nxt), end(_t("z", d3, 1)))
    jump = chi(ins.target, x3d)
    if ins.counter == 1:
        c_zero = end(_t("x", "d", 3))
        zero = forall(
            "x z", Implies(conj(*z_pre, c_zero), conj(end(_t("x", (4, "d"), 3)), same_z, jump))
        )
        pos_y = forall(
            "x y",
            Implies(
                conj(chunk("x"), le(xd, y1), le(y1, x2d), end(y1), chi(j, "x"), lt(_t("x", "d", 3), y1)),
                conj(same_y, nxt),
            ),
        )
        pos_z = forall("x z", Implies(conj(*z_pre, Not(c_zero)), same_z))
    else:
        c_zero = end(_t("x", (2, "d"), 3))
        zero = forall(
            "x y", Implies(conj(*y_pre, c_zero), conj(same_y, end(_t("x", (5, "d"), 3)), jump))
        )
        pos_y = forall("x y", Implies(conj(*y_pre, Not(c_zero)), conj(same_y, nxt)))
        pos_z = forall(
            "x z",
            Implies(
                conj(chunk("x"), le(x2d, z1), le(z1, x3d), end(z1), chi(j, "x"), lt(_t("x", (2, "d"), 3), z1)),
                same_z,
            ),
        )
    return [(f"{name}.zero", zero), (f"{name}.pos.y", pos_y), (f"{name}.pos.z", pos_z)]


def fixed_width_sentences(p: Program, m: int, n: int, k: int) -> list[tuple[str, Formula]]:
    K = p.K
    d3 = _t((3, "d"))
    x3d = _t("x", (3, "d"))
    out: list[tuple[str, Formula]] = [
        ("phi1.1", conj(le(k, "d"), le(0, "e"))),
        ("phi1.2", conj(chunk(0), brk("d"), brk((2, "d")))),
        ("phi1.3", forall("x", Implies(lt("x", 0), nP("x")))),
        ("phi1.4", forall("x", Implies(conj(chunk("x"), lt("x", d3), Not(eq("x", 0))), Bottom()))),
        (
            "phi1.5",
            forall(
                "x",
                Implies(
                    conj(brk("x"), lt("x", d3), Not(eq("x", "d")), Not(eq("x", (2, "d")))),
                    Bottom(),
                ),
            ),
        ),
        ("phi1.6", forall("x", Implies(conj(chunk("x"), lt("x", "e")), chunk(x3d)))),
        ("phi1.7", forall("x", Implies(chunk(x3d), chunk("x")))),
        ("phi1.8", forall("x", Implies(conj(brk("x"), lt("x", "e")), brk(x3d)))),
        ("phi1.9", forall("x", Implies(brk(x3d), brk("x")))),
        ("phi2", conj(chi(0, 0), end(_t("d", 3 + m)), end(_t((2, "d"), 3 + n)))),
        (
            "phi3",
            forall(
                "x y",
                Implies(
                    conj(chunk("x"), end("y"), lt(_t("x", 5 + K), "y"), le("y", _t("x", "d"))),
                    Bottom(),
                ),
            ),
        ),
    ]
    for j in range(K):
        out += fixed_width_line(p, j)
    out.append(("phi4", conj(chunk("e"), chi(K, "e"))))
    return out


# ---------------------------------------------------------------------------
# entry point


def encode(p: Program, m: int, n: int, variant: Variant | str = Variant.STANDARD) -> EncodingResult:
    if isinstance(variant, str):
        variant = Variant.parse(variant)
    problems = validate_program(p)
    if problems:
        raise EncodingError("invalid program: " + "; ".join(problems))
    if m < 0 or n < 0:
        raise EncodingError("inputs must be natural numbers")
    if variant is Variant.NONDET_RECURRENCE:
        if not p.has_branches:
            raise EncodingError("nondet-recurrence needs a program with branch annotations")
        if (m, n) != (0, 0):
            raise EncodingError("nondet-recurrence fixes the input to (0, 0)")
    elif p.has_branches:
        raise EncodingError(f"{variant.value} encodes deterministic programs only")

    K = p.K
    d = compute_d(p, m, n)
    digest = p.digest()

    if variant is Variant.FIXED_WIDTH:
        return EncodingResult(
            variant,
            tuple(fixed_width_sentences(p, m, n, d)),
            digest,
            d=None,
            k=d,
            constants=("d", "e"),
            unguarded=frozenset({"phi1.3"}),
        )

    if variant is Variant.FINITE_EXISTS:
        body = [s for _, s in phi1(d, guard_z=True)]
        body += [phi2(d, m, n), phi3(K)]
        for j in range(K):
            body += [s for _, s in standard_line(p, j)]
        body.append(conj(chunk("z"), chi(K, "z")))
        return EncodingResult(variant, (("phi", exists("z", conj(*body))),), digest, d=d)

    two_var = variant is Variant.TWO_VAR
    nondet = variant is Variant.NONDET_RECURRENCE
    sentences = phi1(d, two_var=two_var)
    sentences.append(("phi2", phi2(d, 0, 0) if nondet else phi2(d, m, n)))
    sentences.append(("phi3", phi3(K)))
    for j in range(K + 1):
        sentences += two_var_line(p, j) if two_var else standard_line(p, j, nondet)
    if nondet:
        sentences.append(("phi5", forall("x", exists("y", conj(le("x", "y"), chunk("y"), chi(0, "y"))))))
    else:
        sentences.append(("phi4", phi4(K)))

    flavor = None
    if variant in (Variant.FN_HORN_NAT, Variant.FN_HORN_REAL):
        flavor = Flavor.NAT if variant is Variant.FN_HORN_NAT else Flavor.REAL
        converted = []
        axiom = None
        for name, s in sentences:
            s2, axiom = predicate_to_function(s, flavor)
            converted.append((name, s2))
        converted.append(("frange", axiom))
        sentences = converted
    return EncodingResult(variant, tuple(sentences), digest, d=d, flavor=flavor)


def to_smtlib(enc: EncodingResult) -> str:
    from . import smtlib

    comments = []
    if enc.d is not None:
        comments.append(f"d = {enc.d}")
    if enc.k is not None:
        comments.append(f"k = {enc.k}")
    return smtlib.to_smtlib(
        enc.sentences,
        variant=enc.variant.value,
        machine_hash=enc.machine_hash,
        real=enc.flavor is Flavor.REAL,
        constants=enc.constants,
        unguarded=enc.unguarded,
        extra_comments=comments,
    )


def clauses(enc: EncodingResult, include_exists: bool = False):
    """CNF of every universal sentence (sentences with an existential are skipped
    unless ``include_exists``, in which case ``to_cnf`` raises on them)."""
    total = ClauseSet((), frozenset(enc.constants))
    for _, s in enc.sentences:
        if not include_exists and has_quantifier(s, Exists):
            continue
        total = total + to_cnf(s, enc.constants)
    return total


__all__ = [
    "Variant",
    "EncodingResult",
    "EncodingError",
    "compute_d",
    "chunk",
    "brk",
    "start",
    "end",
    "chi",
    "encode",
    "to_smtlib",
    "clauses",
]
