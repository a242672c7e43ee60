"""Hypothesis strategies shared by several test modules."""
from __future__ import annotations

from hypothesis import strategies as st

from minsky_presburger.machine import Program, parse_program


@st.composite
def raw_programs(draw, max_lines: int = 5):
    """Programs as tuples ('inc', c) / ('tdec', c, target) / ('halt',), last line halt."""
    K = draw(st.integers(0, max_lines - 1))
    raw = []
    for _ in range(K):
        c = draw(st.sampled_from([1, 2]))
        if draw(st.booleans()):
            raw.append(("inc", c))
        else:
            raw.append(("tdec", c, draw(st.integers(0, K))))
    raw.append(("halt",))
    return raw


def to_program(raw) -> Program:
    lines = []
    for j, ins in enumerate(raw):
        if ins[0] == "inc":
            lines.append(f"{j}: inc c{ins[1]}")
        elif ins[0] == "tdec":
            lines.append(f"{j}: tdec c{ins[1]} {ins[2]}")
        else:
            lines.append(f"{j}: halt")
    return parse_program("\n".join(lines))


programs = raw_programs().map(to_program)
