"""Two-counter (Minsky) machines: program representation, parsing and simulation.

A program is a list of lines ``0..K``.  Each line is ``inc``, ``tdec`` (test and
decrement, jumping to a target when the counter is zero) or ``halt``.  Lines other
than ``halt`` may carry a nondeterministic *branch*: a pair of successor lines
that replaces the usual fall-through to ``j + 1``.  A zero-test jump of ``tdec``
ignores the branch.

The DSL, one instruction per line::

    # comment
    0: inc c1
    1: tdec c2 0        # jump to line 0 when c2 == 0
    2: inc c2 -> 0 | 1  # fall through to 0 or 1
    3: halt
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union


class MachineError(Exception):
    """Raised for malformed programs and illegal simulation requests."""


class ProgramSyntaxError(MachineError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Inc:
    counter: int
    branch: Optional[tuple[int, int]] = None

    def __str__(self) -> str:
        return f"inc c{self.counter}" + _branch_suffix(self.branch)


@dataclass(frozen=True)
class TestDec:
    counter: int
    target: int
    branch: Optional[tuple[int, int]] = None

    # keep pytest from collecting this class
    __test__ = False

    def __str__(self) -> str:
        return f"tdec c{self.counter} {self.target}" + _branch_suffix(self.branch)


@dataclass(frozen=True)
class Halt:
    branch: None = None

    def __str__(self) -> str:
        return "halt"


Instruction = Union[Inc, TestDec, Halt]


def _branch_suffix(branch: Optional[tuple[int, int]]) -> str:
    if branch is None:
        return ""
    return f" -> {branch[0]} | {branch[1]}"


@dataclass(frozen=True)
class Program:
    lines: tuple[Instruction, ...]

    def __post_init__(self):
        if not self.lines:
            raise MachineError("a program needs at least one line")
        object.__setattr__(self, "lines", tuple(self.lines))

    @property
    def K(self) -> int:
        return len(self.lines) - 1

    def __len__(self) -> int:
        return len(self.lines)

    def __getitem__(self, j: int) -> Instruction:
        return self.lines[j]

    @property
    def has_branches(self) -> bool:
        return any(ins.branch is not None for ins in self.lines)

    def to_text(self) -> str:
        return "".join(f"{j}: {ins}\n" for j, ins in enumerate(self.lines))

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()


class Configuration(NamedTuple):
    line: int
    c1: int
    c2: int

    def __str__(self) -> str:
        return f"<{self.line}, {self.c1}, {self.c2}>"


@dataclass(frozen=True)
class Run:
    input: tuple[int, int]
    configs: tuple[Configuration, ...]
    halt_step: Optional[int] = None
    K: int = 0

    @property
    def halted(self) -> bool:
        return self.halt_step is not None

    @property
    def status(self) -> str:
        return "running" if self.halt_step is None else f"halted at step {self.halt_step}"


class _Halted:
    def __repr__(self) -> str:
        return "HALTED"


HALTED = _Halted()


_LINE_RE = re.compile(
    r"""\s*(?P<label>\d+)\s*:\s*
        (?P<op>[A-Za-z]+)
        (?:\s+(?P<counter>\S+))?
        (?:\s+(?P<target>\d+))?
        (?:\s*->\s*(?P<b1>\d+)\s*\|\s*(?P<b2>\d+))?
        \s*$""",
    re.VERBOSE,
)


def _parse_counter(token: Optional[str], lineno: int, col: int) -> int:
    if token not in ("c1", "c2"):
        raise ProgramSyntaxError(f"expected counter c1 or c2, got {token!r}", lineno, col)
    return int(token[1])


def parse_program(text: str) -> Program:
    """Parse the program DSL.  Labels may appear in any order but must be 0..K."""
    by_label: dict[int, Instruction] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        m = _LINE_RE.match(body)
        if m is None:
            col = len(body) - len(body.lstrip()) + 1
            head = re.match(r"\s*\d+\s*:", body)
            if head is None:
                raise ProgramSyntaxError("expected 'LABEL:'", lineno, col)
            raise ProgramSyntaxError("malformed instruction", lineno, head.end() + 1)
        label = int(m["label"])
        op = m["op"].lower()
        branch = (int(m["b1"]), int(m["b2"])) if m["b1"] is not None else None
        op_col = m.start("op") + 1
        if op == "inc":
            if m["target"] is not None:
                raise ProgramSyntaxError("inc takes no target", lineno, m.start("target") + 1)
            ins: Instruction = Inc(_parse_counter(m["counter"], lineno, op_col), branch)
        elif op == "tdec":
            if m["target"] is None:
                raise ProgramSyntaxError("tdec needs a jump target", lineno, op_col)
            ins = TestDec(_parse_counter(m["counter"], lineno, op_col), int(m["target"]), branch)
        elif op == "halt":
            if m["counter"] is not None or m["target"] is not None:
                raise ProgramSyntaxError("halt takes no operands", lineno, op_col)
            if branch is not None:
                raise ProgramSyntaxError("halt cannot branch", lineno, op_col)
            ins = Halt()
        else:
            raise ProgramSyntaxError(f"unknown instruction {m['op']!r}", lineno, op_col)
        if label in by_label:
            raise ProgramSyntaxError(f"duplicate label {label}", lineno, m.start("label") + 1)
        by_label[label] = ins
    if not by_label:
        raise MachineError("empty program")
    missing = sorted(set(range(max(by_label) + 1)) - set(by_label))
    if missing:
        raise MachineError(f"missing labels: {', '.join(map(str, missing))}")
    return Program(tuple(by_label[j] for j in range(len(by_label))))


def validate_program(p: Program) -> list[str]:
    """Return the list of violations; an empty list means the program is well formed."""
    K = p.K
    problems = []
    if not isinstance(p.lines[-1], Halt):
        problems.append("last line not halt")
    for j, ins in enumerate(p.lines):
        if isinstance(ins, TestDec) and not 0 <= ins.target <= K:
            problems.append(f"line {j}: target {ins.target} > K={K}")
        if ins.branch is not None:
            if isinstance(ins, Halt):
                problems.append(f"line {j}: halt cannot branch")
            for b in ins.branch:
                if not 0 <= b <= K:
                    problems.append(f"line {j}: branch target {b} > K={K}")
        if isinstance(ins, (Inc, TestDec)) and ins.counter not in (1, 2):
            problems.append(f"line {j}: no counter c{ins.counter}")
    return problems


def _require_valid(p: Program) -> None:
    problems = validate_program(p)
    if problems:
        raise MachineError("invalid program: " + "; ".join(problems))


def step(p: Program, c: Configuration, choice: Optional[int] = None):
    """Execute one line.  Returns the successor configuration or ``HALTED``.

    ``choice`` selects the branch successor (0 for the first, 1 for the second)
    and must be given exactly when the line branches and falls through.
    """
    if not 0 <= c.line <= p.K:
        raise MachineError(f"line {c.line} outside 0..{p.K}")
    ins = p[c.line]
    if isinstance(ins, Halt):
        return HALTED
    counters = [c.c1, c.c2]
    if isinstance(ins, TestDec) and counters[ins.counter - 1] == 0:
        if choice is not None:
            raise MachineError(f"line {c.line}: zero-test jump takes no choice")
        return Configuration(ins.target, c.c1, c.c2)
    if isinstance(ins, Inc):
        counters[ins.counter - 1] += 1
    else:
        counters[ins.counter - 1] -= 1
    if ins.branch is None:
        if choice is not None:
            raise MachineError(f"line {c.line} does not branch")
        nxt = c.line + 1
    else:
        if choice not in (0, 1):
            raise MachineError(f"line {c.line} branches: a choice bit is required")
        nxt = ins.branch[choice]
    return Configuration(nxt, counters[0], counters[1])


def needs_choice(p: Program, c: Configuration) -> bool:
    ins = p[c.line]
    if ins.branch is None:
        return False
    return not (isinstance(ins, TestDec) and (c.c1, c.c2)[ins.counter - 1] == 0)


def run(
    p: Program,
    m: int,
    n: int,
    max_steps: int,
    choices: Optional[Sequence[int]] = None,
) -> Run:
    """Simulate from ``<0, m, n>`` for at most ``max_steps`` steps.

    A run halts on *entering* a halt line; that configuration is the last one.
    """
    _require_valid(p)
    if m < 0 or n < 0 or max_steps < 0:
        raise MachineError("inputs and step budget must be natural numbers")
    pending = iter(choices or ())
    c = Configuration(0, m, n)
    configs = [c]
    if isinstance(p[0], Halt):
        return Run((m, n), tuple(configs), 0, p.K)
    for s in range(1, max_steps + 1):
        choice = None
        if needs_choice(p, c):
            choice = next(pending, None)
            if choice is None:
                raise MachineError(f"choice sequence exhausted at step {s} (line {c.line})")
        c = step(p, c, choice)
        configs.append(c)
        if isinstance(p[c.line], Halt):
            return Run((m, n), tuple(configs), s, p.K)
    return Run((m, n), tuple(configs), None, p.K)


def extend_halting(r: Run, n_chunks: int) -> tuple[Configuration, ...]:
    """Return exactly ``n_chunks`` configurations of the (infinite) run.

    A halted run is continued by repeating ``<K, c1, c2>`` forever; ``K`` is the
    last program line, whatever halt line was entered.  A running run must
    already be long enough and is truncated to ``n_chunks``.
    """
    configs = r.configs
    if len(configs) >= n_chunks:
        return configs[:n_chunks]
    if not r.halted:
        raise MachineError(
            f"run still running after {len(configs)} configurations; {n_chunks} requested"
        )
    last = configs[-1]
    return configs + (Configuration(r.K, last.c1, last.c2),) * (n_chunks - len(configs))
