from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from minsky_presburger.machine import parse_program  # noqa: E402

CORPUS_TEXT = {
    "M_halt0": "0: halt\n",
    "M_inc": "0: inc c1\n1: halt\n",
    "M_loop": "0: inc c1\n1: tdec c2 0\n2: halt\n",
    # zero test jumps straight to halt on input (0, n)
    "M_dec": "0: tdec c1 2\n1: inc c2\n2: halt\n",
    # counts c1 down to zero, one decrement per pass
    "M_countdown": "0: tdec c1 2\n1: tdec c2 0\n2: halt\n",
}
BRANCHING_TEXT = "0: inc c1 -> 1 | 2\n1: tdec c1 0 -> 0 | 0\n2: halt\n"


@pytest.fixture(scope="session")
def corpus():
    return {name: parse_program(text) for name, text in CORPUS_TEXT.items()}


@pytest.fixture(scope="session")
def branching():
    return parse_program(BRANCHING_TEXT)


# ---------------------------------------------------------------------------
# one PASS/FAIL line per acceptance criterion

_criteria: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            num = mark.args[0]
            _criteria.setdefault(num, {"title": mark.kwargs.get("title", ""), "outcomes": []})
            item.user_properties.append(("criterion", num))


def pytest_runtest_logreport(report):
    num = dict(report.user_properties).get("criterion")
    if num is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _criteria[num]["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        outcomes = _criteria[num]["outcomes"]
        if not outcomes:
            status = "NOT RUN"
        elif "failed" in outcomes:
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {num}: {status}  {_criteria[num]['title']}")
