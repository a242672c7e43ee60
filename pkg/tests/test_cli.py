from __future__ import annotations

import json

import pytest

from minsky_presburger.cli import main
from minsky_presburger.model import load

from conftest import BRANCHING_TEXT, CORPUS_TEXT


@pytest.fixture
def prog(tmp_path):
    def write(text, name="p.2cm"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_running(capsys, prog):
    code, out, _ = run(capsys, "simulate", "--program", prog(CORPUS_TEXT["M_loop"]), "--max-steps", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines == ["0: <0, 0, 0>", "1: <1, 1, 0>", "2: <0, 1, 0>", "3: <1, 2, 0>", "4: <0, 2, 0>  running"]


def test_simulate_halting(capsys, prog):
    code, out, _ = run(capsys, "simulate", "--program", prog(CORPUS_TEXT["M_inc"]))
    assert code == 0
    assert out.splitlines()[-1] == "1: <1, 1, 0>  halted at step 1"


def test_simulate_choices(capsys, prog):
    code, out, _ = run(capsys, "simulate", "--program", prog(BRANCHING_TEXT), "--choices", "1")
    assert code == 0 and out.splitlines()[-1].endswith("halted at step 1")
    code, _, err = run(capsys, "simulate", "--program", prog(BRANCHING_TEXT), "--max-steps", "3")
    assert code == 1 and "choice" in err


def test_encode_smt2(capsys, prog):
    code, out, _ = run(capsys, "encode", "--program", prog(CORPUS_TEXT["M_inc"]), "--format", "smt2")
    assert code == 0
    assert out.count("(assert ") == 13
    assert "(check-sat)" in out


def test_encode_is_byte_stable(capsys, prog):
    path = prog(CORPUS_TEXT["M_loop"])
    outs = {run(capsys, "encode", "--program", path, "--variant", "two-var")[1] for _ in range(3)}
    assert len(outs) == 1
    text = outs.pop()
    assert text.startswith("# variant: two-var\n# machine: sha256:")
    assert "phi4: forall x. chunk(x) -> ~chi2(x)" in text


def test_encode_cnf_lists_omitted(capsys, prog):
    code, out, _ = run(capsys, "encode", "--program", prog(BRANCHING_TEXT), "--variant", "nondet-recurrence", "--format", "cnf")
    assert code == 0
    assert "omitted: phi5" in out


def test_encode_to_file(capsys, prog, tmp_path):
    target = tmp_path / "out.smt2"
    code, out, _ = run(capsys, "encode", "--program", prog(CORPUS_TEXT["M_inc"]), "--format", "smt2", "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_text().count("(assert ") == 13


def test_model_dump(capsys, prog):
    code, out, _ = run(capsys, "model", "--program", prog(CORPUS_TEXT["M_inc"]), "--chunks", "3")
    assert code == 0
    bm = load(out)
    assert bm.layout.d == 7 and bm.length == 454
    code, out, _ = run(capsys, "model", "--program", prog(CORPUS_TEXT["M_inc"]), "--layout", "fixed", "--chunks", "5")
    assert code == 0 and out.startswith("d=7 layout=fixed chunks=2 e=21\n")


def test_check_m_inc(capsys, prog):
    code, out, _ = run(capsys, "check", "--program", prog(CORPUS_TEXT["M_inc"]), "--chunks", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["summary"] == "violated: phi4"
    bad = [r for r in doc["results"] if r["verdict"] == "violated"]
    assert bad == [{"name": "phi4", "verdict": "violated", "witness": {"x": 28}, "failing_literal": "~chi1(28)"}]
    assert doc["bound"] == 112


def test_check_loaded_model(capsys, prog, tmp_path):
    path = prog(CORPUS_TEXT["M_loop"])
    code, dump_text, _ = run(capsys, "model", "--program", path, "--chunks", "3")
    dump_path = tmp_path / "m.txt"
    dump_path.write_text(dump_text)
    code, out, _ = run(capsys, "check", "--program", path, "--model", str(dump_path), "--jobs", "2")
    assert code == 0
    assert json.loads(out)["summary"] == "all-satisfied"


def test_check_fixed_and_finite(capsys, prog):
    path = prog(CORPUS_TEXT["M_inc"])
    code, out, _ = run(capsys, "check", "--program", path, "--variant", "fixed-width", "--chunks", "4")
    doc = json.loads(out)
    assert code == 0 and doc["summary"] == "all-satisfied" and doc["constants"] == {"d": 7, "e": 21}
    code, out, _ = run(capsys, "check", "--program", path, "--variant", "finite-exists", "--chunks", "4")
    doc = json.loads(out)
    assert doc["summary"] == "bounded-satisfied"
    assert doc["results"][0]["witnesses"] == [{"z": 28}]


def test_check_nondet(capsys, prog):
    code, out, _ = run(
        capsys, "check", "--program", prog(BRANCHING_TEXT), "--variant", "nondet-recurrence",
        "--chunks", "4", "--choices", "0000",
    )
    doc = json.loads(out)
    assert code == 0 and doc["summary"] == "bounded-satisfied"
    assert doc["bound"] == 128 and doc["exists_bound"] == 512


@pytest.mark.parametrize(
    "argv_tail, text, want",
    [
        (["simulate"], "0: jump 3\n", 1),
        (["simulate"], "0: tdec c1 9\n1: halt\n", 1),
        (["encode", "--variant", "standard"], BRANCHING_TEXT, 1),
        (["model", "--d", "3"], CORPUS_TEXT["M_inc"], 1),
        (["check", "--variant", "bogus"], CORPUS_TEXT["M_inc"], 2),
        (["simulate", "--input", "1,x"], CORPUS_TEXT["M_inc"], 2),
    ],
)
def test_exit_codes(capsys, prog, argv_tail, text, want):
    cmd, *rest = argv_tail
    code, _, err = run(capsys, cmd, "--program", prog(text), *rest)
    assert code == want
    assert err


def test_missing_file_is_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--program", str(tmp_path / "nope.2cm"))
    assert code == 2 and "cannot read" in err


def test_no_command(capsys):
    assert run(capsys)[0] == 2
