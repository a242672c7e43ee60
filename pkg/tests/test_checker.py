from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minsky_presburger import machine
from minsky_presburger.checker import (
    BoundedSatisfied,
    CheckerConfig,
    Satisfied,
    Violated,
    check_bounded,
    check_report,
    eval_ground,
    required_length,
)
from minsky_presburger.encoder import Variant, chi, chunk, encode, end
from minsky_presburger.logic import (
    Bottom,
    Forall,
    Implies,
    P,
    clause_formula,
    conj,
    disj,
    eq,
    exists,
    forall,
    le,
    nP,
    substitute,
    to_cnf,
)
from minsky_presburger.model import BitModel, ModelAccessError, build_canonical, chunk_start

from conftest import CORPUS_TEXT
from oracles import first_counterexample, reference_run


def growing(p, m, n, count, d=None, finite=False, choices=None):
    from minsky_presburger.encoder import compute_d

    d = d or compute_d(p, m, n)
    r = machine.run(p, m, n, count, choices)
    return build_canonical(machine.extend_halting(r, count), d, finite=finite)


@pytest.fixture(scope="module")
def inc_model(corpus):
    return growing(corpus["M_inc"], 0, 0, 4)


@pytest.mark.parametrize("bound, want", [(112, 1800), (0, 8), (448, 7176)])
def test_required_length(bound, want):
    assert required_length(bound) == want


def test_config_validation():
    assert CheckerConfig(5).exists_bound == 5
    assert CheckerConfig(5, 9).exists_bound == 9
    with pytest.raises(ValueError):
        CheckerConfig(-1)
    with pytest.raises(ValueError):
        CheckerConfig(10, access_limit=100)
    CheckerConfig(10, access_limit=168)


def test_eval_ground(inc_model):
    assert eval_ground(end(12), inc_model)
    assert eval_ground(chi(1, 28), inc_model)
    assert not eval_ground(chi(0, 28), inc_model)
    assert eval_ground(le(3, 3), inc_model)
    assert not eval_ground(conj(P(9), Bottom()), inc_model)
    assert eval_ground(disj(P(0), P(9)), inc_model)
    with pytest.raises(Exception):
        eval_ground(forall("x", P("x")), inc_model)


def test_m_inc_sentences(corpus, inc_model):
    enc = encode(corpus["M_inc"], 0, 0)
    cfg = CheckerConfig(112)
    assert isinstance(check_bounded(enc["phi2"], inc_model, cfg), Satisfied)
    v = check_bounded(enc["phi4"], inc_model, cfg)
    assert v == Violated({"x": 28}, "~chi1(28)")


def test_vacuous_universal(inc_model):
    s = forall("x", Implies(eq(P("x").arg + 1, 0), Bottom()))
    assert isinstance(check_bounded(s, inc_model, CheckerConfig(50)), Satisfied)


def test_access_past_model_raises(inc_model):
    s = forall("x", disj(P("x"), nP("x")))
    with pytest.raises(ModelAccessError):
        check_bounded(s, inc_model, CheckerConfig(inc_model.length + 5))


def test_finite_support_reads_zero(corpus):
    bm = growing(corpus["M_inc"], 0, 0, 2, finite=True)
    s = forall("x", Implies(le(200, "x"), nP("x")))
    assert isinstance(check_bounded(s, bm, CheckerConfig(1000)), Satisfied)


def test_existential_only(corpus):
    bm = growing(corpus["M_inc"], 0, 0, 2, finite=True)
    s = exists("z", conj(chunk("z"), chi(1, "z")))
    v = check_bounded(s, bm, CheckerConfig(100))
    assert isinstance(v, BoundedSatisfied) and v.witnesses == (({}, {"z": 28}),)
    v = check_bounded(exists("z", conj(chunk("z"), chi(0, "z"), le(20, "z"))), bm, CheckerConfig(100))
    assert isinstance(v, Violated)


def test_recurrence(branching):
    enc = encode(branching, 0, 0, Variant.NONDET_RECURRENCE)
    loops = growing(branching, 0, 0, 4, choices=[0] * 10)
    v = check_bounded(enc["phi5"], loops, CheckerConfig(128, 512))
    assert isinstance(v, BoundedSatisfied)
    assert all(b["y"] in (8, 128) for _, b in v.witnesses)
    assert {a["x"] for a, _ in v.witnesses} == set(range(129))
    # choosing the halt branch at once: line 0 never comes back
    stops = growing(branching, 0, 0, 4, choices=[1])
    v = check_bounded(enc["phi5"], stops, CheckerConfig(128, 512))
    assert isinstance(v, Violated) and v.witness == {"x": 9}
    assert "no witness" in v.failing_literal


# ---------------------------------------------------------------------------
# agreement with the brute-force oracle


def damaged(bm: BitModel, flips) -> BitModel:
    bits = bm.bits.copy()
    for i in flips:
        bits[i] ^= 1
    return BitModel(bits, bm.layout, bm.finite_support)


@pytest.mark.parametrize("name", ["M_inc", "M_loop", "M_dec"])
@pytest.mark.parametrize("variant", [Variant.STANDARD, Variant.TWO_VAR])
def test_agrees_with_oracle(corpus, name, variant):
    p = corpus[name]
    bm = growing(p, 0, 0, 3)
    bound = 20
    text = bm.to_string()
    for sname, s in encode(p, 0, 0, variant):
        v = check_bounded(s, bm, CheckerConfig(bound))
        want = first_counterexample(s, text, bound)
        if want is None:
            assert isinstance(v, Satisfied), sname
        else:
            assert isinstance(v, Violated) and dict(v.witness) == want, sname


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=1, max_size=4))
def test_agrees_with_oracle_on_damaged_models(flips):
    p = machine.parse_program(CORPUS_TEXT["M_loop"])
    bm = damaged(growing(p, 0, 0, 3), flips)
    text = bm.to_string()
    for sname, s in encode(p, 0, 0, Variant.TWO_VAR):
        v = check_bounded(s, bm, CheckerConfig(14))
        want = first_counterexample(s, text, 14)
        if want is None:
            assert isinstance(v, Satisfied), sname
        else:
            assert isinstance(v, Violated) and dict(v.witness) == want, sname


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 60), min_size=1, max_size=3))
def test_violations_are_sound_and_persist(flips):
    p = machine.parse_program(CORPUS_TEXT["M_inc"])
    bm = damaged(growing(p, 0, 0, 4), flips)
    for sname, s in encode(p, 0, 0):
        v = check_bounded(s, bm, CheckerConfig(30))
        if not isinstance(v, Violated):
            continue
        body = s.body if isinstance(s, Forall) else s
        assert not eval_ground(substitute(body, dict(v.witness)), bm), sname
        assert isinstance(check_bounded(s, bm, CheckerConfig(112)), Violated), sname


@pytest.mark.parametrize("flips", [(), (34,), (60, 61), (9,)])
def test_cnf_agrees_with_formula(corpus, flips):
    p = corpus["M_loop"]
    bm = damaged(growing(p, 0, 0, 3, finite=True), flips)
    cfg = CheckerConfig(40)
    for sname, s in encode(p, 0, 0):
        whole = isinstance(check_bounded(s, bm, cfg), Satisfied)
        parts = [isinstance(check_bounded(clause_formula(c), bm, cfg), Satisfied) for c in to_cnf(s).clauses]
        assert whole == all(parts), sname


@pytest.mark.parametrize("flips", [(), (34,), (9, 200)])
def test_fn_variants_agree_with_predicate_form(corpus, flips):
    p = corpus["M_loop"]
    bm = damaged(growing(p, 0, 0, 4), flips)
    cfg = CheckerConfig(128)
    base = check_report(encode(p, 0, 0), bm, cfg)
    for variant in (Variant.FN_HORN_NAT, Variant.FN_HORN_REAL):
        rep = check_report(encode(p, 0, 0, variant), bm, cfg)
        assert isinstance(rep["frange"], Satisfied)
        for name, v in base.results:
            assert rep[name] == v, name


# ---------------------------------------------------------------------------
# halting equivalence over the corpus


RAW = {
    "M_halt0": [("halt",)],
    "M_inc": [("inc", 1), ("halt",)],
    "M_loop": [("inc", 1), ("tdec", 2, 0), ("halt",)],
    "M_dec": [("tdec", 1, 2), ("inc", 2), ("halt",)],
    "M_countdown": [("tdec", 1, 2), ("tdec", 2, 0), ("halt",)],
}


@pytest.mark.parametrize("name", sorted(RAW))
@pytest.mark.parametrize("m, n", [(0, 0), (1, 0), (2, 1)])
@pytest.mark.parametrize("chunks", [2, 3])
def test_halting_equivalence(corpus, name, m, n, chunks):
    p = corpus[name]
    enc = encode(p, m, n)
    bm = growing(p, m, n, chunks)
    d = bm.layout.d
    bound = chunk_start(chunks - 1, d)
    rep = check_report(enc, bm, CheckerConfig(bound))
    _, halt_step = reference_run(RAW[name], m, n, chunks - 1)
    assert rep.violations in ([], ["phi4"])
    if halt_step is None:
        assert rep.summary == "all-satisfied"
    else:
        assert rep.violations == ["phi4"]
        assert rep["phi4"].witness == {"x": chunk_start(halt_step, d)}


def test_jobs_do_not_change_results(corpus):
    p = corpus["M_loop"]
    bm = growing(p, 0, 0, 4)
    enc = encode(p, 0, 0, Variant.TWO_VAR)
    cfg = CheckerConfig(128)
    assert check_report(enc, bm, cfg, jobs=1).results == check_report(enc, bm, cfg, jobs=4).results


def test_fixed_width_constants(corpus):
    from minsky_presburger.model import build_fixed_width, halting_prefix

    p = corpus["M_inc"]
    configs = halting_prefix(machine.run(p, 0, 0, 3).configs, p.K)
    bm = build_fixed_width(configs, 7)
    rep = check_report(encode(p, 0, 0, Variant.FIXED_WIDTH), bm, CheckerConfig(63))
    assert rep.constants == {"d": 7, "e": 21}
    assert rep.summary == "all-satisfied"
    # e pointing at the first chunk breaks the final-line sentence
    rep = check_report(encode(p, 0, 0, Variant.FIXED_WIDTH), bm, CheckerConfig(63), constants={"d": 7, "e": 0})
    assert "phi4" in rep.violations
    assert np.array_equal(bm.bits, build_fixed_width(configs, 7).bits)
