import numpy as np
import pytest

from bilinear import linalg
from bilinear import oracles as O
from bilinear.linalg import Subspace
from conftest import make_space


def test_lemma_suite_exhaustive(s22):
    for r in O.lemma_suite(s22, mode="exhaustive"):
        assert r.mode == "exhaustive"
        assert r.instances > 0 and r.passed, r.as_dict()


def test_operator_suite_exhaustive(s22):
    for r in O.operator_suite(s22, mode="exhaustive"):
        assert r.passed, r.as_dict()


def test_averaging_multipliers(s22):
    reps = O.check_averaging_multipliers(s22)
    assert [r.lemma_id for r in reps] == ["average_over_v", "average_over_hyperplane_of_W"]
    assert all(r.passed and r.max_err < 1e-10 for r in reps)


def test_sampled_runs_are_seeded():
    sp = make_space(2, 2, 3)
    a = O.check_trace_lemma(sp, mode="sample", samples=50, seed=4).as_dict()
    b = O.check_trace_lemma(sp, mode="sample", samples=50, seed=4).as_dict()
    assert a == b and a["mode"] == "sampled" and a["pass"]


def test_trace_lemma_trivial_frame(s22):
    F = s22.F
    V0, W = s22.zero_V(), s22.full_W()
    rng = np.random.default_rng(0)
    for _ in range(20):
        A, X = rng.integers(0, 2, (2, 2)), rng.integers(0, 2, (2, 2))
        lifted = linalg.lift(F, A, V0, W)
        pushed = linalg.pushdown(F, X, W, V0)
        assert linalg.trace_of(F, linalg.matmul(F, A, pushed)) == linalg.trace_of(F, linalg.matmul(F, lifted, X))


def test_hybrid_condition_examples(s22):
    F = s22.F
    I = linalg.identity(2)
    V1 = Subspace.span(F, 2, [(1, 0)])
    W1 = Subspace.span(F, 2, [(0, 1)])
    assert not O.hybrid_condition(F, I, V1, W1)
    assert O.hybrid_condition(F, I, s22.zero_V(), s22.full_W())


def test_report_records_first_failure():
    r = O.LemmaReport("demo")
    r.record_err(1e-12)
    r.record_err(0.5, {"where": 3})
    r.record_err(0.7, {"where": 4})
    d = r.as_dict()
    assert not d["pass"] and d["failures"] == 2 and d["first_failure"] == {"where": 3}
    assert not O.LemmaReport("empty").passed


@pytest.mark.parametrize("q,n,m", [(2, 2, 3), (3, 2, 2)])
def test_sampled_suites_larger_dims(q, n, m):
    sp = make_space(q, n, m)
    for r in O.lemma_suite(sp, mode="sample", samples=100, seed=1):
        assert r.passed, r.as_dict()
