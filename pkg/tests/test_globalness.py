import numpy as np
import pytest

from bilinear import fourier as Fr
from bilinear import globalness as G
from bilinear import linalg
from bilinear.errors import ContractError
from bilinear.oracles import hybrid_condition, naive_inverse_oracle, naive_transform_oracle
from conftest import make_space


def brute_slice(sp, V1, W1, T):
    # all B with (B - T) zero on V1 and image inside W1
    F = sp.F
    out = []
    for b in range(sp.N):
        D = linalg.matsub(F, sp.dom.matrix(b), sp.dom.matrix(T))
        if all(not linalg.apply(F, D, v).any() for v in V1.basis) and W1.contains_subspace(linalg.image(F, D)):
            out.append(b)
    return out


def brute_restriction_level(sp, f, d):
    best = 0.0
    for V1 in sp.V.subspaces:
        for W1 in sp.W.subspaces:
            if V1.dim + W1.codim > d:
                continue
            for T in range(sp.N):
                best = max(best, float(np.mean(np.abs(f[brute_slice(sp, V1, W1, T)]) ** 2)))
    return best


def brute_influence_level(sp, f, d):
    c = naive_transform_oracle(sp, f)
    best = 0.0
    for V1 in sp.V.subspaces:
        for W1 in sp.W.subspaces:
            if V1.dim + W1.codim > d:
                continue
            keep = np.array([hybrid_condition(sp.F, sp.dual.matrix(x), V1, W1) for x in range(sp.N)])
            lap = naive_inverse_oracle(sp, c * keep)
            for T in range(sp.N):
                best = max(best, float(np.mean(np.abs(lap[brute_slice(sp, V1, W1, T)]) ** 2)))
    return best


def test_constant_certificate(s22):
    cert = G.certify_restriction_global(s22, np.ones(16), 2)
    assert cert.worst_value == pytest.approx(1.0)
    assert cert.verdict


def test_dictator_is_not_global(s22):
    f = Fr.dictator(s22, [1, 0], [0, 1])
    cert = G.certify_restriction_global(s22, f, 1, epsilon=0.99)
    assert cert.worst_value == pytest.approx(1.0)
    assert not cert.verdict


@pytest.mark.parametrize("q,n,m", [(2, 2, 2), (3, 1, 2), (2, 1, 3)])
def test_levels_match_brute_force(q, n, m):
    sp = make_space(q, n, m)
    rng = np.random.default_rng(q + 7 * n + 11 * m)
    for _ in range(3):
        f = rng.normal(size=sp.N)
        for d in range(n + m + 1):
            assert G.restriction_level(sp, f, d) == pytest.approx(brute_restriction_level(sp, f, d))
            assert G.influence_level(sp, f, d) == pytest.approx(brute_influence_level(sp, f, d))


def test_sharpness_certificate_exact(s22):
    f = np.real(Fr.sharpness_function(s22, 1)) / 3
    cert = G.certify_restriction_global(s22, f, 1)
    assert cert.worst_value == pytest.approx(brute_restriction_level(s22, f, 1))
    t = cert.worst_triple
    pts = Fr.restriction_points(s22, t.V1, t.W1, t.T)
    assert np.mean(f[pts] ** 2) == pytest.approx(cert.worst_value)


def test_batched_level_agrees_with_loop(s22):
    fs = np.random.default_rng(0).normal(size=(16, 5))
    lev = G.restriction_level(s22, fs, 1)
    assert np.allclose(lev, [G.restriction_level(s22, fs[:, k], 1) for k in range(5)])


def test_influences_of_constants_and_characters(s22):
    assert G.influence_level(s22, np.ones(16), 2, min_order=1) == pytest.approx(0.0)
    for x in range(16):
        for V1, W1 in s22.pairs(2):
            vals = G.influence_norms(s22, Fr.character(s22, x), V1, W1)
            assert np.all(np.isclose(vals, 0) | np.isclose(vals, 1))


def test_certificate_rejects_batches(s22):
    with pytest.raises(ContractError):
        G.certify_restriction_global(s22, np.ones((16, 2)), 1)


def test_transfer_constant_and_dictator(s22):
    for r in G.check_globalness_transfer(s22, np.zeros(16), 1):
        assert r.lhs == 0 and r.passed
    reps = G.check_globalness_transfer(s22, Fr.dictator(s22, [1, 1], [0, 0]), 1)
    top = reps[0]
    assert top.passed and top.extra["observed_constant"] <= 2**10
    assert reps[1].extra["top_part_identity_err"] < 1e-10


def test_transfer_random_boolean(s22):
    rng = np.random.default_rng(11)
    for _ in range(200):
        f = (rng.random(16) < 0.5).astype(float)
        for d in (1, 2):
            for r in G.check_globalness_transfer(s22, f, d):
                assert r.passed, r.as_dict()
            assert r.extra.get("top_part_identity_err", 0) < 1e-10


def test_hypercontractivity_examples(s22):
    for x in np.nonzero(s22.dual.ranks == 1)[0][:4]:
        rep = G.check_bilinear_hypercontractivity(s22, Fr.character(s22, x), 1)
        assert rep.lhs == pytest.approx(1.0)
        assert rep.extra["influence_sum"] >= 1 - 1e-12
        assert rep.passed
    const = np.full(16, 2.0)
    rep = G.check_bilinear_hypercontractivity(s22, const, 0)
    assert rep.lhs == pytest.approx(16.0)
    assert rep.extra["influence_sum"] >= 16.0 - 1e-9
    with pytest.raises(ContractError):
        G.check_bilinear_hypercontractivity(s22, Fr.character(s22, s22.dual.encode(linalg.identity(2))), 1)


def test_sharpness_exponent_at_least_one():
    sp = make_space(2, 3, 3)
    best = max(
        G.check_bilinear_hypercontractivity(sp, Fr.sharpness_function(sp, d), d, extras=False).extra["observed_exponent"]
        for d in (1, 2, 3)
    )
    assert 1 <= best < np.inf


def test_lemma_bounds_and_poset_sum(s22):
    rng = np.random.default_rng(5)
    for _ in range(5):
        f = Fr.degree_truncate(s22, rng.normal(size=16), 1)
        rep = G.check_bilinear_hypercontractivity(s22, f, 1)
        assert rep.extra["pair_laplacian_bound_as_proved"]
        assert rep.extra["poset_derivative_bound"]


def test_global_bonami_examples(s22):
    reps = G.check_restriction_global_bonami(s22, np.ones(16), 1, epsilon=1.0)
    assert reps[0].lhs == pytest.approx(1.0) and reps[0].passed
    rng = np.random.default_rng(2)
    f = np.zeros(16)
    f[rng.choice(16, 8, replace=False)] = 1
    for r in G.check_restriction_global_bonami(s22, f, 1):
        assert r.passed
    for d in (1, 2):
        sh = np.real(Fr.sharpness_function(s22, d))
        for r in G.check_restriction_global_bonami(s22, sh, d):
            assert r.passed


def test_level_d_examples(s22):
    rep = G.check_level_d(s22, np.zeros(16), 1)
    assert rep.lhs == 0 and rep.passed
    thr = (s22.dom.ranks <= 1).astype(float)
    rep = G.check_level_d(s22, thr, 1)
    assert rep.lhs == pytest.approx(Fr.rank_mass(s22, thr)[1])
    assert rep.passed
    dic = Fr.dictator(s22, [0, 1], [1, 1])
    rep = G.check_level_d(s22, dic, 1)
    assert rep.extra["epsilon"] == pytest.approx(1.0)
    assert rep.extra["mass_profile"][1] == pytest.approx(3 / 16)
    with pytest.raises(ContractError):
        G.check_level_d(s22, np.full(16, 0.5), 1)


def test_battery_matches_single_function_checks(s22):
    fs = (np.random.default_rng(6).random((16, 6)) < 0.5).astype(float)
    for d in (1, 2):
        battery = G.inequality_battery(s22, fs, d)
        assert [b.name for b in battery] == ["hypercontractivity", "small_influence_bonami", "global_bonami", "level_d"]
        for k in range(6):
            f = fs[:, k]
            hyp = G.check_bilinear_hypercontractivity(s22, Fr.degree_truncate(s22, f, d), d, extras=False)
            glob, small = G.check_restriction_global_bonami(s22, f, d)
            for b, ref in zip(battery, [hyp, small, glob, G.check_level_d(s22, f, d)]):
                assert b.lhs[k] == pytest.approx(ref.lhs)
                assert b.log_rhs[k] == pytest.approx(ref.log_rhs)
                assert b.passed[k] == ref.passed
    with pytest.raises(ContractError):
        G.inequality_battery(s22, fs[:, 0], 1)
