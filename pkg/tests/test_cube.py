import itertools

import numpy as np
import pytest

from bilinear import cube as C
from bilinear.errors import ContractError, DomainError


def naive_fft(cube, f):
    pts = C.points(cube)
    out = np.zeros(cube.N, dtype=complex)
    for g in range(cube.N):
        out[g] = np.mean(f * np.conj(C.character(cube, pts[g])))
    return out


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2), (5, 2)])
def test_fft_matches_inner_products(p, n):
    cube = C.Cube(p, n)
    f = np.random.default_rng(p * n).normal(size=cube.N)
    assert np.allclose(C.cube_fft(cube, f), naive_fft(cube, f), atol=1e-12)
    assert np.allclose(C.cube_ifft(cube, C.cube_fft(cube, f)), f, atol=1e-12)


def test_fft_examples():
    cube = C.Cube(2, 2)
    assert np.allclose(C.cube_fft(cube, np.ones(4)), [1, 0, 0, 0])
    assert np.allclose(C.cube_fft(cube, C.character(cube, (1, 1))), [0, 0, 0, 1])
    delta = np.array([1.0, 0, 0, 0])
    assert np.allclose(C.cube_fft(cube, delta), 0.25)


def test_restrict_examples():
    cube = C.Cube(2, 2)
    pts = C.points(cube)
    f = (pts[:, 0] == pts[:, 1]).astype(float)
    sub, g = C.restrict(cube, f, [0], [0])
    assert np.allclose(g, [1, 0])
    assert np.allclose(C.restrict(cube, f, [], [])[1], f)
    for x in itertools.product(range(2), repeat=2):
        sub, g = C.restrict(cube, f, [0, 1], x)
        assert sub.N == 1 and g[0] == f[x[0] + 2 * x[1]]
    with pytest.raises(ContractError):
        C.restrict(cube, f, [0], [0, 1])


def test_efron_stein_examples():
    cube = C.Cube(2, 2)
    f = np.full(4, 3.0)
    assert np.allclose(C.efron_stein(cube, f, []), f)
    assert np.allclose(C.efron_stein(cube, f, [0]), 0)
    xor = C.character(cube, (1, 1)).real
    assert np.allclose(C.efron_stein(cube, xor, [0, 1]), xor)


def test_efron_stein_sums_to_f_and_is_orthogonal():
    cube = C.Cube(3, 3)
    f = np.random.default_rng(0).normal(size=cube.N)
    parts = [C.efron_stein(cube, f, S) for r in range(4) for S in itertools.combinations(range(3), r)]
    assert np.allclose(sum(parts), f)
    for a, b in itertools.combinations(parts, 2):
        assert abs(np.vdot(a, b)) < 1e-10


def test_laplacian_examples_and_averaging_route():
    cube = C.Cube(2, 2)
    chi = C.character(cube, (1, 0))
    assert np.allclose(C.laplacian(cube, chi, [0]), chi)
    assert np.allclose(C.laplacian(cube, chi, [1]), 0)
    f = np.random.default_rng(2).normal(size=4)
    assert np.allclose(C.laplacian(cube, f, []), f)
    assert np.allclose(C.expectation_op(cube, f, [0, 1]), f.mean())
    big = C.Cube(3, 3)
    g = np.random.default_rng(3).normal(size=big.N)
    for r in range(4):
        for T in itertools.combinations(range(3), r):
            assert np.allclose(C.laplacian(big, g, T), C.laplacian_by_averaging(big, g, T), atol=1e-12)


def test_influences():
    cube = C.Cube(2, 1)
    f = np.array([1.0, -1.0])
    assert C.influence(cube, f, [0]) == pytest.approx(1.0)
    const = C.Cube(3, 2)
    assert C.influence(const, np.ones(9), [1]) == pytest.approx(0.0)
    rng = np.random.default_rng(4)
    big = C.Cube(2, 4)
    for _ in range(20):
        f = rng.normal(size=big.N)
        for d in range(4):
            g = C.low_degree(big, f, d)
            for S in [(0,), (1, 2), (0, 1, 3)]:
                assert (C.influences_all_x(big, g, S) <= C.influences_all_x(big, f, S) + 1e-12).all()


def test_noise_operator():
    cube = C.Cube(2, 1)
    f = np.random.default_rng(0).normal(size=2)
    assert np.allclose(C.noise_operator(cube, f, 1.0), f)
    assert np.allclose(C.noise_operator(cube, f, 0.0), f.mean())
    chi = C.character(cube, (1,))
    assert np.allclose(C.noise_operator(cube, chi, 0.3), 0.3 * chi)
    big = C.Cube(3, 3)
    g = np.random.default_rng(1).normal(size=big.N)
    assert np.allclose(C.noise_operator(big, g, 0.4), C.noise_by_channel(big, g, 0.4), atol=1e-12)
    with pytest.raises(DomainError):
        C.noise_operator(cube, f, 1.5)


def test_hypercontractivity_examples():
    cube = C.Cube(2, 3)
    chi = C.character(cube, (1, 1, 0))
    assert C.check_cube_hypercontractivity(cube, chi, 2).passed
    const = np.full(cube.N, 2.0)
    rep = C.check_cube_hypercontractivity(cube, const, 0)
    assert rep.passed
    # every derivative term vanishes, leaving 2 * 9^0 * ||f||_2^4
    assert rep.extra["degree_reduction_rhs"] == pytest.approx(2 * np.mean(const**2) ** 2)
    rng = np.random.default_rng(7)
    for _ in range(100):
        f = C.random_low_degree(cube, 2, rng)
        assert C.check_cube_hypercontractivity(cube, f, 2).passed


def test_stay_probability_examples():
    cube = C.Cube(2, 2)
    assert C.stay_probability(cube, np.ones(4), 0.5) == pytest.approx(1.0)
    single = np.array([1.0, 0, 0, 0])
    # T_rho 1_A at the point itself: each coordinate stays with prob (1+rho)/2
    assert C.stay_probability(cube, single, 0.5) == pytest.approx(0.75**2)
    everything = C.check_cube_sse(cube, np.ones(4), 0.5, 1, epsilon=0.5)
    assert not everything.extra["hypothesis"]
    dict_set = (C.points(cube)[:, 0] == 0).astype(float)
    level_val, _ = C.restriction_level(cube, dict_set, 1)
    assert level_val == pytest.approx(1.0)
    with pytest.raises(DomainError):
        C.stay_probability(cube, np.zeros(4), 0.5)
