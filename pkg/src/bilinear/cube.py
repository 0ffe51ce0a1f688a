"""Harmonic analysis on F_p^n (p prime) and the product-space inequalities.

A function is a complex vector of length p^n; point x has index
sum_i x_i p^i, so coordinate 0 is the least significant digit.
Coordinates are numbered from 0 and a coordinate set is any iterable of them.

fhat(gamma) = E_x f(x) conj(chi_gamma(x)) with chi_gamma(x) = omega^{<gamma,x>}.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ContractError, DomainError

DEGREE_CUTOFF = 1e-9


@dataclass(frozen=True)
class Cube:
    p: int
    n: int

    def __post_init__(self) -> None:
        if self.p < 2 or any(self.p % k == 0 for k in range(2, int(self.p**0.5) + 1)):
            raise DomainError(f"p={self.p} is not prime")
        if self.n < 0:
            raise DomainError("n must be nonnegative")

    @property
    def N(self) -> int:
        return self.p**self.n

    @property
    def omega(self) -> complex:
        return np.exp(2j * np.pi / self.p)


@lru_cache(maxsize=None)
def _points(p: int, n: int) -> np.ndarray:
    idx = np.arange(p**n)
    return (idx[:, None] // p ** np.arange(n)[None, :]) % p


def points(cube: Cube) -> np.ndarray:
    """(N, n) array of coordinates of every point."""
    return _points(cube.p, cube.n)


@lru_cache(maxsize=None)
def _support_bits(p: int, n: int) -> np.ndarray:
    pts = _points(p, n)
    return ((pts != 0) * (1 << np.arange(n))[None, :]).sum(axis=1)


def support_bits(cube: Cube) -> np.ndarray:
    """Bitmask of supp(gamma) for every gamma."""
    return _support_bits(cube.p, cube.n)


def _bits(S) -> int:
    return sum(1 << i for i in set(S))


def _kernel(p: int) -> np.ndarray:
    a = np.arange(p)
    return np.exp(2j * np.pi * np.outer(a, a) / p)


def _stages(values: np.ndarray, mat: np.ndarray, p: int, n: int) -> np.ndarray:
    batch = values.shape[1:]
    t = values.reshape((p,) * n + batch)
    for axis in range(n):
        t = np.moveaxis(np.tensordot(mat, t, axes=([1], [axis])), 0, axis)
    return t.reshape((p**n,) + batch)


def cube_fft(cube: Cube, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if cube.n == 0:
        return values.copy()
    return _stages(values, np.conj(_kernel(cube.p)), cube.p, cube.n) / cube.N


def cube_ifft(cube: Cube, coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    if cube.n == 0:
        return coeffs.copy()
    return _stages(coeffs, _kernel(cube.p), cube.p, cube.n)


def character(cube: Cube, gamma) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=np.int64)
    return cube.omega ** ((points(cube) @ gamma) % cube.p)


def _spectral(cube: Cube, values: np.ndarray, mult: np.ndarray) -> np.ndarray:
    coeffs = cube_fft(cube, values)
    shape = (-1,) + (1,) * (coeffs.ndim - 1)
    return cube_ifft(cube, coeffs * mult.reshape(shape))


def efron_stein(cube: Cube, values: np.ndarray, S) -> np.ndarray:
    """f^{=S}."""
    return _spectral(cube, values, support_bits(cube) == _bits(S))


def level(cube: Cube, values: np.ndarray, d: int) -> np.ndarray:
    """f^{=d}: the part on characters with |supp| = d."""
    sizes = _popcount(support_bits(cube))
    return _spectral(cube, values, sizes == d)


def low_degree(cube: Cube, values: np.ndarray, d: int) -> np.ndarray:
    """f^{<=d}."""
    sizes = _popcount(support_bits(cube))
    return _spectral(cube, values, sizes <= d)


def _popcount(bits: np.ndarray) -> np.ndarray:
    out = np.zeros_like(bits)
    b = bits.copy()
    while b.any():
        out += b & 1
        b >>= 1
    return out


def degree(cube: Cube, values: np.ndarray, cutoff: float = DEGREE_CUTOFF) -> int:
    coeffs = cube_fft(cube, values)
    big = np.abs(coeffs) > cutoff
    if not big.any():
        return -1
    return int(_popcount(support_bits(cube))[big].max())


def restrict(cube: Cube, values: np.ndarray, S, x) -> tuple[Cube, np.ndarray]:
    """f_{S -> x}: fix coordinates in S (sorted) to x; a function of the rest."""
    S = sorted(set(S))
    x = list(x)
    if len(x) != len(S):
        raise ContractError("assignment length must match |S|")
    rest = [i for i in range(cube.n) if i not in S]
    sub = Cube(cube.p, len(rest))
    pts = points(sub)
    idx = np.zeros(sub.N, dtype=np.int64)
    for k, i in enumerate(rest):
        idx += pts[:, k] * cube.p**i
    idx += sum(int(xi) * cube.p**i for xi, i in zip(x, S))
    return sub, np.asarray(values)[idx]


def expectation_op(cube: Cube, values: np.ndarray, S) -> np.ndarray:
    """E_S f: average over the coordinates in S."""
    values = np.asarray(values)
    batch = values.shape[1:]
    t = values.reshape((cube.p,) * cube.n + batch)
    for i in set(S):
        axis = cube.n - 1 - i
        t = np.broadcast_to(t.mean(axis=axis, keepdims=True), t.shape)
    return np.array(t).reshape(values.shape)


def laplacian(cube: Cube, values: np.ndarray, T) -> np.ndarray:
    """L_T f = sum over S containing T of f^{=S}."""
    tb = _bits(T)
    return _spectral(cube, values, (support_bits(cube) & tb) == tb)


def laplacian_by_averaging(cube: Cube, values: np.ndarray, T) -> np.ndarray:
    """L_T f = sum over S inside T of (-1)^{|S|} E_S f."""
    T = sorted(set(T))
    out = np.zeros(np.shape(values), dtype=complex)
    for r in range(len(T) + 1):
        for S in itertools.combinations(T, r):
            out += (-1) ** r * expectation_op(cube, values, S)
    return out


def derivative(cube: Cube, values: np.ndarray, S, x) -> tuple[Cube, np.ndarray]:
    """D_{S,x} f = (L_S f)_{S -> x}."""
    return restrict(cube, laplacian(cube, values, S), S, x)


def assignments(p: int, k: int):
    return itertools.product(range(p), repeat=k)


def influence_at(cube: Cube, values: np.ndarray, S, x) -> float:
    """I_{S,x}[f]."""
    _, D = derivative(cube, values, S, x)
    return float(np.mean(np.abs(D) ** 2))


def influences_all_x(cube: Cube, values: np.ndarray, S) -> np.ndarray:
    """I_{S,x}[f] for every x in F_p^S (lexicographic in sorted S)."""
    S = sorted(set(S))
    L = laplacian(cube, values, S)
    return np.array([float(np.mean(np.abs(restrict(cube, L, S, x)[1]) ** 2)) for x in assignments(cube.p, len(S))])


def influence(cube: Cube, values: np.ndarray, S) -> float:
    """I_S[f] = E_x I_{S,x}[f]."""
    return float(np.mean(influences_all_x(cube, values, S)))


def noise_operator(cube: Cube, values: np.ndarray, rho: float) -> np.ndarray:
    """T_rho f = sum_S rho^{|S|} f^{=S}."""
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho={rho} outside [0, 1]")
    sizes = _popcount(support_bits(cube))
    return _spectral(cube, values, rho ** sizes.astype(float))


def noise_by_channel(cube: Cube, values: np.ndarray, rho: float) -> np.ndarray:
    """T_rho f(x) = E_{y ~ N_rho(x)} f(y), by exact expectation over the channel."""
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho={rho} outside [0, 1]")
    p = cube.p
    channel = rho * np.eye(p) + (1 - rho) * np.full((p, p), 1.0 / p)
    if cube.n == 0:
        return np.asarray(values, dtype=complex).copy()
    return _stages(np.asarray(values, dtype=complex), channel, p, cube.n)


# ------------------------------------------------------------ inequalities


def _power0(base: float, e: float) -> float:
    """base**e with 0**0 = 1."""
    return 1.0 if e == 0 else base**e


def hypercontractive_rhs(cube: Cube, values: np.ndarray, d: int) -> float:
    """(100d)^d * sum_S E_x[I_{S,x}^2]."""
    total = 0.0
    for r in range(cube.n + 1):
        for S in itertools.combinations(range(cube.n), r):
            total += float(np.mean(influences_all_x(cube, values, S) ** 2))
    return _power0(100.0 * d, d) * total


def degree_reduction_rhs(cube: Cube, values: np.ndarray, d: int) -> float:
    """2 * 9^d ||f||_2^4 + 2 * sum_{S nonempty} (4d)^{|S|} ||L_S f||_4^4."""
    f2 = float(np.mean(np.abs(values) ** 2))
    total = 2.0 * 9.0**d * f2**2
    for r in range(1, cube.n + 1):
        for S in itertools.combinations(range(cube.n), r):
            L = laplacian(cube, values, S)
            total += 2.0 * _power0(4.0 * d, r) * float(np.mean(np.abs(L) ** 4))
    return total


@dataclass
class CubeReport:
    lhs: float
    rhs: float
    ratio: float
    passed: bool
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio, "pass": self.passed}
        out.update(self.extra)
        return out


def _ratio(lhs: float, rhs: float) -> float:
    if rhs == 0:
        return 0.0 if lhs == 0 else math.inf
    return lhs / rhs


def _leq(lhs: float, rhs: float, rel: float = 1e-9) -> bool:
    return lhs <= rhs * (1 + rel) + 1e-12


def check_cube_hypercontractivity(cube: Cube, values: np.ndarray, d: int) -> CubeReport:
    """Conditional hypercontractive bound, degree-reduction bound and (p=2) Bonami."""
    deg = degree(cube, values)
    if deg > d:
        raise ContractError(f"function has degree {deg} > {d}")
    f4 = float(np.mean(np.abs(values) ** 4))
    f2 = float(np.mean(np.abs(values) ** 2))
    rhs = hypercontractive_rhs(cube, values, d)
    red = degree_reduction_rhs(cube, values, d)
    extra = {
        "degree_reduction_rhs": red,
        "degree_reduction_pass": _leq(f4, red),
    }
    ok = _leq(f4, rhs) and extra["degree_reduction_pass"]
    if cube.p == 2 and np.allclose(np.imag(values), 0):
        # Bonami's lemma is a statement about real-valued functions
        bonami = 9.0**d * f2**2
        extra["bonami_rhs"] = bonami
        extra["bonami_pass"] = _leq(f4, bonami)
        ok = ok and extra["bonami_pass"]
    return CubeReport(f4, rhs, _ratio(f4, rhs), ok, extra)


def restriction_level(cube: Cube, values: np.ndarray, d: int) -> tuple[float, tuple]:
    """max ||f_{S->x}||_2^2 over |S| <= d and every x, with the maximiser."""
    best, arg = -1.0, ((), ())
    for r in range(min(d, cube.n) + 1):
        for S in itertools.combinations(range(cube.n), r):
            for x in assignments(cube.p, r):
                _, g = restrict(cube, values, S, x)
                val = float(np.mean(np.abs(g) ** 2))
                if val > best + 1e-15:
                    best, arg = val, (S, x)
    return best, arg


def check_influence_from_restrictions(cube: Cube, values: np.ndarray, d: int) -> tuple[bool, float]:
    """I_{S,x} <= 4^{|S|} * max_{T<=S} ||f_{T->x_T}||^2 for all |S| <= d; returns (ok, worst ratio)."""
    worst = 0.0
    ok = True
    for r in range(min(d, cube.n) + 1):
        for S in itertools.combinations(range(cube.n), r):
            infl = influences_all_x(cube, values, S)
            for k, x in enumerate(assignments(cube.p, r)):
                eps = _sub_restriction_max(cube, values, S, x)
                bound = 4.0**r * eps
                worst = max(worst, _ratio(infl[k], bound))
                ok = ok and _leq(infl[k], bound)
    return ok, worst


def check_restriction_from_influences(cube: Cube, values: np.ndarray, d: int) -> tuple[bool, float]:
    """||f_{S->x}||^2 <= 4^{|S|} * max_{T<=S} I_{T,x_T} for all |S| <= d."""
    worst = 0.0
    ok = True
    for r in range(min(d, cube.n) + 1):
        for S in itertools.combinations(range(cube.n), r):
            for x in assignments(cube.p, r):
                _, g = restrict(cube, values, S, x)
                lhs = float(np.mean(np.abs(g) ** 2))
                eps = 0.0
                for t in range(r + 1):
                    for sub in itertools.combinations(range(r), t):
                        T = [S[i] for i in sub]
                        xt = [x[i] for i in sub]
                        eps = max(eps, influence_at(cube, values, T, xt))
                bound = 4.0**r * eps
                worst = max(worst, _ratio(lhs, bound))
                ok = ok and _leq(lhs, bound)
    return ok, worst


def _sub_restriction_max(cube: Cube, values: np.ndarray, S, x) -> float:
    r = len(S)
    best = 0.0
    for t in range(r + 1):
        for sub in itertools.combinations(range(r), t):
            T = [S[i] for i in sub]
            xt = [x[i] for i in sub]
            _, g = restrict(cube, values, T, xt)
            best = max(best, float(np.mean(np.abs(g) ** 2)))
    return best


def check_global_bonami(cube: Cube, values: np.ndarray, d: int, epsilon: float | None = None) -> CubeReport:
    """||f^{<=d}||_4^4 <= (800d)^d eps ||f^{<=d}||_2^2 with eps the exact level unless given."""
    eps = restriction_level(cube, values, d)[0] if epsilon is None else epsilon
    g = low_degree(cube, values, d)
    lhs = float(np.mean(np.abs(g) ** 4))
    rhs = _power0(800.0 * d, d) * eps * float(np.mean(np.abs(g) ** 2))
    return CubeReport(lhs, rhs, _ratio(lhs, rhs), _leq(lhs, rhs), {"epsilon": eps})


def stay_probability(cube: Cube, indicator: np.ndarray, rho: float) -> float:
    """Pr_{x in A, y ~ N_rho(x)}[y in A] = <T_rho 1_A, 1_A> / ||1_A||^2."""
    f = np.asarray(indicator, dtype=float)
    mass = float(np.mean(f**2))
    if mass == 0:
        raise DomainError("empty set")
    return float(np.real(np.mean(noise_operator(cube, f, rho) * f))) / mass


def check_cube_sse(cube: Cube, indicator: np.ndarray, rho: float, d: int, epsilon: float | None = None) -> CubeReport:
    """Small-set expansion bound rho^{d+1} + eps^{1/4} (800d)^{d/4} for a certified-global set."""
    f = np.asarray(indicator, dtype=float)
    if not np.isin(f, (0.0, 1.0)).all():
        raise ContractError("indicator must be 0/1 valued")
    if not f.any():
        raise DomainError("empty set")
    level_val, worst = restriction_level(cube, f, d)
    eps = level_val if epsilon is None else epsilon
    hypothesis = level_val <= eps * (1 + 1e-12)
    prob = stay_probability(cube, f, rho)
    bound = rho ** (d + 1) + eps**0.25 * _power0(800.0 * d, d / 4)
    g = low_degree(cube, f, d)
    f2 = float(np.mean(f**2))
    low_mass = float(np.mean(np.abs(g) ** 2))
    holder_bound = eps**0.25 * _power0(800.0 * d, d / 4) * f2
    infl_ok, infl_worst = check_influence_from_restrictions(cube, f, d)
    ok = (not hypothesis) or (_leq(prob, bound) and _leq(low_mass, holder_bound))
    ok = ok and infl_ok
    extra = {
        "global_level": level_val,
        "worst_restriction": [list(worst[0]), list(worst[1])],
        "epsilon": eps,
        "hypothesis": hypothesis,
        "low_degree_mass": low_mass,
        "low_degree_bound": holder_bound,
        "influence_bound_ratio": infl_worst,
    }
    return CubeReport(prob, bound, _ratio(prob, bound), ok, extra)


def random_low_degree(cube: Cube, d: int, rng: np.random.Generator, real: bool = False) -> np.ndarray:
    """Random function whose spectrum lives on |supp(gamma)| <= d."""
    sizes = _popcount(support_bits(cube))
    coeffs = rng.standard_normal(cube.N) + (0 if real else 1j * rng.standard_normal(cube.N))
    coeffs = coeffs * (sizes <= d)
    vals = cube_ifft(cube, coeffs)
    if real:
        # real part keeps the support closed under gamma -> -gamma
        vals = np.real(vals).astype(complex)
    return vals
