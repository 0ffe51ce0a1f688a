"""The shortcode graph: Cayley graph on L(V,W) generated by the rank-1 maps.

The adjacency operator is diagonal in the characters.  Its eigenvalue on a
rank-d character is

    lambda_d = (P_d - q^{-m}) / (1 - q^{-m}),   P_d = (q^{n-d} - 1) / (q^n - 1),

where P_d is the chance that a uniform hyperplane of V contains a fixed
d-dimensional subspace.  The commonly quoted form replaces P_d by q^{-d},
which is only the large-n limit; ``closed_form_eigenvalue`` keeps that
variant so the two can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .fourier import inverse_transform, rank_mass, transform
from .globalness import restriction_level
from .spaces import BilinearSpace


def hyperplane_containment(q: int, n: int, d: int) -> float:
    """Pr[a uniform hyperplane of F_q^n contains a fixed d-dim subspace]."""
    return (q ** (n - d) - 1) / (q**n - 1)


def eigenvalue(q: int, n: int, m: int, d: int) -> float:
    """Exact eigenvalue of the rank-1 averaging operator on rank-d characters."""
    w = float(q) ** (-m)
    return (hyperplane_containment(q, n, d) - w) / (1 - w)


def closed_form_eigenvalue(q: int, n: int, m: int, d: int) -> float:
    """(q^{-d} - 1/|W|) / (1 - 1/|W|): the large-n approximation."""
    w = float(q) ** (-m)
    return (float(q) ** (-d) - w) / (1 - w)


@dataclass
class ShortcodeGraph:
    space: BilinearSpace
    rank1_count: int = field(init=False)
    eigenvalues: np.ndarray = field(init=False)
    closed_form: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        q, n, m = self.space.q, self.space.n, self.space.m
        if n < 1 or m < 1:
            raise DomainError("the shortcode graph needs dim V, dim W >= 1")
        self.rank1_count = (q**n - 1) * (q**m - 1) // (q - 1)
        top = min(n, m)
        self.eigenvalues = np.array([eigenvalue(q, n, m, d) for d in range(top + 1)])
        self.closed_form = np.array([closed_form_eigenvalue(q, n, m, d) for d in range(top + 1)])

    @property
    def rank1_indices(self) -> np.ndarray:
        return _rank1(self.space)

    def multiplicities(self) -> np.ndarray:
        ranks = self.space.dual.ranks
        return np.bincount(ranks, minlength=len(self.eigenvalues))


@lru_cache(maxsize=None)
def _rank1(space: BilinearSpace) -> np.ndarray:
    return np.nonzero(space.dom.ranks == 1)[0]


def shortcode_graph(space: BilinearSpace) -> ShortcodeGraph:
    return ShortcodeGraph(space)


def adjacency_apply(space: BilinearSpace, values: np.ndarray, method: str = "spectral") -> np.ndarray:
    """Tf(A) = E over rank-1 B of f(A + B)."""
    values = np.asarray(values)
    if method == "direct":
        r1 = _rank1(space)
        idx = space.dom.add_indices(np.arange(space.N)[:, None], r1[None, :])
        return values[idx].mean(axis=1)
    g = shortcode_graph(space)
    mult = g.eigenvalues[space.dual.ranks]
    coeffs = transform(space, values)
    return inverse_transform(space, coeffs * mult.reshape((-1,) + (1,) * (coeffs.ndim - 1)))


def rayleigh_eigenvalue(space: BilinearSpace, X_index: int) -> float:
    """<T u_X, u_X> by direct averaging."""
    from .fourier import character

    u = character(space, X_index)
    Tu = adjacency_apply(space, u, method="direct")
    return float(np.real(np.mean(Tu * np.conj(u))))


def _check_set(indicator: np.ndarray) -> np.ndarray:
    s = np.asarray(indicator)
    if not np.all((s == 0) | (s == 1)):
        raise DomainError("a vertex set must be a 0/1 indicator")
    if not s.any():
        raise DomainError("the vertex set is empty")
    return s.astype(float)


def expansion_probability(space: BilinearSpace, indicator: np.ndarray) -> float:
    """Pr over A in S and rank-1 B that A + B stays in S, by counting."""
    s = _check_set(indicator)
    r1 = _rank1(space)
    members = np.nonzero(s)[0]
    idx = space.dom.add_indices(members[:, None], r1[None, :])
    return float(s[idx].mean())


def spectral_stay_probability(space: BilinearSpace, indicator: np.ndarray) -> tuple[float, np.ndarray]:
    """sum_d lambda_d ||1_S^{=d}||^2 / ||1_S||^2 and the mass profile."""
    s = _check_set(indicator)
    mass = rank_mass(space, s)
    lam = shortcode_graph(space).eigenvalues
    return float(np.dot(lam, mass) / s.mean()), mass


@dataclass
class SSEReport:
    set_id: str
    r: int
    C0: float
    globalness_order: int
    globalness_level: float
    hypothesis: bool
    stay_probability: float
    bound: float
    spectral_identity_err: float
    tail: float
    tail_ok: bool
    mass_profile: list

    @property
    def conclusion(self) -> bool:
        return self.stay_probability < self.bound

    @property
    def passed(self) -> bool:
        return (not self.hypothesis or self.conclusion) and self.tail_ok and self.spectral_identity_err < 1e-10

    def as_dict(self) -> dict:
        return {
            "set_id": self.set_id, "r": self.r, "C0": self.C0, "globalness_order": self.globalness_order,
            "globalness_level": self.globalness_level, "hypothesis": self.hypothesis,
            "stay_prob": self.stay_probability, "bound": self.bound, "conclusion": self.conclusion,
            "spectral_identity_err": self.spectral_identity_err, "tail": self.tail, "tail_ok": self.tail_ok,
            "mass_profile": self.mass_profile, "pass": self.passed,
        }


def check_sse_theorem(space: BilinearSpace, indicator, r: int, C0: float = 1.0, set_id: str = "set") -> SSEReport:
    """Globalness hypothesis at order r+1 against the stay probability bound q^{-r}."""
    if r < 1:
        raise DomainError("r must be at least 1")
    s = _check_set(indicator)
    q = space.q
    order = r + 1
    level = float(restriction_level(space, s, order))
    threshold = float(q) ** (-C0 * r * r)
    prob = expansion_probability(space, s)
    spec_prob, mass = spectral_stay_probability(space, s)
    density = float(s.mean())
    # <T 1_S, 1_S> two ways
    err = abs(prob * density - spec_prob * density)
    lam = shortcode_graph(space).eigenvalues
    tail = float(np.dot(lam[r + 2:], mass[r + 2:])) if r + 2 < len(lam) else 0.0
    tail_ok = tail < float(q) ** (-r) / 2 * density
    return SSEReport(set_id, r, C0, order, level, level <= threshold * (1 + 1e-12), prob, float(q) ** (-r), err,
                     tail, tail_ok, [float(x) for x in mass])


# ------------------------------------------------------------ builtin sets


def rank_threshold_set(space: BilinearSpace, k: int) -> np.ndarray:
    """{A : rank A <= k}."""
    return (space.dom.ranks <= k).astype(float)


def random_set(space: BilinearSpace, density: float, seed: int) -> np.ndarray:
    """Exactly round(density * N) (at least one) uniformly chosen maps."""
    rng = np.random.default_rng(seed)
    size = max(1, int(round(density * space.N)))
    out = np.zeros(space.N)
    out[rng.choice(space.N, size=size, replace=False)] = 1.0
    return out


def dictator_slab(space: BilinearSpace, v, w) -> np.ndarray:
    """{A : A v = w}."""
    from .fourier import dictator

    return np.real(dictator(space, v, w)).round().astype(float)


@dataclass
class ScanRow:
    q: int
    n: int
    m: int
    set_id: str
    level: float
    stay_probability: float
    is_global: bool
    flagged: bool


def inverse_shortcode_scan(eta: float, C: int, delta: float, dims=((2, 2), (2, 3), (3, 3)), seeds=range(5),
                           densities=(1 / 16, 1 / 8, 1 / 4), q: int = 2) -> list[ScanRow]:
    """Look for (C, delta)-global sets with stay probability >= eta over a fixture family.

    Structured sets (rank thresholds, dictator slabs) and seeded random sets.
    A flagged row would contradict the inverse shortcode statement for these
    parameters; none is expected.
    """
    if q != 2:
        raise DomainError("the inverse shortcode scan is stated over GF(2)")
    from .field import get_field
    from .spaces import bilinear_space

    F = get_field(q)
    rows = []
    for n, m in dims:
        space = bilinear_space(F, n, m)
        fixtures = []
        for k in range(min(n, m)):
            fixtures.append((f"rank-threshold:{k}", rank_threshold_set(space, k)))
        v = np.zeros(n, dtype=np.int64)
        v[0] = 1
        fixtures.append(("dictator-slab", dictator_slab(space, v, np.zeros(m, dtype=np.int64))))
        for dens in densities:
            for seed in seeds:
                fixtures.append((f"random:{dens:g},{seed}", random_set(space, dens, seed)))
        for name, s in fixtures:
            level = float(restriction_level(space, s, C))
            prob = expansion_probability(space, s)
            glob = level <= delta
            rows.append(ScanRow(q, n, m, name, level, prob, glob, glob and prob >= eta))
    return rows


def log_q(x: float, q: int) -> float:
    return math.log(x, q) if x > 0 else -math.inf
