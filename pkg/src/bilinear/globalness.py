"""Globalness certificates and the hypercontractive inequalities on L(V,W).

Every bound here has constants like q^{100 d^2}, which overflow floats long
before desk-scale dimensions run out.  So right-hand sides are carried as
natural logarithms and compared in log space.

Certificates are exact: they enumerate every (V1, W1) of the requested order
and one T per coset of the slice subgroup (slices only depend on the coset).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .fourier import (
    RestrictionTriple,
    degree_truncate,
    fourier_degree,
    inverse_transform,
    pure_part,
    rank_mass,
    restrict,
    transform,
)
from .laplacians import (
    laplacian_V,
    laplacian_W,
    mask_hybrid,
    one_step_pair,
    order_one_derivative,
    tee_operator,
)
from .spaces import BilinearSpace

TIE_TOL = 1e-12


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def _leq(lhs: float, log_rhs: float, rtol: float = 1e-9) -> bool:
    """lhs <= exp(log_rhs), with a relative slack for rounding."""
    if lhs <= 0:
        return True
    if log_rhs == -math.inf:
        return lhs <= 1e-12
    return math.log(lhs) <= log_rhs + rtol


def _ratio(lhs: float, log_rhs: float) -> float:
    if lhs <= 0:
        return 0.0
    if log_rhs == -math.inf:
        return math.inf
    return math.exp(min(math.log(lhs) - log_rhs, 700.0))


# ------------------------------------------------------------ slice norms


def restriction_norms(space: BilinearSpace, values: np.ndarray, V1, W1) -> np.ndarray:
    """||f_{(V1,W1)->T}||^2 for each coset representative T, shape (reps, *batch)."""
    sl = space.slice_indices(V1, W1)
    return np.mean(np.abs(np.asarray(values)[sl]) ** 2, axis=1)


def influence_norms(space: BilinearSpace, values: np.ndarray, V1, W1, coeffs=None) -> np.ndarray:
    """I_{(V1,W1,T)}[f] for each coset representative T, shape (reps, *batch)."""
    if coeffs is None:
        coeffs = transform(space, values)
    mask = mask_hybrid(space, V1, W1).reshape((-1,) + (1,) * (coeffs.ndim - 1))
    lap = inverse_transform(space, coeffs * mask)
    sl = space.slice_indices(V1, W1)
    return np.mean(np.abs(lap[sl]) ** 2, axis=1)


@dataclass
class GlobalnessCertificate:
    d: int
    epsilon: float
    worst_triple: RestrictionTriple | None
    worst_value: float
    kind: str = "restriction"

    @property
    def verdict(self) -> bool:
        return self.worst_value <= self.epsilon * (1 + 1e-12) + 1e-15

    def as_dict(self) -> dict:
        t = self.worst_triple
        triple = None
        if t is not None:
            triple = {"V1": [list(map(int, b)) for b in t.V1.basis], "W1": [list(map(int, b)) for b in t.W1.basis],
                      "T": int(t.T), "order": t.order}
        return {"kind": self.kind, "d": self.d, "epsilon": self.epsilon, "worst_value": self.worst_value,
                "worst_triple": triple, "pass": self.verdict}


def _certify(space: BilinearSpace, values: np.ndarray, d: int, epsilon, kind: str, min_order: int = 0):
    values = np.asarray(values)
    if values.shape != (space.N,):
        raise ContractError("certificates take a single function")
    if d < 0 or d > space.n + space.m:
        raise ContractError("d must lie in [0, dim V + dim W]")
    coeffs = transform(space, values) if kind == "influence" else None
    candidates = []
    for V1, W1 in space.pairs(d, min_order):
        if kind == "influence":
            norms = influence_norms(space, values, V1, W1, coeffs)
        else:
            norms = restriction_norms(space, values, V1, W1)
        reps = space.coset_representatives(V1, W1)
        top = float(norms.max())
        T = int(reps[norms >= top - TIE_TOL * max(1.0, top)].min())
        candidates.append((top, (space.V.index[V1], space.W.index[W1], T), RestrictionTriple(V1, W1, T)))
    best_val = max(c[0] for c in candidates)
    # lexicographically smallest triple among the (numerically) tied maxima
    tied = [c for c in candidates if c[0] >= best_val - TIE_TOL * max(1.0, best_val)]
    best = min(tied, key=lambda c: c[1])[2]
    eps = best_val if epsilon is None else float(epsilon)
    return GlobalnessCertificate(d, eps, best, max(best_val, 0.0), kind)


def certify_restriction_global(space: BilinearSpace, values, d: int, epsilon=None) -> GlobalnessCertificate:
    """Exact max of ||f_{(V1,W1)->T}||^2 over dim V1 + codim W1 <= d."""
    return _certify(space, values, d, epsilon, "restriction")


def certify_influences(space: BilinearSpace, values, d: int, epsilon=None, min_order: int = 0) -> GlobalnessCertificate:
    """Exact max of I_{(V1,W1,T)}[f] over dim V1 + codim W1 <= d."""
    return _certify(space, values, d, epsilon, "influence", min_order)


def restriction_level(space: BilinearSpace, values: np.ndarray, d: int) -> np.ndarray:
    """Exact restriction-globalness level at order d, vectorised over batch axes."""
    values = np.asarray(values)
    out = np.zeros(values.shape[1:])
    for V1, W1 in space.pairs(d):
        out = np.maximum(out, restriction_norms(space, values, V1, W1).max(axis=0))
    return out


def influence_level(space: BilinearSpace, values: np.ndarray, d: int, min_order: int = 0) -> np.ndarray:
    values = np.asarray(values)
    coeffs = transform(space, values)
    out = np.zeros(values.shape[1:])
    for V1, W1 in space.pairs(d, min_order):
        out = np.maximum(out, influence_norms(space, values, V1, W1, coeffs).max(axis=0))
    return out


# -------------------------------------------------------------- reports


@dataclass
class HypReport:
    name: str
    lhs: float
    log_rhs: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return _leq(self.lhs, self.log_rhs)

    @property
    def ratio(self) -> float:
        return _ratio(self.lhs, self.log_rhs)

    @property
    def rhs(self) -> float:
        return math.exp(self.log_rhs) if self.log_rhs < 700 else math.inf

    def as_dict(self) -> dict:
        out = {"check": self.name, "lhs": self.lhs, "rhs": self.rhs, "log10_rhs": self.log_rhs / math.log(10),
               "ratio": self.ratio, "pass": self.passed}
        out.update(self.extra)
        return out


def _qpow_log(q: int, e: float) -> float:
    return e * math.log(q)


# ---------------------------------------------------------- transfer


def check_globalness_transfer(space: BilinearSpace, values, d: int) -> list[HypReport]:
    """Restriction-globalness at order d against influences of f^{=d} and f^{<=d}.

    Reports three inequalities with eps the exact level of f at order d:
      I[f^{=d}] <= q^{10 d^2} eps over all triples of order <= d;
      each one-step function (T_{d,U} f)_{U->T} is (d-1, 4 q^{4d} eps)-global;
      I[f^{<=d}] <= q^{12 d^2} eps over all triples of order <= d.
    """
    values = np.asarray(values)
    q = space.q
    eps = float(restriction_level(space, values, d))
    reports = []

    top = pure_part(space, values, d)
    inf_top = float(influence_level(space, top, d))
    observed = inf_top / eps if eps > 0 else (0.0 if inf_top < 1e-15 else math.inf)
    reports.append(HypReport("influence_of_top_part", inf_top, _log(eps) + _qpow_log(q, 10 * d * d),
                             {"epsilon": eps, "d": d, "observed_constant": observed}))

    if d >= 1:
        worst = 0.0
        worst_err = 0.0
        for side, lat, dim in (("V", space.V, 1), ("W", space.W, space.m - 1)):
            if (side == "V" and space.n < 2) or (side == "W" and space.m < 2):
                continue
            for U in lat.of_dim(dim):
                V1, W1 = one_step_pair(space, side, U)
                loc = space.local(V1, W1)
                tee = tee_operator(space, values, d, side, U)
                for T in space.coset_representatives(V1, W1):
                    fp = restrict(space, tee, V1, W1, int(T))
                    worst = max(worst, float(restriction_level(loc, fp, d - 1)))
                    lhs73 = order_one_derivative(space, top, side, U, int(T))
                    rhs73 = pure_part(loc, fp, d - 1)
                    worst_err = max(worst_err, float(np.max(np.abs(lhs73 - rhs73))))
        reports.append(HypReport("one_step_restriction_global", worst, _log(eps) + math.log(4) + _qpow_log(q, 4 * d),
                                 {"epsilon": eps, "d": d, "top_part_identity_err": worst_err}))

    low = degree_truncate(space, values, d)
    inf_low = float(influence_level(space, low, d))
    reports.append(HypReport("influence_of_low_part", inf_low, _log(eps) + _qpow_log(q, 12 * d * d),
                             {"epsilon": eps, "d": d, "observed_constant": inf_low / eps if eps > 0 else 0.0}))
    return reports


# ------------------------------------------------------ hypercontractivity


def _check_degree(space, values, d):
    deg = fourier_degree(space, values)
    if deg > d:
        raise ContractError(f"function has degree {deg} > {d}")


def influence_square_sums(space: BilinearSpace, values: np.ndarray, max_order=None) -> dict:
    """Sum over (V1, W1) of E_T[I^2], split by order.  Batched."""
    values = np.asarray(values)
    coeffs = transform(space, values)
    top = space.n + space.m if max_order is None else max_order
    out = {}
    for V1, W1 in space.pairs(top):
        I = influence_norms(space, values, V1, W1, coeffs)
        order = V1.dim + W1.codim
        out[order] = out.get(order, 0.0) + np.mean(I**2, axis=0)
    return out


def laplacian_pair_fourth_sum(space: BilinearSpace, values: np.ndarray, d: int, weight_exp: int) -> float:
    """sum over (V1,W1) != (0,W) of q^{weight_exp * d * order} ||L_{V1} L_{W1} f||_4^4."""
    total = 0.0
    for V1, W1 in space.pairs(space.n + space.m, 1):
        g = laplacian_V(space, laplacian_W(space, values, W1), V1)
        order = V1.dim + W1.codim
        total += float(space.q) ** (weight_exp * d * order) * float(np.mean(np.abs(g) ** 4))
    return total


def poset_derivative_sum(space: BilinearSpace, values: np.ndarray, d: int) -> float:
    """sum over X of q^{-4 d rank X} ||L_X f||_2^2, from the poset relation."""
    coeffs = transform(space, values)
    mass = np.abs(coeffs) ** 2
    dual = space.dual
    ranks = dual.ranks
    total = 0.0
    idx = np.arange(space.N)
    for X in range(space.N):
        above = ranks == ranks[X] + ranks[dual.sub_indices(idx, X)]
        total += float(space.q) ** (-4 * d * ranks[X]) * float(mass[above].sum())
    return total


def check_bilinear_hypercontractivity(space: BilinearSpace, values, d: int | None = None, extras: bool = True) -> HypReport:
    """||f||_4^4 <= q^{100 d^2} sum over (V1,W1) of E_T[I_{(V1,W1,T)}[f]^2] for deg f <= d."""
    values = np.asarray(values)
    if d is None:
        d = max(fourier_degree(space, values), 0)
    _check_degree(space, values, d)
    q = space.q
    lhs = float(np.mean(np.abs(values) ** 4))
    sums = influence_square_sums(space, values)
    total = float(sum(sums.values()))
    within = float(sum(v for k, v in sums.items() if k <= d))
    observed = None
    if total > 0 and lhs > 0 and d > 0:
        observed = math.log(lhs / total, q) / (d * d)
    extra = {"d": d, "influence_sum": total, "influence_sum_order_le_d": within,
             "observed_exponent": observed}
    if extras:
        l2 = float(np.mean(np.abs(values) ** 2))
        s7 = laplacian_pair_fourth_sum(space, values, d, 7)
        stated = _leq(lhs / 162, _log(float(q) ** (3 * d * d) * l2**2 + s7))
        proved = _leq(lhs, _log(162 * float(q) ** (6 * d * d) * l2**2 + 2 * s7))
        pos = poset_derivative_sum(space, values, d)
        extra.update({"pair_laplacian_bound_as_stated": stated, "pair_laplacian_bound_as_proved": proved,
                      "poset_derivative_sum": pos, "poset_derivative_bound": pos <= 2 * l2 * (1 + 1e-9) + 1e-12})
    return HypReport("hypercontractivity", lhs, _log(total) + _qpow_log(q, 100 * d * d), extra)


def check_restriction_global_bonami(space: BilinearSpace, values, d: int, epsilon=None) -> list[HypReport]:
    """||f^{<=d}||_4^4 <= q^{115 d^2} eps ||f^{<=d}||_2^2 and the small-influence form.

    eps defaults to the exact restriction-globalness level of f at order d.
    The second report applies the small-influence bound q^{103 d^2} to
    g = f^{<=d} with its exact influence level.
    """
    values = np.asarray(values)
    q = space.q
    eps = float(restriction_level(space, values, d)) if epsilon is None else float(epsilon)
    g = degree_truncate(space, values, d)
    g4 = float(np.mean(np.abs(g) ** 4))
    g2 = float(np.mean(np.abs(g) ** 2))
    r1 = HypReport("global_bonami", g4, _log(eps * g2) + _qpow_log(q, 115 * d * d),
                   {"epsilon": eps, "d": d, "norm2_sq": g2})
    eps_inf = float(influence_level(space, g, d))
    r2 = HypReport("small_influence_bonami", g4, _log(eps_inf * g2) + _qpow_log(q, 103 * d * d),
                   {"epsilon_influence": eps_inf, "d": d, "norm2_sq": g2})
    return [r1, r2]


def check_level_d(space: BilinearSpace, values, d: int, epsilon=None) -> HypReport:
    """||f^{=d}||_2^2 <= q^{30 d^2} eps^{1/4} ||f||_2^2 for Boolean f."""
    values = np.asarray(values)
    if not np.all((values == 0) | (values == 1)):
        raise ContractError("level-d inequality needs a 0/1-valued function")
    q = space.q
    eps = float(restriction_level(space, values, d)) if epsilon is None else float(epsilon)
    mass = rank_mass(space, values)
    lhs = float(mass[d]) if d < len(mass) else 0.0
    f2 = float(np.mean(values.astype(float)))
    log_rhs = 0.25 * _log(eps) + _log(f2) + _qpow_log(q, 30 * d * d)
    return HypReport("level_d", lhs, log_rhs, {"epsilon": eps, "d": d, "mass_profile": [float(x) for x in mass]})


# ---------------------------------------------------------- batched battery


@dataclass
class BatteryReport:
    """One inequality evaluated on a batch of functions."""

    name: str
    lhs: np.ndarray
    log_rhs: np.ndarray

    @property
    def passed(self) -> np.ndarray:
        return np.array([_leq(float(a), float(b)) for a, b in zip(self.lhs, self.log_rhs)], dtype=bool)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([_ratio(float(a), float(b)) for a, b in zip(self.lhs, self.log_rhs)])


def _log_many(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, -np.inf)
    np.log(x, out=out, where=x > 0)
    return out


def inequality_battery(space: BilinearSpace, values: np.ndarray, d: int) -> list[BatteryReport]:
    """The degree-d inequalities on a batch (N, B) of functions, each with its exact eps.

    hypercontractivity and the two Bonami forms are applied to g = f^{<=d};
    the level-d inequality is added when every column is 0/1 valued.
    """
    values = np.asarray(values)
    if values.ndim != 2 or values.shape[0] != space.N:
        raise ContractError("battery takes an (N, batch) array")
    q = space.q
    lq = math.log(q)
    g = degree_truncate(space, values, d)
    g4 = np.mean(np.abs(g) ** 4, axis=0)
    g2 = np.mean(np.abs(g) ** 2, axis=0)
    total = sum(influence_square_sums(space, g).values())
    eps = restriction_level(space, values, d)
    eps_inf = influence_level(space, g, d)
    out = [
        BatteryReport("hypercontractivity", g4, _log_many(total) + 100 * d * d * lq),
        BatteryReport("small_influence_bonami", g4, _log_many(eps_inf * g2) + 103 * d * d * lq),
        BatteryReport("global_bonami", g4, _log_many(eps * g2) + 115 * d * d * lq),
    ]
    if np.all((values == 0) | (values == 1)):
        mass = rank_mass(space, values)
        lhs = mass[d] if d < len(mass) else np.zeros(values.shape[1])
        dens = np.mean(values, axis=0)
        out.append(BatteryReport("level_d", lhs, 0.25 * _log_many(eps) + _log_many(dens) + 30 * d * d * lq))
    return out
