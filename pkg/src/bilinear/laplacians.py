"""Laplacians, derivatives, influences and averaging operators on L(V,W).

Every operator here is a mask or multiplier on the spectrum.  The averaging
operators also have direct implementations that literally average over
translates; those serve as cross-checks.

Derivatives return functions on the smaller space L(V/V1, W1) in its
canonical frame.  ``restriction_points`` (in ``fourier``) gives the ambient
point behind each local point, which is how composites living in different
frames are compared.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ContractError, DomainError
from .fourier import (
    _mask,
    inverse_transform,
    pure_part,
    restrict,
    restriction_points,
    transform,
)
from .linalg import Subspace
from .spaces import BilinearSpace


# -------------------------------------------------------------------- masks


def mask_image_contains(space: BilinearSpace, V1: Subspace) -> np.ndarray:
    """Im(X) >= V1."""
    lat = space.V
    return lat.contains[space.dual.image_ids, lat.index[V1]]


def mask_kernel_inside(space: BilinearSpace, W1: Subspace) -> np.ndarray:
    """Ker(X) <= W1."""
    lat = space.W
    return lat.contains[lat.index[W1], space.dual.kernel_ids]


def mask_hybrid(space: BilinearSpace, V1: Subspace, W1: Subspace) -> np.ndarray:
    """Im(X) >= V1 and X^{-1}(V1) <= W1."""
    lat = space.W
    pre = space.dual.preimage_ids(V1)
    return mask_image_contains(space, V1) & lat.contains[lat.index[W1], pre]


def mask_poset_above(space: BilinearSpace, X_index: int) -> np.ndarray:
    """{Y : X <= Y}, i.e. rank(Y) = rank(X) + rank(Y - X)."""
    ranks = space.dual.ranks
    diff = space.dual.sub_indices(np.arange(space.N), X_index)
    return ranks == ranks[X_index] + ranks[diff]


def apply_multiplier(space: BilinearSpace, values: np.ndarray, mult: np.ndarray) -> np.ndarray:
    return inverse_transform(space, _mask(transform(space, values), mult))


# -------------------------------------------------------------- laplacians


@dataclass(frozen=True)
class LaplacianSpec:
    """Which Laplacian: kind in {subspaceV, subspaceW, hybrid, posetX}."""

    kind: str
    V1: Subspace | None = None
    W1: Subspace | None = None
    X: int | None = None
    order: int = field(init=False)

    def __post_init__(self) -> None:
        if self.kind == "subspaceV":
            order = self.V1.dim
        elif self.kind == "subspaceW":
            order = self.W1.codim
        elif self.kind == "hybrid":
            order = self.V1.dim + self.W1.codim
        elif self.kind == "posetX":
            order = -1
        else:
            raise ContractError(f"unknown Laplacian kind {self.kind!r}")
        object.__setattr__(self, "order", order)

    def mask(self, space: BilinearSpace) -> np.ndarray:
        if self.kind == "subspaceV":
            return mask_image_contains(space, self.V1)
        if self.kind == "subspaceW":
            return mask_kernel_inside(space, self.W1)
        if self.kind == "hybrid":
            return mask_hybrid(space, self.V1, self.W1)
        return mask_poset_above(space, self.X)


def laplacian_V(space: BilinearSpace, values: np.ndarray, V1: Subspace) -> np.ndarray:
    return apply_multiplier(space, values, mask_image_contains(space, V1))


def laplacian_W(space: BilinearSpace, values: np.ndarray, W1: Subspace) -> np.ndarray:
    return apply_multiplier(space, values, mask_kernel_inside(space, W1))


def laplacian_hybrid(space: BilinearSpace, values: np.ndarray, V1: Subspace, W1: Subspace) -> np.ndarray:
    return apply_multiplier(space, values, mask_hybrid(space, V1, W1))


def laplacian_X(space: BilinearSpace, values: np.ndarray, X_index: int) -> np.ndarray:
    return apply_multiplier(space, values, mask_poset_above(space, X_index))


# ------------------------------------------------------------- derivatives


def derivative(
    space: BilinearSpace, values: np.ndarray, V1: Subspace, W1: Subspace, T_index: int = 0
) -> np.ndarray:
    """D_{V1,W1,T} f = (L_{V1,W1} f)_{(V1,W1) -> T}, a function on L(V/V1, W1)."""
    return restrict(space, laplacian_hybrid(space, values, V1, W1), V1, W1, T_index)


def derivative_frame_X(space: BilinearSpace, X_index: int) -> tuple[Subspace, Subspace]:
    """(Im X, Ker X): the subspaces D_X restricts along."""
    X = space.dual.matrix(X_index)
    return linalg.image(space.F, X), linalg.kernel(space.F, X)


def derivative_X(space: BilinearSpace, values: np.ndarray, X_index: int, T_index: int = 0) -> np.ndarray:
    """D_{X,T} f = (L_X f)_{(Im X, Ker X) -> T}."""
    V1, W1 = derivative_frame_X(space, X_index)
    return restrict(space, laplacian_X(space, values, X_index), V1, W1, T_index)


def influence(space: BilinearSpace, values: np.ndarray, V1: Subspace, W1: Subspace, T_index: int = 0):
    """I_{(V1,W1,T)}[f] = ||D_{V1,W1,T} f||_2^2 (vectorised over batch axes)."""
    D = derivative(space, values, V1, W1, T_index)
    return np.mean(np.abs(D) ** 2, axis=0)


def influences_all_T(space: BilinearSpace, values: np.ndarray, V1: Subspace, W1: Subspace) -> np.ndarray:
    """I_{(V1,W1,T)} for one T per coset (T only matters through its coset)."""
    L = laplacian_hybrid(space, values, V1, W1)
    sl = space.slice_indices(V1, W1)
    return np.mean(np.abs(L[sl]) ** 2, axis=1)


def order_one_derivative(
    space: BilinearSpace, values: np.ndarray, side: str, U: Subspace, T_index: int = 0
) -> np.ndarray:
    """D_{U,T}: D_{U,W,T} for a line U <= V, D_{0,U,T} for a hyperplane U <= W."""
    V1, W1 = one_step_pair(space, side, U)
    return derivative(space, values, V1, W1, T_index)


def one_step_pair(space: BilinearSpace, side: str, U: Subspace) -> tuple[Subspace, Subspace]:
    if side == "V":
        if U.ambient != space.n or U.dim != 1:
            raise ContractError("U must be a line in V")
        return U, space.full_W()
    if side == "W":
        if U.ambient != space.m or U.codim != 1:
            raise ContractError("U must be a hyperplane in W")
        return space.zero_V(), U
    raise ContractError(f"side must be 'V' or 'W', not {side!r}")


# ------------------------------------------------- averaging operators


def avg_coarse(space: BilinearSpace, values: np.ndarray, Vp: Subspace) -> np.ndarray:
    """e_{V/V'} f(A) = E_{B in L(V/V',W)} f(A + B(V,W)), by direct averaging."""
    lifts = space.lift_indices(Vp, space.full_W())
    idx = space.dom.add_indices(np.arange(space.N)[:, None], lifts[None, :])
    return np.asarray(values)[idx].mean(axis=1)


def avg_coarse_spectral(space: BilinearSpace, values: np.ndarray, Vp: Subspace) -> np.ndarray:
    """Mask {X : Im X <= V'}."""
    lat = space.V
    mult = lat.contains[lat.index[Vp], space.dual.image_ids]
    return apply_multiplier(space, values, mult)


def _check_vector(space: BilinearSpace, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (space.n,):
        raise ContractError("v must be a vector of V")
    if not v.any():
        raise DomainError("v must be nonzero")
    if space.n == 1:
        raise DomainError("averaging over hyperplanes avoiding v is rejected when dim V = 1")
    return v


def avg_v(space: BilinearSpace, values: np.ndarray, v) -> np.ndarray:
    """E_v f: mean of e_{V/V'} f over hyperplanes V' not containing v (direct)."""
    v = _check_vector(space, v)
    hyper = [H for H in space.V.of_dim(space.n - 1) if not H.contains(v)]
    return sum(avg_coarse(space, values, H) for H in hyper) / len(hyper)


def avg_v_multiplier(space: BilinearSpace, v) -> np.ndarray:
    """q^{-rank X} [v not in Im X]."""
    v = _check_vector(space, v)
    lat = space.V
    line = lat.index[Subspace.span(space.F, space.n, [v])]
    outside = ~lat.contains[space.dual.image_ids, line]
    return outside * float(space.q) ** (-space.dual.ranks)


def avg_v_spectral(space: BilinearSpace, values: np.ndarray, v) -> np.ndarray:
    return apply_multiplier(space, values, avg_v_multiplier(space, v))


def _annihilator_generator(space: BilinearSpace, Wp: Subspace) -> np.ndarray:
    if Wp.ambient != space.m or Wp.codim != 1:
        raise ContractError("W' must be a hyperplane of W")
    return np.asarray(linalg.annihilator(Wp).basis[0], dtype=np.int64)


def avg_W(space: BilinearSpace, values: np.ndarray, Wp: Subspace) -> np.ndarray:
    """E_{W'} f = (E_phi f*)* with phi spanning the annihilator of W' (direct)."""
    phi = _annihilator_generator(space, Wp)
    dual_space = space.transposed()
    perm = space.dom.transpose_permutation()
    values = np.asarray(values)
    f_star = np.empty_like(values, dtype=complex)
    f_star[perm] = values
    g_star = avg_v(dual_space, f_star, phi)
    return g_star[perm]


def avg_W_multiplier(space: BilinearSpace, Wp: Subspace) -> np.ndarray:
    """q^{-rank X} [Ker X + W' = W]."""
    _annihilator_generator(space, Wp)
    lat = space.W
    sums = lat.sums[space.dual.kernel_ids, lat.index[Wp]]
    full = lat.index[space.full_W()]
    return (sums == full) * float(space.q) ** (-space.dual.ranks)


def avg_W_spectral(space: BilinearSpace, values: np.ndarray, Wp: Subspace) -> np.ndarray:
    return apply_multiplier(space, values, avg_W_multiplier(space, Wp))


def comb_laplacian(space: BilinearSpace, values: np.ndarray, v) -> np.ndarray:
    """f - E_v f."""
    return np.asarray(values) - avg_v(space, values, v)


def avg_U(space: BilinearSpace, values: np.ndarray, side: str, U: Subspace, method: str = "spectral") -> np.ndarray:
    """E_U for a line U <= V (any generator) or a hyperplane U <= W."""
    one_step_pair(space, side, U)
    if side == "V":
        v = np.asarray(U.basis[0], dtype=np.int64)
        return avg_v_spectral(space, values, v) if method == "spectral" else avg_v(space, values, v)
    return avg_W_spectral(space, values, U) if method == "spectral" else avg_W(space, values, U)


def laplacian_U(space: BilinearSpace, values: np.ndarray, side: str, U: Subspace) -> np.ndarray:
    """L_U: L_{U} for a line in V, L_{U} (kernel inside U) for a hyperplane of W."""
    one_step_pair(space, side, U)
    return laplacian_V(space, values, U) if side == "V" else laplacian_W(space, values, U)


def tee_operator(
    space: BilinearSpace, values: np.ndarray, i: int, side: str, U: Subspace, method: str = "spectral"
) -> np.ndarray:
    """f - (q^i + q^{i-1}) E_U f + q^{2i-1} E_U^2 f."""
    if i < 1:
        raise DomainError("i must be at least 1")
    q = float(space.q)
    e1 = avg_U(space, values, side, U, method)
    e2 = avg_U(space, e1, side, U, method)
    return np.asarray(values) - (q**i + q ** (i - 1)) * e1 + q ** (2 * i - 1) * e2


# ------------------------------------------------- composition calculus


@dataclass
class CalculusReport:
    name: str
    instances: int = 0
    max_err: float = 0.0

    @property
    def passed(self) -> bool:
        return self.max_err < 1e-9

    def record(self, err: float) -> None:
        self.instances += 1
        self.max_err = max(self.max_err, float(err))

    def as_dict(self) -> dict:
        return {"lemma_id": self.name, "instances_checked": self.instances, "max_err": self.max_err, "pass": self.passed}


def _aligned(points: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(points, kind="stable")
    return points[order], values[order]


def _compare(pa, va, pb, vb) -> float:
    pa, va = _aligned(pa, va)
    pb, vb = _aligned(pb, vb)
    if pa.shape != pb.shape or (pa != pb).any():
        return float("inf")
    return float(np.max(np.abs(va - vb))) if va.size else 0.0


def composed_derivative_lhs(space, values, V2, W2, T, V1, W1, S_local):
    """D_{V1/V2,W1,S} D_{V2,W2,T} f with ambient points."""
    loc2 = space.local(V2, W2)
    g = derivative(space, values, V2, W2, T)
    pts2 = restriction_points(space, V2, W2, T)
    V1l = linalg.quotient_image(V2, V1)
    W1l = linalg.local_subspace(W2, W1)
    h = derivative(loc2, g, V1l, W1l, S_local)
    return pts2[restriction_points(loc2, V1l, W1l, S_local)], h


def check_derivative_composition(space, values, V2, W2, T, V1, W1, S_local) -> float:
    """Error in D_{V1/V2,W1,S} D_{V2,W2,T} = D_{V1,W1,T+S(V,W)}."""
    pa, va = composed_derivative_lhs(space, values, V2, W2, T, V1, W1, S_local)
    loc2 = space.local(V2, W2)
    S_amb = space.dom.encode(linalg.lift(space.F, loc2.dom.matrix(S_local), V2, W2))
    T2 = int(space.dom.add_indices(np.array(T), np.array(S_amb)))
    vb = derivative(space, values, V1, W1, T2)
    pb = restriction_points(space, V1, W1, T2)
    return _compare(pa, va, pb, vb)


def restricted_composition_terms(space, values, V1, W1, T):
    """sum over V2 <= V1, W2 >= W1 and X of D_X D_{V2,W2,T} f, with ambient points."""
    total = None
    points = None
    for V2 in space.V.subspaces:
        if not V1.contains_subspace(V2):
            continue
        for W2 in space.W.subspaces:
            if not W2.contains_subspace(W1):
                continue
            loc2 = space.local(V2, W2)
            target_im = loc2.V.index[linalg.quotient_image(V2, V1)]
            target_ker = loc2.W.index[linalg.local_subspace(W2, W1)]
            xs = np.nonzero((loc2.dual.image_ids == target_im) & (loc2.dual.kernel_ids == target_ker))[0]
            if xs.size == 0:
                continue
            g = derivative(space, values, V2, W2, T)
            pts2 = restriction_points(space, V2, W2, T)
            for X in xs:
                h = derivative_X(loc2, g, int(X))
                ImX, KerX = derivative_frame_X(loc2, int(X))
                pts = pts2[restriction_points(loc2, ImX, KerX, 0)]
                pts, h = _aligned(pts, h)
                if total is None:
                    total, points = h.copy(), pts
                else:
                    if (pts != points).any():
                        raise AssertionError("summands live on different slices")
                    total = total + h
    return points, total


def check_restricted_composition(space, values, V1, W1, T) -> float:
    """Error in (L_{V1} L_{W1} f)_{(V1,W1)->T} = sum of D_X D_{V2,W2,T} f."""
    lhs_f = laplacian_V(space, laplacian_W(space, values, W1), V1)
    va = restrict(space, lhs_f, V1, W1, T)
    pa = restriction_points(space, V1, W1, T)
    pb, vb = restricted_composition_terms(space, values, V1, W1, T)
    if pb is None:
        return float(np.max(np.abs(va))) if va.size else 0.0
    return _compare(pa, va, pb, vb)


def check_derivative_swap(space, values, X, V2, W2, T_local, S) -> float:
    """Error in D_{V2/V1,W2,T} D_{X,S} = sum over (V3, W3) of D_{X(W3,V/V3)} D_{V3,W3,S+T(V,W)}.

    V1 = Im X, W1 = Ker X; V1 <= V2 and W2 <= W1.
    """
    F = space.F
    V1, W1 = derivative_frame_X(space, X)
    loc1 = space.local(V1, W1)
    g = derivative_X(space, values, X, S)
    pts1 = restriction_points(space, V1, W1, S)
    V2l = linalg.quotient_image(V1, V2)
    W2l = linalg.local_subspace(W1, W2)
    va = derivative(loc1, g, V2l, W2l, T_local)
    pa = pts1[restriction_points(loc1, V2l, W2l, T_local)]

    T_amb = space.dom.encode(linalg.lift(F, loc1.dom.matrix(T_local), V1, W1))
    S2 = int(space.dom.add_indices(np.array(S), np.array(T_amb)))
    Xm = space.dual.matrix(X)
    total, points = None, None
    zero = Subspace.zero(F, space.n)
    for V3 in space.V.subspaces:
        if V3.dim + V1.dim != V2.dim or not V2.contains_subspace(V3) or (V3 & V1) != zero:
            continue
        for W3 in space.W.subspaces:
            if not W3.contains_subspace(W2) or (W3 & W1) != W2 or (W3 + W1) != space.full_W():
                continue
            loc3 = space.local(V3, W3)
            g3 = derivative(space, values, V3, W3, S2)
            pts3 = restriction_points(space, V3, W3, S2)
            X3 = loc3.dual.encode(linalg.pushdown(F, Xm, W3, V3))
            h = derivative_X(loc3, g3, X3)
            Im3, Ker3 = derivative_frame_X(loc3, X3)
            pts = pts3[restriction_points(loc3, Im3, Ker3, 0)]
            pts, h = _aligned(pts, h)
            if total is None:
                total, points = h.copy(), pts
            else:
                if (pts != points).any():
                    return float("inf")
                total = total + h
    if total is None:
        return float(np.max(np.abs(va))) if va.size else 0.0
    return _compare(pa, va, points, total)


def _nested_pairs(lat):
    return [(A, B) for A in lat.subspaces for B in lat.subspaces if B.contains_subspace(A)]


def verify_composition_calculus(
    space: BilinearSpace,
    exhaustive: bool = True,
    samples: int = 500,
    seed: int = 0,
) -> list[CalculusReport]:
    """Check the three composition identities on characters.

    Exhaustive mode runs every configuration against all characters at once
    (the identity matrix of spectra).  Sampled mode draws ``samples``
    random (configuration, character) instances.
    """
    rng = np.random.default_rng(seed)
    N = space.N
    all_chars = inverse_transform(space, np.eye(N, dtype=complex))
    reports = [CalculusReport("composition_of_derivatives"), CalculusReport("restricted_laplacian_composition"),
               CalculusReport("derivative_swap")]

    def funcs():
        if exhaustive:
            return all_chars
        return all_chars[:, rng.integers(N)][:, None]

    Vn = _nested_pairs(space.V)  # (smaller, larger)
    Wn = _nested_pairs(space.W)

    # composition of derivatives: V2 <= V1, W1 <= W2
    configs = [(V2, V1, W1, W2) for (V2, V1) in Vn for (W1, W2) in Wn]
    if exhaustive:
        for V2, V1, W1, W2 in configs:
            loc2 = space.local(V2, W2)
            V1l = linalg.quotient_image(V2, V1)
            W1l = linalg.local_subspace(W2, W1)
            s_reps = loc2.coset_representatives(V1l, W1l)
            for T in space.coset_representatives(V2, W2):
                for S in s_reps:
                    reports[0].record(check_derivative_composition(space, funcs(), V2, W2, int(T), V1, W1, int(S)))
    else:
        for _ in range(samples):
            V2, V1, W1, W2 = configs[rng.integers(len(configs))]
            loc2 = space.local(V2, W2)
            T = int(rng.integers(N))
            S = int(rng.integers(loc2.N))
            reports[0].record(check_derivative_composition(space, funcs(), V2, W2, T, V1, W1, S))

    # restriction of L_{V1} L_{W1}
    pairs = [(V1, W1) for V1 in space.V.subspaces for W1 in space.W.subspaces]
    if exhaustive:
        for V1, W1 in pairs:
            for T in space.coset_representatives(V1, W1):
                reports[1].record(check_restricted_composition(space, funcs(), V1, W1, int(T)))
    else:
        for _ in range(samples):
            V1, W1 = pairs[rng.integers(len(pairs))]
            reports[1].record(check_restricted_composition(space, funcs(), V1, W1, int(rng.integers(N))))

    # swapping derivatives
    swap_configs = []
    for X in range(N):
        V1, W1 = derivative_frame_X(space, X)
        for V2 in space.V.subspaces:
            if not V2.contains_subspace(V1):
                continue
            for W2 in space.W.subspaces:
                if W1.contains_subspace(W2):
                    swap_configs.append((X, V1, W1, V2, W2))
    if exhaustive:
        for X, V1, W1, V2, W2 in swap_configs:
            loc1 = space.local(V1, W1)
            V2l = linalg.quotient_image(V1, V2)
            W2l = linalg.local_subspace(W1, W2)
            for S in space.coset_representatives(V1, W1):
                for T in loc1.coset_representatives(V2l, W2l):
                    reports[2].record(check_derivative_swap(space, funcs(), X, V2, W2, int(T), int(S)))
    else:
        for _ in range(samples):
            X, V1, W1, V2, W2 = swap_configs[rng.integers(len(swap_configs))]
            loc1 = space.local(V1, W1)
            T = int(rng.integers(loc1.N))
            S = int(rng.integers(N))
            reports[2].record(check_derivative_swap(space, funcs(), X, V2, W2, T, S))
    return reports
