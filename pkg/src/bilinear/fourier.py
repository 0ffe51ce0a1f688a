"""Fourier analysis on L(V,W).

Characters are u_X(A) = omega^{trace(Tr(XA))} for X in L(W,V).  Since
Tr(XA) = sum_{i,k} X[i,k] A[k,i], a character is a product of one-entry
kernels and the transform is a tensor product of q-point transforms, one
per matrix entry, followed by a transposition of entry positions.

Conventions:  fhat(X) = E_A f(A) conj(u_X(A)),  f = sum_X fhat(X) u_X.
Arrays of values may carry trailing batch axes; the transform acts on the
first axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ContractError, DomainError
from .linalg import Subspace
from .spaces import BilinearSpace

DEGREE_CUTOFF = 1e-9


def _entry_permutation(space: BilinearSpace) -> list[int]:
    """Axis permutation sending A-entry axes to X-entry axes.

    Tensor axis k holds position size-1-k (C order, little-endian index).
    A position k + m*i carries entry A[k, i], which pairs with X[i, k] at
    X position i + n*k.
    """
    n, m = space.n, space.m
    size = n * m
    perm = [0] * size
    for i in range(n):
        for k in range(m):
            x_axis = size - 1 - (i + n * k)
            a_axis = size - 1 - (k + m * i)
            perm[x_axis] = a_axis
    return perm


def _tensor_stages(values: np.ndarray, kernel: np.ndarray, q: int, size: int) -> np.ndarray:
    batch = values.shape[1:]
    t = values.reshape((q,) * size + batch)
    for axis in range(size):
        t = np.moveaxis(np.tensordot(kernel, t, axes=([1], [axis])), 0, axis)
    return t


def transform(space: BilinearSpace, values: np.ndarray) -> np.ndarray:
    """Spectrum over L(W,V) (dual index order) of a function on L(V,W)."""
    values = np.asarray(values, dtype=complex)
    if values.shape[0] != space.N:
        raise ContractError(f"function has {values.shape[0]} values, expected {space.N}")
    size = space.n * space.m
    if size == 0:
        return values.copy()
    batch = values.shape[1:]
    t = _tensor_stages(values, np.conj(space.F.kernel), space.q, size)
    perm = _entry_permutation(space)
    t = np.transpose(t, perm + list(range(size, size + len(batch))))
    return t.reshape((space.N,) + batch) / space.N


def inverse_transform(space: BilinearSpace, coeffs: np.ndarray) -> np.ndarray:
    """Function on L(V,W) from its spectrum over L(W,V)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape[0] != space.N:
        raise ContractError(f"spectrum has {coeffs.shape[0]} values, expected {space.N}")
    size = space.n * space.m
    if size == 0:
        return coeffs.copy()
    batch = coeffs.shape[1:]
    perm = _entry_permutation(space)
    inv_perm = [0] * size
    for x_axis, a_axis in enumerate(perm):
        inv_perm[a_axis] = x_axis
    t = coeffs.reshape((space.q,) * size + batch)
    t = np.transpose(t, inv_perm + list(range(size, size + len(batch))))
    t = _tensor_stages(t.reshape((space.N,) + batch), space.F.kernel, space.q, size)
    return t.reshape((space.N,) + batch)


def character(space: BilinearSpace, X_index: int) -> np.ndarray:
    """Values of u_X over L(V,W)."""
    X = space.dual.matrix(X_index)
    return character_values(space, X, space.dom.matrices)


def character_values(space: BilinearSpace, X: np.ndarray, A: np.ndarray) -> np.ndarray:
    """u_X(A) for one X and a batch of A (..., m, n)."""
    X = np.asarray(X, dtype=np.int64)
    A = np.asarray(A, dtype=np.int64)
    if X.shape != (space.n, space.m) or A.shape[-2:] != (space.m, space.n):
        raise ContractError("character needs X in L(W,V) and A in L(V,W)")
    F = space.F
    tr = np.zeros(A.shape[:-2], dtype=np.int64)
    for i in range(space.n):
        for k in range(space.m):
            tr = F.add[tr, F.mul[X[i, k], A[..., k, i]]]
    return F.roots[F.trace_table[tr]]


def character_at(space: BilinearSpace, T_index: int) -> np.ndarray:
    """u_X(T) for every X in L(W,V), for a fixed T."""
    T = space.dom.matrix(T_index)
    F = space.F
    Xs = space.dual.matrices
    tr = np.zeros(space.N, dtype=np.int64)
    for i in range(space.n):
        for k in range(space.m):
            tr = F.add[tr, F.mul[Xs[:, i, k], T[k, i]]]
    return F.roots[F.trace_table[tr]]


# ------------------------------------------------------------ degree parts


def rank_mask(space: BilinearSpace, d: int, exact: bool = True) -> np.ndarray:
    ranks = space.dual.ranks
    return ranks == d if exact else ranks <= d


def _mask(coeffs: np.ndarray, mask: np.ndarray) -> np.ndarray:
    shape = (-1,) + (1,) * (coeffs.ndim - 1)
    return coeffs * mask.reshape(shape)


def pure_part(space: BilinearSpace, values: np.ndarray, d: int) -> np.ndarray:
    """f^{=d}."""
    coeffs = transform(space, values)
    return inverse_transform(space, _mask(coeffs, rank_mask(space, d)))


def degree_truncate(space: BilinearSpace, values: np.ndarray, d: int) -> np.ndarray:
    """f^{<=d}."""
    coeffs = transform(space, values)
    return inverse_transform(space, _mask(coeffs, rank_mask(space, d, exact=False)))


def fourier_degree(space: BilinearSpace, values: np.ndarray, cutoff: float = DEGREE_CUTOFF) -> int:
    """Largest rank of X with |fhat(X)| > cutoff (-1 for the zero function)."""
    coeffs = transform(space, values)
    big = np.abs(coeffs) > cutoff
    if big.ndim > 1:
        big = big.reshape(big.shape[0], -1).any(axis=1)
    if not big.any():
        return -1
    return int(space.dual.ranks[big].max())


def rank_mass(space: BilinearSpace, values: np.ndarray) -> np.ndarray:
    """Sum of |fhat|^2 over each rank class, i.e. the squared norms of f^{=d}.  Batched."""
    coeffs = transform(space, values)
    mass = np.abs(coeffs) ** 2
    top = min(space.n, space.m)
    return np.array([mass[space.dual.ranks == d].sum(axis=0) for d in range(top + 1)])


def norm(values: np.ndarray, p: int = 2) -> float:
    """L^p norm against the uniform measure."""
    return float(np.mean(np.abs(values) ** p) ** (1.0 / p))


def norm_pow(values: np.ndarray, p: int) -> np.ndarray:
    """E|f|^p along the first axis."""
    return np.mean(np.abs(values) ** p, axis=0)


# ------------------------------------------------------- shifts and slices


def shift(space: BilinearSpace, values: np.ndarray, T_index: int) -> np.ndarray:
    """(Delta_T f)(A) = f(A + T)."""
    idx = space.dom.translate(np.arange(space.N), T_index)
    return np.asarray(values)[idx]


@dataclass(frozen=True)
class RestrictionTriple:
    """(V1, W1, T) describing the slice {A(V,W) + T : A in L(V/V1, W1)}."""

    V1: Subspace
    W1: Subspace
    T: int

    @property
    def order(self) -> int:
        return self.V1.dim + self.W1.codim

    def slice_key(self, space: BilinearSpace) -> tuple:
        """Canonical description of the slice; equal keys mean equal slices."""
        slice_points = space.dom.translate(space.lift_indices(self.V1, self.W1), self.T)
        return (self.V1, self.W1, int(np.min(slice_points)))


def restriction_points(space: BilinearSpace, V1: Subspace, W1: Subspace, T_index: int = 0) -> np.ndarray:
    """Ambient index of A(V,W) + T for every A in L(V/V1, W1), local order."""
    lifts = space.lift_indices(V1, W1)
    return lifts if T_index == 0 else space.dom.translate(lifts, T_index)


def restrict(
    space: BilinearSpace, values: np.ndarray, V1: Subspace, W1: Subspace, T_index: int = 0
) -> np.ndarray:
    """f_{(V1,W1) -> T} as a function on L(V/V1, W1)."""
    _check_pair(space, V1, W1)
    return np.asarray(values)[restriction_points(space, V1, W1, T_index)]


def restricted_spectrum(
    space: BilinearSpace, coeffs: np.ndarray, V1: Subspace, W1: Subspace, T_index: int = 0
) -> np.ndarray:
    """Spectrum of the restriction computed from fhat: sum over X pushing down to Y of fhat(X) u_X(T)."""
    _check_pair(space, V1, W1)
    loc = space.local(V1, W1)
    push = space.pushdown_indices(V1, W1)
    weights = np.asarray(coeffs) * _expand(character_at(space, T_index), np.asarray(coeffs).ndim)
    out = np.zeros((loc.N,) + weights.shape[1:], dtype=complex)
    np.add.at(out, push, weights)
    return out


def _expand(vec: np.ndarray, ndim: int) -> np.ndarray:
    return vec.reshape((-1,) + (1,) * (ndim - 1))


def _check_pair(space: BilinearSpace, V1: Subspace, W1: Subspace) -> None:
    if V1.ambient != space.n or W1.ambient != space.m:
        raise ContractError("subspaces do not live in V and W")


# ----------------------------------------------------------------- dictators


def dictator(space: BilinearSpace, v, w) -> np.ndarray:
    """Indicator of {A : A v = w}."""
    v = np.asarray(v, dtype=np.int64)
    w = np.asarray(w, dtype=np.int64)
    if not v.any() and w.any():
        raise DomainError("A 0 = w has no solution for w != 0")
    Av = linalg.matmul(space.F, space.dom.matrices, v[:, None])[..., 0]
    return np.all(Av == w[None, :], axis=1).astype(float)


def dual_dictator(space: BilinearSpace, phi, psi) -> np.ndarray:
    """Indicator of {A : A* phi = psi}, i.e. phi^T A = psi^T with phi in W*, psi in V*."""
    phi = np.asarray(phi, dtype=np.int64)
    psi = np.asarray(psi, dtype=np.int64)
    if not phi.any() and psi.any():
        raise DomainError("A* 0 = psi has no solution for psi != 0")
    At = space.dom.matrices.transpose(0, 2, 1)
    Aphi = linalg.matmul(space.F, At, phi[:, None])[..., 0]
    return np.all(Aphi == psi[None, :], axis=1).astype(float)


def dictator_spectrum(space: BilinearSpace, v, w) -> np.ndarray:
    """Closed-form spectrum of 1_{Av=w}: conj(u_X(B)) / q^m on S_v = {X : Im X <= span v}.

    B is any map with B v = w.
    """
    F = space.F
    v = np.asarray(v, dtype=np.int64)
    w = np.asarray(w, dtype=np.int64)
    if not v.any():
        raise DomainError("closed form needs v != 0")
    B = _witness(space, v, w)
    span_v = Subspace.span(F, space.n, [v])
    lat = space.V
    in_span = lat.contains[lat.index[span_v]][space.dual.image_ids]
    uB = character_at(space, space.dom.encode(B))
    return np.where(in_span, np.conj(uB), 0) / space.q**space.m


def dual_dictator_spectrum(space: BilinearSpace, phi, psi) -> np.ndarray:
    """Closed-form spectrum of 1_{A* phi = psi}: conj(u_X(B)) / q^n on {X : ker X >= ker phi}."""
    F = space.F
    phi = np.asarray(phi, dtype=np.int64)
    psi = np.asarray(psi, dtype=np.int64)
    if not phi.any():
        raise DomainError("closed form needs phi != 0")
    Bt = _witness(space.transposed(), phi, psi)
    B = Bt.T
    ker_phi = linalg.kernel(F, phi[None, :])
    latW = space.W
    kids = space.dual.kernel_ids
    ok = latW.contains[kids, latW.index[ker_phi]]
    uB = character_at(space, space.dom.encode(B))
    return np.where(ok, np.conj(uB), 0) / space.q**space.n


def _witness(space: BilinearSpace, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Some B in L(V,W) with B v = w (v != 0)."""
    F = space.F
    k = int(np.nonzero(v)[0][0])
    B = np.zeros((space.m, space.n), dtype=np.int64)
    B[:, k] = F.mul[F.inv(int(v[k])), w]
    return B


def sharpness_function(space: BilinearSpace, d: int) -> np.ndarray:
    """sum of u_X over all X of rank d."""
    coeffs = rank_mask(space, d).astype(complex)
    return inverse_transform(space, coeffs)


@dataclass
class MapFunction:
    """A function on L(V,W) with its space attached."""

    space: BilinearSpace
    values: np.ndarray

    def spectrum(self) -> "Spectrum":
        return Spectrum(self.space, transform(self.space, self.values))

    def norm(self, p: int = 2) -> float:
        return norm(self.values, p)


@dataclass
class Spectrum:
    """Fourier coefficients over L(W,V) in the dual index order."""

    space: BilinearSpace
    coeffs: np.ndarray

    def function(self) -> MapFunction:
        return MapFunction(self.space, inverse_transform(self.space, self.coeffs))

    def rank_histogram(self) -> np.ndarray:
        mass = np.abs(self.coeffs) ** 2
        top = min(self.space.n, self.space.m)
        return np.array([mass[self.space.dual.ranks == d].sum() for d in range(top + 1)])
