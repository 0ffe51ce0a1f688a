"""Enumerated spaces of matrices and the lattice of subspaces.

A ``MapSpace`` lists every rows x cols matrix over GF(q) in the canonical
order: column-major positions, little-endian base q, each entry given by
its field code.  So the matrix with a single entry c at (i, j) has index
``c * q**(i + rows*j)``.

``BilinearSpace`` bundles L(V,W) (matrices m x n) with its Fourier dual
L(W,V) (matrices n x m) for dim V = n, dim W = m.
"""

from __future__ import annotations

from functools import cached_property, lru_cache

import numpy as np

from . import linalg
from .errors import ContractError
from .field import GF
from .linalg import Subspace


class MapSpace:
    """All rows x cols matrices over GF(q), indexed canonically."""

    def __init__(self, F: GF, rows: int, cols: int) -> None:
        self.F = F
        self.q = F.q
        self.rows = rows
        self.cols = cols
        self.size = rows * cols
        self.N = self.q**self.size
        # weight of entry (i, j) in the index
        self.weights = self.q ** (np.arange(rows)[:, None] + rows * np.arange(cols)[None, :])
        self._pos_weights = self.q ** np.arange(self.size)

    def __repr__(self) -> str:
        return f"MapSpace(q={self.q}, {self.rows}x{self.cols})"

    @cached_property
    def digits(self) -> np.ndarray:
        """(N, size) array: entry codes at each column-major position."""
        idx = np.arange(self.N)
        return (idx[:, None] // self._pos_weights[None, :]) % self.q

    @cached_property
    def matrices(self) -> np.ndarray:
        """(N, rows, cols) array of every matrix."""
        return self.digits.reshape(self.N, self.cols, self.rows).transpose(0, 2, 1).copy()

    def matrix(self, index: int) -> np.ndarray:
        return self.matrices[index]

    def encode(self, M: np.ndarray) -> int:
        M = np.asarray(M, dtype=np.int64)
        if M.shape != (self.rows, self.cols):
            raise ContractError(f"matrix of shape {M.shape} not in {self}")
        return int((M * self.weights).sum())

    def encode_many(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64)
        return (arr * self.weights).sum(axis=(-2, -1))

    def translate(self, indices: np.ndarray, shift: int) -> np.ndarray:
        """Indices of M + shift for each M in ``indices``."""
        d = self.F.add[self.digits[np.asarray(indices)], self.digits[shift]]
        return d @ self._pos_weights

    def add_indices(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d = self.F.add[self.digits[np.asarray(a)], self.digits[np.asarray(b)]]
        return d @ self._pos_weights

    def sub_indices(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d = self.F.sub[self.digits[np.asarray(a)], self.digits[np.asarray(b)]]
        return d @ self._pos_weights

    @cached_property
    def negation(self) -> np.ndarray:
        return self.F.neg[self.digits] @ self._pos_weights

    @cached_property
    def ranks(self) -> np.ndarray:
        return np.array([linalg.rank(self.F, M) for M in self.matrices], dtype=np.int64)

    @cached_property
    def image_ids(self) -> np.ndarray:
        lat = lattice(self.F, self.rows)
        return np.array([lat.index[linalg.image(self.F, M)] for M in self.matrices], dtype=np.int64)

    @cached_property
    def kernel_ids(self) -> np.ndarray:
        lat = lattice(self.F, self.cols)
        return np.array([lat.index[linalg.kernel(self.F, M)] for M in self.matrices], dtype=np.int64)

    def preimage_ids(self, S: Subspace) -> np.ndarray:
        """Lattice ids of M^{-1}(S) for every matrix M."""
        return self._preimage_ids(S)

    @lru_cache(maxsize=None)
    def _preimage_ids(self, S: Subspace) -> np.ndarray:
        lat = lattice(self.F, self.cols)
        if S.codim == 0:
            return np.full(self.N, lat.index[Subspace.full(self.F, self.cols)], dtype=np.int64)
        prods = linalg.matmul(self.F, S.quotient_matrix, self.matrices)
        return np.array([lat.index[linalg.kernel(self.F, P)] for P in prods], dtype=np.int64)

    def transpose_permutation(self) -> np.ndarray:
        """perm[i] = index of the transpose of matrix i in the transposed space."""
        other = map_space(self.F, self.cols, self.rows)
        return other.encode_many(self.matrices.transpose(0, 2, 1))


class SubspaceLattice:
    """Every subspace of F_q^n with ids and a containment table."""

    def __init__(self, F: GF, n: int) -> None:
        self.F = F
        self.n = n
        self.subspaces = linalg.all_subspaces(F, n)
        self.index = {S: k for k, S in enumerate(self.subspaces)}
        self.dims = np.array([S.dim for S in self.subspaces], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.subspaces)

    @cached_property
    def contains(self) -> np.ndarray:
        """contains[a, b] is True iff subspace a contains subspace b."""
        k = len(self.subspaces)
        C = np.zeros((k, k), dtype=bool)
        for a, S in enumerate(self.subspaces):
            for b, U in enumerate(self.subspaces):
                C[a, b] = U.dim <= S.dim and S.contains_subspace(U)
        return C

    @cached_property
    def sums(self) -> np.ndarray:
        k = len(self.subspaces)
        out = np.zeros((k, k), dtype=np.int64)
        for a, S in enumerate(self.subspaces):
            for b, U in enumerate(self.subspaces):
                out[a, b] = self.index[S + U]
        return out

    def of_dim(self, d: int) -> list[Subspace]:
        return [S for S in self.subspaces if S.dim == d]

    def full(self) -> Subspace:
        return self.subspaces[-1]

    def zero(self) -> Subspace:
        return self.subspaces[0]


@lru_cache(maxsize=None)
def map_space(F: GF, rows: int, cols: int) -> MapSpace:
    return MapSpace(F, rows, cols)


@lru_cache(maxsize=None)
def lattice(F: GF, n: int) -> SubspaceLattice:
    return SubspaceLattice(F, n)


class BilinearSpace:
    """L(V,W) for V = F_q^n, W = F_q^m together with its dual L(W,V)."""

    def __init__(self, F: GF, n: int, m: int) -> None:
        self.F = F
        self.q = F.q
        self.n = n
        self.m = m
        self.dom = map_space(F, m, n)
        self.dual = map_space(F, n, m)
        self.N = self.dom.N

    def __repr__(self) -> str:
        return f"BilinearSpace(q={self.q}, dimV={self.n}, dimW={self.m})"

    @property
    def V(self) -> SubspaceLattice:
        return lattice(self.F, self.n)

    @property
    def W(self) -> SubspaceLattice:
        return lattice(self.F, self.m)

    def zero_V(self) -> Subspace:
        return Subspace.zero(self.F, self.n)

    def full_W(self) -> Subspace:
        return Subspace.full(self.F, self.m)

    def local(self, V1: Subspace, W1: Subspace) -> "BilinearSpace":
        """The space L(V/V1, W1) in canonical coordinates."""
        return bilinear_space(self.F, V1.codim, W1.dim)

    def transposed(self) -> "BilinearSpace":
        """L(W*, V*), where A* is the transpose of A."""
        return bilinear_space(self.F, self.m, self.n)

    def lift_indices(self, V1: Subspace, W1: Subspace) -> np.ndarray:
        """Ambient index of A(V,W) for every A in L(V/V1, W1), in local order."""
        return self._lift_indices(V1, W1)

    @lru_cache(maxsize=None)
    def _lift_indices(self, V1: Subspace, W1: Subspace) -> np.ndarray:
        loc = self.local(V1, W1)
        E = W1.embedding_matrix
        Q = V1.quotient_matrix
        lifted = linalg.matmul(self.F, linalg.matmul(self.F, E, loc.dom.matrices), Q)
        return self.dom.encode_many(lifted)

    def pushdown_indices(self, V1: Subspace, W1: Subspace) -> np.ndarray:
        """Local dual index of X(W1, V/V1) for every X in L(W,V)."""
        return self._pushdown_indices(V1, W1)

    @lru_cache(maxsize=None)
    def _pushdown_indices(self, V1: Subspace, W1: Subspace) -> np.ndarray:
        loc = self.local(V1, W1)
        pushed = linalg.matmul(
            self.F, linalg.matmul(self.F, V1.quotient_matrix, self.dual.matrices), W1.embedding_matrix
        )
        return loc.dual.encode_many(pushed)

    def coset_representatives(self, V1: Subspace, W1: Subspace) -> np.ndarray:
        """One T from each coset T + {A(V,W)}: those with coords_W1 . T . section_V1 = 0."""
        return self._coset_reps(V1, W1)

    @lru_cache(maxsize=None)
    def _coset_reps(self, V1: Subspace, W1: Subspace) -> np.ndarray:
        block = linalg.matmul(
            self.F, linalg.matmul(self.F, W1.coords_matrix, self.dom.matrices), V1.section_matrix
        )
        reps = np.nonzero(~block.reshape(self.N, -1).any(axis=1))[0]
        if reps.size * self.local(V1, W1).N != self.N:
            raise AssertionError("coset representatives do not tile L(V,W)")
        return reps

    def slice_indices(self, V1: Subspace, W1: Subspace) -> np.ndarray:
        """(reps, local) array: ambient index of A(V,W) + T for each coset rep T."""
        return self._slice_indices(V1, W1)

    @lru_cache(maxsize=None)
    def _slice_indices(self, V1: Subspace, W1: Subspace) -> np.ndarray:
        reps = self.coset_representatives(V1, W1)
        lifts = self.lift_indices(V1, W1)
        return self.dom.add_indices(reps[:, None], lifts[None, :])

    def pairs(self, max_order: int, min_order: int = 0):
        """All (V1, W1) with min_order <= dim V1 + codim W1 <= max_order."""
        out = []
        for V1 in self.V.subspaces:
            for W1 in self.W.subspaces:
                order = V1.dim + W1.codim
                if min_order <= order <= max_order:
                    out.append((V1, W1))
        return out


@lru_cache(maxsize=None)
def bilinear_space(F: GF, n: int, m: int) -> BilinearSpace:
    return BilinearSpace(F, n, m)
