"""Dense linear algebra over GF(q).

Matrices are numpy integer arrays of field codes.  A map V -> W with
dim V = n and dim W = m is an m x n array acting on column vectors.

Subspaces are stored by their reduced row echelon basis, which makes them
hashable and comparable.  Quotients get a fixed frame: the coset
representatives are the standard basis vectors at the non-pivot columns of
the subspace's RREF basis.  With that choice

* ``quotient_matrix(S)`` reduces a vector by the basis rows and reads the
  non-pivot coordinates,
* ``section_matrix(S)`` is the inclusion of the non-pivot coordinates,
* ``embedding_matrix(S)`` has the basis vectors as columns,
* ``coords_matrix(S)`` reads the pivot coordinates, which are the
  coordinates of a vector of S in its RREF basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ContractError, DomainError
from .field import GF

SUBSPACE_AMBIENT_CAP = 5


# ---------------------------------------------------------------- matrices


def matmul(F: GF, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Product over GF(q); leading batch axes broadcast."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.shape[-1] != B.shape[-2]:
        raise ContractError(f"cannot compose {A.shape} with {B.shape}")
    shape = np.broadcast_shapes(A.shape[:-2], B.shape[:-2]) + (A.shape[-2], B.shape[-1])
    out = np.zeros(shape, dtype=np.int64)
    for t in range(A.shape[-1]):
        out = F.add[out, F.mul[A[..., :, t, None], B[..., None, t, :]]]
    return out


def matadd(F: GF, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return F.add[np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64)]


def matsub(F: GF, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return F.sub[np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64)]


def matneg(F: GF, A: np.ndarray) -> np.ndarray:
    return F.neg[np.asarray(A, dtype=np.int64)]


def trace_of(F: GF, M: np.ndarray) -> int:
    acc = 0
    for i in range(min(M.shape)):
        acc = int(F.add[acc, M[i, i]])
    return acc


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def rref(F: GF, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    R = np.array(M, dtype=np.int64, copy=True)
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = F.mul[F.inv(int(R[r, c])), R[r]]
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = F.sub[R[i], F.mul[R[i, c], R[r]]]
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank(F: GF, M: np.ndarray) -> int:
    return len(rref(F, M)[1])


def kernel(F: GF, M: np.ndarray) -> "Subspace":
    """{v : M v = 0} as a subspace of the domain."""
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[1]
    R, pivots = rref(F, M)
    free = [c for c in range(cols) if c not in pivots]
    vecs = []
    for fcol in free:
        v = np.zeros(cols, dtype=np.int64)
        v[fcol] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg[R[i, fcol]]
        vecs.append(v)
    return Subspace.span(F, cols, vecs)


def image(F: GF, M: np.ndarray) -> "Subspace":
    """Column space of M in codomain coordinates."""
    M = np.asarray(M, dtype=np.int64)
    return Subspace.span(F, M.shape[0], list(M.T))


def apply(F: GF, M: np.ndarray, v) -> np.ndarray:
    return matmul(F, M, np.asarray(v, dtype=np.int64)[:, None])[:, 0]


# --------------------------------------------------------------- subspaces


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_q^ambient held by its RREF basis."""

    q: int
    ambient: int
    basis: tuple[tuple[int, ...], ...]
    F: GF = field(compare=False, hash=False, repr=False)

    @classmethod
    def span(cls, F: GF, ambient: int, vectors) -> "Subspace":
        vecs = [np.asarray(v, dtype=np.int64).reshape(-1) for v in vectors]
        if not vecs:
            return cls.zero(F, ambient)
        R, _ = rref(F, np.stack(vecs))
        return cls(F.q, ambient, tuple(tuple(int(x) for x in row) for row in R), F)

    @classmethod
    def zero(cls, F: GF, ambient: int) -> "Subspace":
        return cls(F.q, ambient, (), F)

    @classmethod
    def full(cls, F: GF, ambient: int) -> "Subspace":
        return cls.span(F, ambient, list(identity(ambient)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.ambient - self.dim

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(c for c, x in enumerate(row) if x) for row in self.basis)

    @cached_property
    def nonpivots(self) -> tuple[int, ...]:
        return tuple(c for c in range(self.ambient) if c not in self.pivots)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Basis vectors as rows, shape (dim, ambient)."""
        return np.array(self.basis, dtype=np.int64).reshape(self.dim, self.ambient)

    @cached_property
    def embedding_matrix(self) -> np.ndarray:
        return self.matrix.T.copy()

    @cached_property
    def coords_matrix(self) -> np.ndarray:
        C = np.zeros((self.dim, self.ambient), dtype=np.int64)
        for i, c in enumerate(self.pivots):
            C[i, c] = 1
        return C

    @cached_property
    def quotient_matrix(self) -> np.ndarray:
        Q = np.zeros((self.codim, self.ambient), dtype=np.int64)
        for row, r in enumerate(self.nonpivots):
            Q[row, r] = 1
            for i, c in enumerate(self.pivots):
                Q[row, c] = self.F.neg[self.basis[i][r]]
        return Q

    @cached_property
    def section_matrix(self) -> np.ndarray:
        S = np.zeros((self.ambient, self.codim), dtype=np.int64)
        for col, r in enumerate(self.nonpivots):
            S[r, col] = 1
        return S

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64)
        if self.dim == 0:
            return not v.any()
        return not apply(self.F, self.quotient_matrix, v).any()

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis)

    def __le__(self, other: "Subspace") -> bool:
        return other.contains_subspace(self)

    def __ge__(self, other: "Subspace") -> bool:
        return self.contains_subspace(other)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.F, self.ambient, list(self.basis) + list(other.basis))

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersection(self, other)

    def vectors(self) -> list[tuple[int, ...]]:
        """Every vector of the subspace (q^dim of them)."""
        out = []
        for coeffs in itertools.product(range(self.q), repeat=self.dim):
            v = np.zeros(self.ambient, dtype=np.int64)
            for c, row in zip(coeffs, self.basis):
                v = self.F.add[v, self.F.mul[c, np.asarray(row)]]
            out.append(tuple(int(x) for x in v))
        return out

    def codes(self) -> list[int]:
        """Rows packed as base-q integers, little-endian (text format)."""
        return [sum(x * self.q**k for k, x in enumerate(row)) for row in self.basis]


def intersection(S: Subspace, U: Subspace) -> Subspace:
    F = S.F
    if S.dim == 0 or U.dim == 0:
        return Subspace.zero(F, S.ambient)
    # v = E_S a lies in U iff Q_U E_S a = 0.
    M = matmul(F, U.quotient_matrix, S.embedding_matrix)
    if M.shape[0] == 0:
        return S
    K = kernel(F, M)
    return Subspace.span(F, S.ambient, [apply(F, S.embedding_matrix, a) for a in K.basis])


def preimage(F: GF, M: np.ndarray, S: Subspace) -> Subspace:
    """{v : M v in S}."""
    M = np.asarray(M, dtype=np.int64)
    if S.codim == 0:
        return Subspace.full(F, M.shape[1])
    return kernel(F, matmul(F, S.quotient_matrix, M))


def image_of(F: GF, M: np.ndarray, S: Subspace) -> Subspace:
    """M(S) in codomain coordinates."""
    M = np.asarray(M, dtype=np.int64)
    return Subspace.span(F, M.shape[0], [apply(F, M, row) for row in S.basis])


def annihilator(S: Subspace) -> Subspace:
    """{phi : phi(w) = 0 for all w in S} in the dual (standard) coordinates."""
    if S.dim == 0:
        return Subspace.full(S.F, S.ambient)
    return kernel(S.F, S.matrix)


def gaussian_binomial(q: int, n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enumerate_subspaces(F: GF, ambient: int, dim: int) -> list[Subspace]:
    """All dim-dimensional subspaces of F_q^ambient, each exactly once."""
    if not 0 <= dim <= ambient <= SUBSPACE_AMBIENT_CAP:
        raise DomainError(f"subspace enumeration needs 0 <= {dim} <= {ambient} <= {SUBSPACE_AMBIENT_CAP}")
    out = []
    for pivots in itertools.combinations(range(ambient), dim):
        slots = [(i, c) for i, p in enumerate(pivots) for c in range(p + 1, ambient) if c not in pivots]
        for values in itertools.product(range(F.q), repeat=len(slots)):
            R = np.zeros((dim, ambient), dtype=np.int64)
            for i, p in enumerate(pivots):
                R[i, p] = 1
            for (i, c), x in zip(slots, values):
                R[i, c] = x
            out.append(Subspace(F.q, ambient, tuple(tuple(int(x) for x in row) for row in R), F))
    return out


def all_subspaces(F: GF, ambient: int) -> list[Subspace]:
    return [S for k in range(ambient + 1) for S in enumerate_subspaces(F, ambient, k)]


# ----------------------------------------------------- quotient-frame maps


def lift(F: GF, A: np.ndarray, V1: Subspace, W1: Subspace) -> np.ndarray:
    """A in L(V/V1, W1) as the map V -> W it induces (kernel >= V1, image <= W1)."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape != (W1.dim, V1.codim):
        raise ContractError(f"map of shape {A.shape} is not in L(V/V1, W1) = {(W1.dim, V1.codim)}")
    return matmul(F, matmul(F, W1.embedding_matrix, A), V1.quotient_matrix)


def pushdown(F: GF, X: np.ndarray, W1: Subspace, V1: Subspace) -> np.ndarray:
    """X(W1, V/V1): restrict X : W -> V to W1 and compose with V -> V/V1."""
    X = np.asarray(X, dtype=np.int64)
    if X.shape != (V1.ambient, W1.ambient):
        raise ContractError(f"map of shape {X.shape} is not in L(W, V)")
    return matmul(F, matmul(F, V1.quotient_matrix, X), W1.embedding_matrix)


def lift_inverse(F: GF, M: np.ndarray, V1: Subspace, W1: Subspace) -> np.ndarray:
    """Inverse of ``lift`` on maps that kill V1 and land in W1."""
    M = np.asarray(M, dtype=np.int64)
    if matmul(F, M, V1.embedding_matrix).any():
        raise ContractError("map does not vanish on V1")
    if not W1.contains_subspace(image(F, M)):
        raise ContractError("image of map is not inside W1")
    return matmul(F, matmul(F, W1.coords_matrix, M), V1.section_matrix)


def local_subspace(outer: Subspace, inner: Subspace) -> Subspace:
    """inner <= outer expressed in the RREF coordinates of outer."""
    if not outer.contains_subspace(inner):
        raise ContractError("subspace is not contained in the ambient subspace")
    F = outer.F
    return Subspace.span(F, outer.dim, [apply(F, outer.coords_matrix, v) for v in inner.basis])


def quotient_image(quot: Subspace, S: Subspace) -> Subspace:
    """(S + quot)/quot as a subspace of ambient/quot in the canonical frame."""
    F = quot.F
    return Subspace.span(F, quot.codim, [apply(F, quot.quotient_matrix, v) for v in S.basis])


def quotient_preimage(quot: Subspace, S: Subspace) -> Subspace:
    """The subspace of the ambient space mapping onto S <= ambient/quot."""
    return preimage(quot.F, quot.quotient_matrix, S)


def sandwich(
    F: GF,
    M: np.ndarray,
    dom_sub: Subspace,
    dom_quot: Subspace,
    cod_sub: Subspace,
    cod_quot: Subspace,
) -> np.ndarray:
    """The map dom_sub/dom_quot -> cod_sub/cod_quot, v + dom_quot -> M v + cod_quot.

    Coordinates: dom_sub and cod_sub use their RREF coordinates, and the
    quotients inside them use the canonical non-pivot frame.
    """
    M = np.asarray(M, dtype=np.int64)
    if not dom_sub.contains_subspace(dom_quot):
        raise ContractError("dom_quot is not contained in dom_sub")
    if not cod_sub.contains_subspace(cod_quot):
        raise ContractError("cod_quot is not contained in cod_sub")
    if not cod_sub.contains_subspace(image_of(F, M, dom_sub)):
        raise ContractError("M(dom_sub) is not contained in cod_sub")
    if not cod_quot.contains_subspace(image_of(F, M, dom_quot)):
        raise ContractError("M(dom_quot) is not contained in cod_quot")
    dq = local_subspace(dom_sub, dom_quot)
    cq = local_subspace(cod_sub, cod_quot)
    out = matmul(F, dom_sub.embedding_matrix, dq.section_matrix)
    out = matmul(F, M, out)
    out = matmul(F, cod_sub.coords_matrix, out)
    return matmul(F, cq.quotient_matrix, out)


def restrict_to(F: GF, A: np.ndarray, V1: Subspace, W1: Subspace) -> np.ndarray:
    """A(V1, W/W1): restrict A : V -> W to V1 and project to W/W1."""
    A = np.asarray(A, dtype=np.int64)
    return sandwich(F, A, V1, Subspace.zero(F, A.shape[1]), Subspace.full(F, A.shape[0]), W1)


# ------------------------------------------------------------------- poset


def poset_leq(F: GF, X: np.ndarray, Y: np.ndarray) -> bool:
    """X <= Y iff rank(Y) = rank(X) + rank(Y - X)."""
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    if X.shape != Y.shape:
        raise ContractError(f"shape mismatch {X.shape} vs {Y.shape}")
    return rank(F, Y) == rank(F, X) + rank(F, matsub(F, Y, X))


def poset_leq_by_agreement(F: GF, X: np.ndarray, Y: np.ndarray) -> bool:
    """Im(X) <= Im(Y) and X agrees with Y on Y^{-1}(Im X)."""
    imX = image(F, X)
    if not image(F, Y).contains_subspace(imX):
        return False
    P = preimage(F, Y, imX)
    if P.dim == 0:
        return True
    D = matsub(F, X, Y)
    return not matmul(F, D, P.embedding_matrix).any()


# ---------------------------------------------------------------- text I/O


def format_matrix(F: GF, M: np.ndarray) -> str:
    M = np.asarray(M)
    entries = ",".join(str(int(x)) for x in M.reshape(-1))
    return f"{F.q};{M.shape[0]};{M.shape[1]};{entries}"


def parse_matrix(text: str) -> tuple[int, np.ndarray]:
    """Parse ``q;rows;cols;e11,e12,...`` (row-major); returns (q, matrix)."""
    parts = text.strip().split(";")
    if len(parts) != 4:
        raise DomainError(f"malformed matrix text {text!r}")
    q, rows, cols = (int(x) for x in parts[:3])
    vals = [int(x) for x in parts[3].split(",")] if parts[3] else []
    if len(vals) != rows * cols or any(not 0 <= v < q for v in vals):
        raise DomainError(f"matrix text {text!r} has bad entries")
    return q, np.array(vals, dtype=np.int64).reshape(rows, cols)
