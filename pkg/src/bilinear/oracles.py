"""Brute-force oracles and exhaustive checkers.

Nothing here goes through the fast transform.  The naive transform builds the
full character table from traces; the linear-algebra lemmas are checked by
direct subspace arithmetic.  Each checker runs every configuration when the
count is below ``limit`` and otherwise draws ``samples`` seeded ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import linalg
from .linalg import Subspace
from .spaces import BilinearSpace, bilinear_space

EXHAUSTIVE_LIMIT = 10**7


@dataclass
class LemmaReport:
    lemma_id: str
    mode: str = "exhaustive"
    seed: int | None = None
    instances: int = 0
    configurations: int = 0
    failures: int = 0
    max_err: float = 0.0
    first_failure: dict | None = None
    tol: float = 1e-9

    def record(self, ok: bool, err: float = 0.0, detail=None) -> None:
        self.instances += 1
        self.max_err = max(self.max_err, float(err))
        if not ok:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = detail if isinstance(detail, dict) else {"detail": repr(detail)}

    def record_err(self, err: float, detail=None) -> None:
        self.record(err < self.tol, err, detail)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.instances > 0

    def as_dict(self) -> dict:
        out = {"lemma_id": self.lemma_id, "instances_checked": self.instances,
               "configurations": max(self.configurations, self.instances), "max_err": self.max_err,
               "failures": self.failures, "mode": self.mode, "pass": self.passed}
        if self.seed is not None:
            out["seed"] = self.seed
        if self.first_failure is not None:
            out["first_failure"] = self.first_failure
        return out


def _plan(configs: list, samples: int, seed: int, limit: int, mode: str, name: str):
    """Either the full list or a seeded sample of it."""
    if mode == "exhaustive" or (mode == "auto" and len(configs) < limit):
        return configs, LemmaReport(name, "exhaustive", configurations=len(configs))
    rng = np.random.default_rng(seed)
    pick = rng.integers(len(configs), size=samples)
    return [configs[i] for i in pick], LemmaReport(name, "sampled", seed, configurations=samples)


# --------------------------------------------------------------- naive transform


@lru_cache(maxsize=None)
def naive_character_table(space: BilinearSpace) -> np.ndarray:
    """table[X, A] = omega^{tau(Tr(X A))}, straight from the definition."""
    F = space.F
    X = space.dual.matrices  # (N, n, m)
    A = space.dom.matrices  # (N, m, n)
    table = np.empty((space.N, space.N), dtype=complex)
    omega = np.exp(2j * np.pi / F.p)
    for k in range(space.N):
        prods = linalg.matmul(F, X[k][None], A)  # (N, n, n)
        tr = np.zeros(space.N, dtype=np.int64)
        for i in range(space.n):
            tr = F.add[tr, prods[:, i, i]]
        table[k] = omega ** F.trace_table[tr]
    return table


def naive_transform_oracle(space: BilinearSpace, values: np.ndarray) -> np.ndarray:
    """fhat(X) = E_A f(A) conj(u_X(A)) by O(N^2) inner products."""
    table = naive_character_table(space)
    return table.conj() @ np.asarray(values, dtype=complex) / space.N


def naive_inverse_oracle(space: BilinearSpace, coeffs: np.ndarray) -> np.ndarray:
    return naive_character_table(space).T @ np.asarray(coeffs, dtype=complex)


# --------------------------------------------------------------- helpers


def _F(space):
    return space.F


def _im(F, M) -> Subspace:
    return linalg.image(F, M)


def _ker(F, M) -> Subspace:
    return linalg.kernel(F, M)


def _leq(F, X, Y) -> bool:
    return linalg.poset_leq(F, X, Y)


def _nested(lat):
    return [(a, b) for a in lat.subspaces for b in lat.subspaces if b.contains_subspace(a)]


def _direct_sum_complements(lat, inner: Subspace, outer: Subspace):
    """U <= outer with U & inner = 0 and U + inner = outer."""
    zero = lat.zero()
    return [U for U in lat.subspaces
            if outer.contains_subspace(U) and U.dim + inner.dim == outer.dim and (U & inner) == zero]


# ---------------------------------------------------------- trace lemma


def check_trace_lemma(space: BilinearSpace, mode="auto", samples=1000, seed=0, limit=EXHAUSTIVE_LIMIT) -> LemmaReport:
    """Tr(A . X(W1, V/V1)) = Tr(A(V,W) . X)."""
    F = space.F
    configs = []
    for V1 in space.V.subspaces:
        for W1 in space.W.subspaces:
            loc = space.local(V1, W1)
            for a in range(loc.N):
                for x in range(space.N):
                    configs.append((V1, W1, a, x))
    todo, rep = _plan(configs, samples, seed, limit, mode, "trace_lemma")
    for V1, W1, a, x in todo:
        loc = space.local(V1, W1)
        A = loc.dom.matrix(a)
        X = space.dual.matrix(x)
        left = linalg.trace_of(F, linalg.matmul(F, A, linalg.pushdown(F, X, W1, V1)))
        right = linalg.trace_of(F, linalg.matmul(F, linalg.lift(F, A, V1, W1), X))
        rep.record(left == right, 0.0 if left == right else 1.0, {"V1": V1.basis, "W1": W1.basis, "A": a, "X": x})
    return rep


# ---------------------------------------------------- equivalence lemma


def hybrid_condition(F, X, V1: Subspace, W1: Subspace) -> bool:
    """Im X >= V1 and X^{-1}(V1) <= W1."""
    return _im(F, X).contains_subspace(V1) and W1.contains_subspace(linalg.preimage(F, X, V1))


def check_equivalence_lemma(space: BilinearSpace, mode="auto", samples=1000, seed=0, limit=EXHAUSTIVE_LIMIT) -> LemmaReport:
    """For V2 <= V1, W1 <= W2: the hybrid condition for (V1, W1) splits through (V2, W2)."""
    F = space.F
    configs = [(V2, V1, W1, W2, x) for (V2, V1) in _nested(space.V) for (W1, W2) in _nested(space.W)
               for x in range(space.N)]
    todo, rep = _plan(configs, samples, seed, limit, mode, "equivalence_lemma")
    for V2, V1, W1, W2, x in todo:
        X = space.dual.matrix(x)
        one = hybrid_condition(F, X, V1, W1)
        a = _im(F, X).contains_subspace(V2)
        b = W2.contains_subspace(linalg.preimage(F, X, V2))
        two = a and b
        if two:
            Y = linalg.pushdown(F, X, W2, V2)
            V1l = linalg.quotient_image(V2, V1)
            W1l = linalg.local_subspace(W2, W1)
            two = hybrid_condition(F, Y, V1l, W1l)
        rep.record(one == two, 0.0 if one == two else 1.0, {"X": x, "V1": V1.basis, "V2": V2.basis})
    return rep


# ---------------------------------------------------- unique triple lemma


def triple_recipe(F, Y, V1: Subspace, W1: Subspace):
    """(W1 + Y^{-1}(V1), Y(W1) & V1, Y pushed down to that pair)."""
    W2 = W1 + linalg.preimage(F, Y, V1)
    V2 = linalg.image_of(F, Y, W1) & V1
    Y2 = linalg.pushdown(F, Y, W2, V2)
    return W2, V2, Y2


def _triple_ok(F, Y, V1, W1, W2, V2, Xloc) -> bool:
    """Every clause for a candidate (W2, V2, X), X given in L(W2, V/V2) coordinates."""
    if not (W2.contains_subspace(W1) and V1.contains_subspace(V2)):
        return False
    if not W2.contains_subspace(linalg.preimage(F, Y, V2)):
        return False
    target = linalg.quotient_image(V2, V1)
    if _im(F, Xloc) != target or _ker(F, Xloc) != linalg.local_subspace(W2, W1):
        return False
    return _leq(F, Xloc, linalg.pushdown(F, Y, W2, V2))


def check_unique_triple_lemma(space: BilinearSpace, mode="auto", samples=1000, seed=0, limit=EXHAUSTIVE_LIMIT) -> LemmaReport:
    """Exactly one (W2, V2, X) satisfies the clauses, and the recipe builds it."""
    F = space.F
    configs = []
    for V1 in space.V.subspaces:
        for W1 in space.W.subspaces:
            for y in range(space.N):
                if (space.W.contains[space.W.index[W1], space.dual.kernel_ids[y]]
                        and space.V.contains[space.dual.image_ids[y], space.V.index[V1]]):
                    configs.append((V1, W1, y))
    todo, rep = _plan(configs, samples, seed, limit, mode, "unique_triple_lemma")
    for V1, W1, y in todo:
        Y = space.dual.matrix(y)
        found = []
        for W2 in space.W.subspaces:
            if not W2.contains_subspace(W1):
                continue
            for V2 in space.V.subspaces:
                if not V1.contains_subspace(V2):
                    continue
                if not W2.contains_subspace(linalg.preimage(F, Y, V2)):
                    continue
                loc = bilinear_space(F, V2.codim, W2.dim)
                target = loc.V.index[linalg.quotient_image(V2, V1)]
                kern = loc.W.index[linalg.local_subspace(W2, W1)]
                cands = np.nonzero((loc.dual.image_ids == target) & (loc.dual.kernel_ids == kern))[0]
                Y2 = linalg.pushdown(F, Y, W2, V2)
                for c in cands:
                    Xl = loc.dual.matrix(int(c))
                    if _leq(F, Xl, Y2):
                        found.append((W2, V2, int(c)))
        ok = len(found) == 1
        if ok:
            W2, V2, c = found[0]
            rW2, rV2, _ = triple_recipe(F, Y, V1, W1)
            ok = (W2 == rW2 and V2 == rV2
                  and _triple_ok(F, Y, V1, W1, W2, V2, bilinear_space(F, V2.codim, W2.dim).dual.matrix(c)))
        rep.record(ok, 0.0 if ok else 1.0, {"Y": y, "V1": V1.basis, "W1": W1.basis, "found": len(found)})
    return rep


# ---------------------------------------------------- swapping lemmas


def _swap_frame_ok(F, Y, X, V1, W1, V2, W2) -> bool:
    """X <= Y, Im(Y(W1, V/V1)) >= V2/V1 and its preimage of V2/V1 lies in W2."""
    if not _leq(F, X, Y):
        return False
    Y1 = linalg.pushdown(F, Y, W1, V1)
    V2l = linalg.quotient_image(V1, V2)
    W2l = linalg.local_subspace(W1, W2)
    return hybrid_condition(F, Y1, V2l, W2l)


def _swap_configs(space):
    F = space.F
    out = []
    full = space.full_W()
    for x in range(space.N):
        X = space.dual.matrix(x)
        V1, W1 = _im(F, X), _ker(F, X)
        for V2 in space.V.subspaces:
            if not V2.contains_subspace(V1):
                continue
            for W2 in space.W.subspaces:
                if W1.contains_subspace(W2):
                    out.append((x, V1, W1, V2, W2))
    return out


def check_swapping_lemmas(space: BilinearSpace, mode="auto", samples=1000, seed=0, limit=EXHAUSTIVE_LIMIT) -> list[LemmaReport]:
    """Both directions of the (V3, W3) correspondence.

    Forward: any (V3, W3) meeting the hypotheses forces the frame conditions
    and equals (Im(Y-X) & V2, Ker(Y-X) + W2).
    Backward: when the frame conditions hold, that recipe meets the hypotheses.
    """
    F = space.F
    full = space.full_W()
    base = _swap_configs(space)
    configs = [(b, y) for b in base for y in range(space.N)]
    todo, fwd = _plan(configs, samples, seed, limit, mode, "swap_forward")
    bwd = LemmaReport("swap_backward", fwd.mode, fwd.seed, configurations=fwd.configurations)
    for (x, V1, W1, V2, W2), y in todo:
        X = space.dual.matrix(x)
        Y = space.dual.matrix(y)
        D = linalg.matsub(F, Y, X)
        rV3 = _im(F, D) & V2
        rW3 = _ker(F, D) + W2
        # forward direction
        for V3 in _direct_sum_complements(space.V, V1, V2):
            for W3 in space.W.subspaces:
                if not (W3.contains_subspace(W2) and (W3 & W1) == W2 and (W3 + W1) == full):
                    continue
                if not hybrid_condition(F, Y, V3, W3):
                    continue
                if not _leq(F, linalg.pushdown(F, X, W3, V3), linalg.pushdown(F, Y, W3, V3)):
                    continue
                ok = _swap_frame_ok(F, Y, X, V1, W1, V2, W2) and V3 == rV3 and W3 == rW3
                fwd.record(ok, 0.0 if ok else 1.0, {"X": x, "Y": y, "V3": V3.basis, "W3": W3.basis})
        # backward direction
        if _swap_frame_ok(F, Y, X, V1, W1, V2, W2):
            ok = (rV3.dim + V1.dim == V2.dim and (rV3 & V1) == space.zero_V() and V2.contains_subspace(rV3)
                  and (rW3 & W1) == W2 and (rW3 + W1) == full
                  and hybrid_condition(F, Y, rV3, rW3)
                  and _leq(F, linalg.pushdown(F, X, rW3, rV3), linalg.pushdown(F, Y, rW3, rV3)))
            bwd.record(ok, 0.0 if ok else 1.0, {"X": x, "Y": y})
    return [fwd, bwd]


# --------------------------------------------------------------- trichotomy


def check_trichotomy(space: BilinearSpace, mode="auto", samples=1000, seed=0, limit=EXHAUSTIVE_LIMIT) -> LemmaReport:
    """For Y + Z = X: shared nonzero image, or kernels not spanning W, or a rank-additive split.

    The third clause is searched exhaustively over Y' <= Y with Z' = X - Y'.
    Images are compared against {0}: reading the first clause as literally
    "nonempty" would make it always true.
    """
    F = space.F
    dual = space.dual
    ranks = dual.ranks
    idx = np.arange(space.N)
    configs = [(x, y) for x in range(space.N) for y in range(space.N)]
    todo, rep = _plan(configs, samples, seed, limit, mode, "trichotomy")
    zeroV = space.zero_V()
    full = space.full_W()
    for x, y in todo:
        z = int(dual.sub_indices(np.array(x), np.array(y)))
        X, Y, Z = dual.matrix(x), dual.matrix(y), dual.matrix(z)
        c1 = (_im(F, X) & _im(F, Y) & _im(F, Z)) != zeroV
        c2 = (_ker(F, X) + _ker(F, Y) + _ker(F, Z)) != full
        c3 = False
        if not (c1 or c2):
            yp = idx
            zp = dual.sub_indices(np.full(space.N, x), yp)
            below_y = ranks[y] == ranks[yp] + ranks[dual.sub_indices(np.full(space.N, y), yp)]
            below_z = ranks[z] == ranks[zp] + ranks[dual.sub_indices(np.full(space.N, z), zp)]
            split = ranks[x] == ranks[yp] + ranks[zp]
            c3 = bool((below_y & below_z & split).any())
        ok = c1 or c2 or c3
        rep.record(ok, 0.0 if ok else 1.0, {"X": x, "Y": y})
    return rep


# ------------------------------------------------ operator identities


def _random_functions(space, rng, k):
    return rng.normal(size=(space.N, k)) + 1j * rng.normal(size=(space.N, k))


def _naive_pure(space, values, d):
    coeffs = naive_transform_oracle(space, values)
    mask = (space.dual.ranks == d).reshape((-1,) + (1,) * (coeffs.ndim - 1))
    return naive_inverse_oracle(space, coeffs * mask)


def check_character_restriction(space: BilinearSpace, mode="auto", samples=500, seed=0, limit=EXHAUSTIVE_LIMIT) -> LemmaReport:
    """(u_X)_{(V1,W1)->T} = u_X(T) u_{X(W1, V/V1)}, all from the trace table."""
    F = space.F
    configs = [(V1, W1, int(t)) for V1 in space.V.subspaces for W1 in space.W.subspaces
               for t in space.coset_representatives(V1, W1)]
    todo, rep = _plan(configs, samples, seed, limit, mode, "character_restriction")
    table = naive_character_table(space)
    for V1, W1, t in todo:
        loc = space.local(V1, W1)
        loc_table = naive_character_table(loc)
        pts = space.dom.translate(space.lift_indices(V1, W1), t)
        push = space.pushdown_indices(V1, W1)
        lhs = table[:, pts]
        rhs = table[:, t][:, None] * loc_table[push]
        rep.record_err(float(np.max(np.abs(lhs - rhs))), {"V1": V1.basis, "W1": W1.basis, "T": t})
    return rep


def check_restricted_spectrum(space: BilinearSpace, mode="auto", samples=500, seed=0, limit=EXHAUSTIVE_LIMIT) -> LemmaReport:
    """Spectrum of a restriction from the ambient spectrum, against the naive transform."""
    from .fourier import restricted_spectrum, transform

    rng = np.random.default_rng(seed)
    f = _random_functions(space, rng, 3)
    coeffs = transform(space, f)
    configs = [(V1, W1, int(t)) for V1 in space.V.subspaces for W1 in space.W.subspaces
               for t in space.coset_representatives(V1, W1)]
    todo, rep = _plan(configs, samples, seed, limit, mode, "restricted_spectrum")
    for V1, W1, t in todo:
        loc = space.local(V1, W1)
        pts = space.dom.translate(space.lift_indices(V1, W1), t)
        direct = naive_transform_oracle(loc, f[pts])
        fast = restricted_spectrum(space, coeffs, V1, W1, t)
        rep.record_err(float(np.max(np.abs(direct - fast))), {"V1": V1.basis, "W1": W1.basis, "T": t})
    return rep


def check_degree_reduction(space: BilinearSpace, mode="auto", samples=500, seed=0, limit=EXHAUSTIVE_LIMIT) -> list[LemmaReport]:
    """Derivatives of order i send degree-d parts to degree-(d-i) parts."""
    from .laplacians import derivative, derivative_X, derivative_frame_X

    rng = np.random.default_rng(seed)
    f = _random_functions(space, rng, 2)
    top = min(space.n, space.m)
    pure = {d: _naive_pure(space, f, d) for d in range(top + 1)}
    hyb_cfg = [(V1, W1, int(t), d) for V1 in space.V.subspaces for W1 in space.W.subspaces
               for t in space.coset_representatives(V1, W1) for d in range(top + 1)]
    todo, rep_h = _plan(hyb_cfg, samples, seed, limit, mode, "degree_reduction_hybrid")
    for V1, W1, t, d in todo:
        loc = space.local(V1, W1)
        i = V1.dim + W1.codim
        lhs = derivative(space, pure[d], V1, W1, t)
        whole = derivative(space, f, V1, W1, t)
        rhs = _naive_pure(loc, whole, d - i) if d >= i else np.zeros_like(lhs)
        rep_h.record_err(float(np.max(np.abs(lhs - rhs))), {"V1": V1.basis, "W1": W1.basis, "T": t, "d": d})

    x_cfg = [(x, int(t), d) for x in range(space.N) for d in range(top + 1)
             for t in space.coset_representatives(*derivative_frame_X(space, x))]
    todo, rep_x = _plan(x_cfg, samples, seed + 1, limit, mode, "degree_reduction_poset")
    for x, t, d in todo:
        V1, W1 = derivative_frame_X(space, x)
        loc = space.local(V1, W1)
        r = int(space.dual.ranks[x])
        lhs = derivative_X(space, pure[d], x, t)
        whole = derivative_X(space, f, x, t)
        rhs = _naive_pure(loc, whole, d - r) if d >= r else np.zeros_like(lhs)
        rep_x.record_err(float(np.max(np.abs(lhs - rhs))), {"X": x, "T": t, "d": d})
    return [rep_h, rep_x]


def _one_step_units(space):
    out = []
    if space.n >= 2:
        out += [("V", U) for U in space.V.of_dim(1)]
    if space.m >= 2:
        out += [("W", U) for U in space.W.of_dim(space.m - 1)]
    return out


def check_tee_identities(space: BilinearSpace, mode="auto", samples=500, seed=0, limit=EXHAUSTIVE_LIMIT) -> list[LemmaReport]:
    """The three one-step identities, with the averaging operators computed directly.

    L_U[f^{=i}] = f^{=i} - q^i E_U[f^{=i}];
    (T_{i,U} f)^{=i} = L_U[f^{=i}] and (T_{i,U} f)^{=i-1} = L_U[f^{=i-1}];
    D_{U,T}[f^{=i}] = ((T_{i,U} f)_{U->T})^{=i-1}.
    """
    from .laplacians import avg_U, laplacian_U, one_step_pair, order_one_derivative, tee_operator

    rng = np.random.default_rng(seed)
    f = _random_functions(space, rng, 2)
    q = space.q
    top = min(space.n, space.m)
    pure = {d: _naive_pure(space, f, d) for d in range(top + 1)}
    units = _one_step_units(space)
    cfg = [(side, U, i) for side, U in units for i in range(1, top + 1)]
    todo, r71 = _plan(cfg, samples, seed, limit, mode, "homogeneous_laplacian")
    r72 = LemmaReport("tee_projection", r71.mode, r71.seed, configurations=r71.configurations)
    tees = {}
    for side, U, i in todo:
        fi = pure[i]
        lhs = laplacian_U(space, fi, side, U)
        rhs = fi - q**i * avg_U(space, fi, side, U, method="direct")
        r71.record_err(float(np.max(np.abs(lhs - rhs))), {"side": side, "U": U.basis, "i": i})
        tee = tee_operator(space, f, i, side, U, method="direct")
        tees[(side, U, i)] = tee
        e1 = float(np.max(np.abs(_naive_pure(space, tee, i) - laplacian_U(space, fi, side, U))))
        e2 = float(np.max(np.abs(_naive_pure(space, tee, i - 1) - laplacian_U(space, pure[i - 1], side, U))))
        r72.record_err(max(e1, e2), {"side": side, "U": U.basis, "i": i})

    cfg3 = []
    for side, U in units:
        V1, W1 = one_step_pair(space, side, U)
        for i in range(1, top + 1):
            for t in space.coset_representatives(V1, W1):
                cfg3.append((side, U, i, int(t)))
    todo3, r73 = _plan(cfg3, samples, seed + 2, limit, mode, "one_step_derivative")
    for side, U, i, t in todo3:
        V1, W1 = one_step_pair(space, side, U)
        loc = space.local(V1, W1)
        tee = tees.get((side, U, i))
        if tee is None:
            tee = tee_operator(space, f, i, side, U, method="direct")
        lhs = order_one_derivative(space, pure[i], side, U, t)
        pts = space.dom.translate(space.lift_indices(V1, W1), t)
        rhs = _naive_pure(loc, tee[pts], i - 1)
        r73.record_err(float(np.max(np.abs(lhs - rhs))), {"side": side, "U": U.basis, "i": i, "T": t})
    return [r71, r72, r73]


def check_averaging_multipliers(space: BilinearSpace) -> list[LemmaReport]:
    """Direct averaging against the q^{-rank} multipliers, every v and every W'."""
    from .laplacians import avg_v, avg_v_spectral, avg_W, avg_W_spectral

    rng = np.random.default_rng(0)
    f = _random_functions(space, rng, 2)
    rv = LemmaReport("average_over_v", tol=1e-10)
    rw = LemmaReport("average_over_hyperplane_of_W", tol=1e-10)
    if space.n >= 2:
        for code in range(1, space.q**space.n):
            v = np.array([(code // space.q**k) % space.q for k in range(space.n)])
            rv.record_err(float(np.max(np.abs(avg_v(space, f, v) - avg_v_spectral(space, f, v)))), {"v": v.tolist()})
    if space.m >= 2:
        for Wp in space.W.of_dim(space.m - 1):
            rw.record_err(float(np.max(np.abs(avg_W(space, f, Wp) - avg_W_spectral(space, f, Wp)))), {"W'": Wp.basis})
    return [rv, rw]


def lemma_suite(space: BilinearSpace, mode="auto", samples=1000, seed=0, limit=EXHAUSTIVE_LIMIT) -> list[LemmaReport]:
    kw = dict(mode=mode, samples=samples, seed=seed, limit=limit)
    return ([check_trace_lemma(space, **kw), check_equivalence_lemma(space, **kw),
             check_unique_triple_lemma(space, **kw)] + check_swapping_lemmas(space, **kw)
            + [check_trichotomy(space, **kw)])


def operator_suite(space: BilinearSpace, mode="auto", samples=500, seed=0, limit=EXHAUSTIVE_LIMIT) -> list[LemmaReport]:
    kw = dict(mode=mode, samples=samples, seed=seed, limit=limit)
    return ([check_character_restriction(space, **kw), check_restricted_spectrum(space, **kw)]
            + check_degree_reduction(space, **kw) + check_tee_identities(space, **kw))
