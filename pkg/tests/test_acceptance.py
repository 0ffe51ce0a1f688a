"""Acceptance criteria 1-10, one PASS/FAIL line each.

The lines are collected in RESULTS and printed in the pytest terminal
summary; ``python3 tests/test_acceptance.py`` prints them directly.
"""

import itertools
import math
import sys
import time

import numpy as np
import pytest

from bilinear import cube as C
from bilinear import expansion as E
from bilinear import fourier as Fr
from bilinear import globalness as G
from bilinear import laplacians as L
from bilinear import oracles as O
from bilinear.field import get_field
from bilinear.spaces import bilinear_space

RESULTS: dict[int, str] = {}


def space(q, n, m):
    return bilinear_space(get_field(q), n, m)


def record(num, title, ok, detail):
    RESULTS[num] = f"{'PASS' if ok else 'FAIL'} criterion {num:>2} {title}: {detail}"
    print(RESULTS[num])
    return ok


def dims_up_to(nmax, mmax):
    return [(n, m) for n in range(1, nmax + 1) for m in range(1, mmax + 1)]


# ------------------------------------------------------------------ 1


def criterion_1():
    t0 = time.perf_counter()
    worst_orth = worst_pars = 0.0
    cases = 0
    rng = np.random.default_rng(1)
    for q in (2, 3, 4):
        for n, m in [(n, m) for n in range(1, 5) for m in range(1, 5) if n * m <= 4]:
            sp = space(q, n, m)
            U = np.array([Fr.character(sp, x) for x in range(sp.N)])
            gram = U.conj() @ U.T / sp.N
            worst_orth = max(worst_orth, float(np.max(np.abs(gram - np.eye(sp.N)))))
            f = rng.normal(size=sp.N) + 1j * rng.normal(size=sp.N)
            c = Fr.transform(sp, f)
            worst_pars = max(worst_pars, abs(float(np.mean(np.abs(f) ** 2) - np.sum(np.abs(c) ** 2))))
            cases += 1
    dt = time.perf_counter() - t0
    ok = worst_orth < 1e-9 and worst_pars < 1e-9 and dt < 10
    return record(1, "character orthonormality and Parseval", ok,
                  f"{cases} spaces, max gram dev {worst_orth:.2e}, max Parseval dev {worst_pars:.2e}, {dt:.1f}s")


# ------------------------------------------------------------------ 2


def desk_naive_spaces():
    # the naive oracle is a direct method; q=3 at 3x3 (19683 points) is beyond the direct cap
    out = []
    for q in (2, 3):
        for n, m in dims_up_to(3, 3):
            if q ** (n * m) <= 4096:
                out.append((q, n, m))
    return out


def criterion_2():
    t0 = time.perf_counter()
    worst = 0.0
    cases = desk_naive_spaces()
    for k, (q, n, m) in enumerate(cases):
        sp = space(q, n, m)
        rng = np.random.default_rng(100 + k)
        f = rng.normal(size=(sp.N, 100)) + 1j * rng.normal(size=(sp.N, 100))
        worst = max(worst, float(np.max(np.abs(Fr.transform(sp, f) - O.naive_transform_oracle(sp, f)))))
    dt = time.perf_counter() - t0
    return record(2, "fast transform equals naive oracle", worst < 1e-10 and dt < 30,
                  f"{len(cases)} (q,dims) x 100 functions, max err {worst:.2e}, {dt:.1f}s")


# ------------------------------------------------------------------ 3


def criterion_3():
    sp = space(2, 2, 2)
    worst = 0.0
    mean_ok = True
    count = 0
    vecs = list(itertools.product(range(2), repeat=2))
    for v in vecs[1:]:
        for w in vecs:
            f = Fr.dictator(sp, v, w)
            worst = max(worst, float(np.max(np.abs(Fr.transform(sp, f) - Fr.dictator_spectrum(sp, v, w)))))
            mean_ok &= f.mean() == 1 / 2**sp.m
            count += 1
    for phi in vecs[1:]:
        for psi in vecs:
            f = Fr.dual_dictator(sp, phi, psi)
            worst = max(worst, float(np.max(np.abs(Fr.transform(sp, f) - Fr.dual_dictator_spectrum(sp, phi, psi)))))
            mean_ok &= f.mean() == 1 / 2**sp.n
            count += 1
    return record(3, "dictator expansions", worst < 1e-10 and mean_ok,
                  f"{count} dictators, max err {worst:.2e}, means exact: {mean_ok}")


# ------------------------------------------------------------------ 4


def criterion_4():
    t0 = time.perf_counter()
    sp = space(2, 2, 2)
    exhaustive = [r.as_dict() for r in L.verify_composition_calculus(sp, exhaustive=True)]
    exhaustive += [r.as_dict() for r in O.operator_suite(sp, mode="exhaustive")]
    sampled = []
    for q, n, m in [(2, 2, 3), (2, 3, 2), (3, 2, 2)]:
        sp = space(q, n, m)
        sampled += [r.as_dict() for r in L.verify_composition_calculus(sp, exhaustive=False, samples=500, seed=4)]
        sampled += [r.as_dict() for r in O.operator_suite(sp, mode="sample", samples=500, seed=4)]
    dt = time.perf_counter() - t0
    rows = exhaustive + sampled
    fewest = min(r["instances_checked"] for r in sampled)
    worst = max(r["max_err"] for r in rows)
    ok = all(r["pass"] for r in rows) and worst < 1e-9 and dt < 300 and fewest >= 500
    bad = [r["lemma_id"] for r in rows if not r["pass"]]
    return record(4, "operator calculus", ok,
                  f"{len(exhaustive)} exhaustive and {len(sampled)} sampled identity runs (fewest sampled instances "
                  f"{fewest}), max err {worst:.2e}, {dt:.1f}s" + (f", failing {bad}" if bad else ""))


# ------------------------------------------------------------------ 5


def criterion_5():
    t0 = time.perf_counter()
    rows = [r.as_dict() for r in O.lemma_suite(space(2, 2, 2), mode="exhaustive")]
    for q, n, m in [(2, 2, 3), (2, 3, 2), (2, 3, 3), (3, 2, 2)]:
        rows += [r.as_dict() for r in O.lemma_suite(space(q, n, m), mode="sample", samples=1000, seed=5)]
    dt = time.perf_counter() - t0
    enough = all(r["mode"] == "exhaustive" or r["configurations"] >= 1000 for r in rows)
    ok = all(r["pass"] for r in rows) and enough and dt < 300
    inst = sum(r["instances_checked"] for r in rows)
    return record(5, "linear-algebra lemmas and trichotomy", ok, f"{len(rows)} lemma runs, {inst} instances, {dt:.1f}s")


# ------------------------------------------------------------------ 6


def criterion_6():
    reps = O.check_averaging_multipliers(space(2, 2, 2))
    worst = max(r.max_err for r in reps)
    inst = sum(r.instances for r in reps)
    ok = all(r.passed for r in reps) and worst < 1e-10
    return record(6, "averaging multipliers", ok, f"{inst} (v or W') cases, max err {worst:.2e}")


# ------------------------------------------------------------------ 7


def criterion_7():
    closed_err = exact_err = adj_err = 0.0
    for q in (2, 3):
        for n, m in dims_up_to(2, 3):
            sp = space(q, n, m)
            g = E.shortcode_graph(sp)
            for x in range(sp.N):
                ray = E.rayleigh_eigenvalue(sp, x)
                d = sp.dual.ranks[x]
                closed_err = max(closed_err, abs(ray - g.closed_form[d]))
                exact_err = max(exact_err, abs(ray - g.eigenvalues[d]))
            f = np.random.default_rng(q * 10 + n * m).normal(size=(sp.N, 4))
            adj_err = max(adj_err, float(np.max(np.abs(E.adjacency_apply(sp, f) - E.adjacency_apply(sp, f, "direct")))))
    lam1 = E.closed_form_eigenvalue(2, 2, 2, 1)
    ray1 = E.rayleigh_eigenvalue(space(2, 2, 2), int(np.nonzero(space(2, 2, 2).dual.ranks == 1)[0][0]))
    ok = closed_err < 1e-12 and adj_err < 1e-12 and abs(lam1 - 1 / 3) < 1e-12 and abs(ray1 - 1 / 3) < 1e-12
    return record(7, "shortcode spectrum", ok,
                  f"closed form vs Rayleigh max err {closed_err:.3g}; exact form vs Rayleigh {exact_err:.2e}; "
                  f"spectral vs direct {adj_err:.2e}; lambda_1 closed form {lam1:.6f}, Rayleigh {ray1:.6f}")


# ------------------------------------------------------------------ 8


def battery_spaces():
    return [(2, n, m) for n, m in dims_up_to(3, 3)] + [(3, n, m) for n, m in dims_up_to(2, 2)]


def fixture_sets(sp, seed):
    sets, names = [], []
    for k in range(min(sp.n, sp.m) + 1):
        sets.append(E.rank_threshold_set(sp, k))
        names.append(f"rank<={k}")
    e1v = np.eye(sp.n, dtype=np.int64)[0]
    e1w = np.eye(sp.m, dtype=np.int64)[0]
    for w in (np.zeros(sp.m, dtype=np.int64), e1w):
        sets.append(Fr.dictator(sp, e1v, w))
        names.append("dictator")
    for psi in (np.zeros(sp.n, dtype=np.int64), e1v):
        sets.append(Fr.dual_dictator(sp, e1w, psi))
        names.append("dual-dictator")
    rng = np.random.default_rng(seed)
    dens = np.array([1 / 2, 1 / 4, 1 / 8, 1 / 16])[rng.integers(4, size=500)]
    rand = (rng.random((sp.N, 500)) < dens[None, :]).astype(float)
    return np.column_stack(sets + [rand]), names + [f"random{k}" for k in range(500)]


SHARPNESS_LOG: list[dict] = []


def criterion_8():
    t0 = time.perf_counter()
    failures = []
    checked = 0
    SHARPNESS_LOG.clear()
    for k, (q, n, m) in enumerate(battery_spaces()):
        sp = space(q, n, m)
        boolean, names = fixture_sets(sp, 800 + k)
        top = min(n, m)
        sharp = np.column_stack([np.real(Fr.sharpness_function(sp, d)) for d in range(1, top + 1)])
        for d in range(1, top + 1):
            for batch, labels in ((boolean, names), (sharp, [f"sharpness:{j}" for j in range(1, top + 1)])):
                for rep in G.inequality_battery(sp, batch, d):
                    ok = rep.passed
                    checked += ok.size
                    for j in np.nonzero(~ok)[0]:
                        failures.append((q, n, m, d, rep.name, labels[j], float(rep.ratios[j])))
        for d in range(1, top + 1):
            f = Fr.sharpness_function(sp, d)
            hyp = G.check_bilinear_hypercontractivity(sp, f, d, extras=False)
            SHARPNESS_LOG.append({"q": q, "n": n, "m": m, "d": d, "exponent": hyp.extra["observed_exponent"],
                                  "passed": hyp.passed})
            failures += [(q, n, m, d, "sharpness", "hypercontractivity", hyp.ratio)] if not hyp.passed else []
    exps = [r["exponent"] for r in SHARPNESS_LOG if r["q"] == 2]
    sup = max(exps)
    dt = time.perf_counter() - t0
    ok = not failures and 1 <= sup < math.inf
    for r in SHARPNESS_LOG:
        print(f"  sharpness q={r['q']} {r['n']}x{r['m']} d={r['d']}: observed exponent {r['exponent']:.4f}")
    return record(8, "hypercontractive inequalities on the fixture battery", ok,
                  f"{checked} inequality instances, {len(failures)} failures, sharpness exponent sup {sup:.4f} "
                  f"(q=2, dims <= 3x3), {dt:.1f}s" + (f", first failure {failures[0]}" if failures else ""))


# ------------------------------------------------------------------ 9


def cube_fixtures(cube, d, rng):
    pts = C.points(cube)
    funcs = [("random-low-degree", np.real(C.random_low_degree(cube, d, rng, real=True))) for _ in range(3)]
    gamma = np.zeros(cube.n, dtype=np.int64)
    gamma[:d] = 1
    funcs.append(("character", C.character(cube, gamma)))
    funcs.append(("dictator", (pts[:, 0] == 0).astype(float)))
    funcs.append(("subcube", np.all(pts[:, :d] == 0, axis=1).astype(float)))
    funcs.append(("random-set", (rng.random(cube.N) < 0.2).astype(float)))
    return funcs


def criterion_9():
    t0 = time.perf_counter()
    failures = []
    runs = 0
    for p in (2, 3):
        for n in range(1, 5):
            cube = C.Cube(p, n)
            rng = np.random.default_rng(90 + 10 * p + n)
            for d in range(1, min(3, n) + 1):
                for name, f in cube_fixtures(cube, d, rng):
                    g = C.low_degree(cube, f, d)
                    checks = {
                        "hypercontractivity": C.check_cube_hypercontractivity(cube, g, d).passed,
                        "influence_from_restrictions": C.check_influence_from_restrictions(cube, f, d)[0],
                        "restriction_from_influences": C.check_restriction_from_influences(cube, f, d)[0],
                        "global_bonami": C.check_global_bonami(cube, f, d).passed,
                    }
                    if np.all((f == 0) | (f == 1)) and f.any():
                        checks["small_set_expansion"] = C.check_cube_sse(cube, f, 0.5, d).passed
                    runs += len(checks)
                    failures += [(p, n, d, name, k) for k, v in checks.items() if not v]
    bonami_worst = 0.0
    rng = np.random.default_rng(9)
    for k in range(1000):
        n = 2 + k % 3
        d = 1 + k % min(3, n)
        cube = C.Cube(2, n)
        f = np.real(C.random_low_degree(cube, d, rng, real=True))
        ratio = np.mean(f**4) ** 0.25 / (3 ** (d / 2) * np.mean(f**2) ** 0.5)
        bonami_worst = max(bonami_worst, float(ratio))
    dt = time.perf_counter() - t0
    ok = not failures and bonami_worst <= 1 + 1e-9
    return record(9, "product-space warm-up", ok,
                  f"{runs} exhaustive checks, {len(failures)} failures, worst Bonami ratio over 1000 "
                  f"functions {bonami_worst:.4f}, {dt:.1f}s" + (f", first failure {failures[0]}" if failures else ""))


# ------------------------------------------------------------------ 10


def criterion_10(C0=1.0):
    t0 = time.perf_counter()
    failures = []
    met = total = 0
    worst_identity = 0.0
    for q, n, m in battery_spaces():
        sp = space(q, n, m)
        sets = [(f"rank<={k}", E.rank_threshold_set(sp, k)) for k in range(min(n, m) + 1)]
        sets.append(("dictator-slab", E.dictator_slab(sp, np.eye(n, dtype=np.int64)[0], np.zeros(m, dtype=np.int64))))
        for dens in (1 / 16, 1 / 8, 1 / 4):
            for seed in range(10):
                sets.append((f"random:{dens:g},{seed}", E.random_set(sp, dens, seed)))
        for r in range(1, n + m):
            for name, s in sets:
                rep = E.check_sse_theorem(sp, s, r, C0, set_id=name)
                total += 1
                met += rep.hypothesis
                worst_identity = max(worst_identity, rep.spectral_identity_err)
                if not rep.passed:
                    failures.append((q, n, m, r, name))
    extremal = 0.0
    for q, n in [(2, 2), (2, 3), (3, 2)]:
        sp = space(q, n, n)
        for r in range(1, n + 1):
            rep = E.check_sse_theorem(sp, E.rank_threshold_set(sp, n - r), r, C0, set_id=f"rank<={n - r}")
            extremal = max(extremal, rep.spectral_identity_err)
            print(f"  extremal q={q} n=m={n} r={r}: level {rep.globalness_level:.4g}, stay {rep.stay_probability:.4f}, "
                  f"bound {rep.bound:.4f}, hypothesis {rep.hypothesis}")
    dt = time.perf_counter() - t0
    ok = not failures and extremal < 1e-10 and worst_identity < 1e-10
    return record(10, "small-set expansion", ok,
                  f"{total} (set, r) reports, {met} meet the hypothesis at C0={C0:g}, {len(failures)} failures, "
                  f"extremal identity err {extremal:.2e}, {dt:.1f}s")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k):
    assert CRITERIA[k - 1](), RESULTS[k]


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print()
    for k in sorted(RESULTS):
        print(RESULTS[k])
    sys.exit(0 if all(results) else 1)
