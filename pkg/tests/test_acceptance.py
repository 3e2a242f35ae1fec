"""Acceptance suite: criteria 1-9, each at its stated tolerance.

Every criterion records one PASS/FAIL line; pytest prints them in the
terminal summary, and ``python tests/test_acceptance.py`` prints them
directly.  Values from the library are checked against the naive oracles
in ``oracles.py`` wherever a direct computation exists.
"""

import time

import numpy as np

from charvar4 import coordinates as co
from charvar4.classify import Case, irreducibility, random_reducible_pair, reduced_invariants
from charvar4.matrices import adjugate, conjugate_by, eigenvalues, expm, random_sl4, random_su31, su31_basis
from charvar4.reconstruct import FitConfig, conjugacy_test, find_conjugator, fit_pair, reduced_conjugacy_test

from oracles import G1, G2, S, SU31, cyclic_class, expand, random_word, word_trace_fast

RESULTS: dict[int, str] = {}


def record(n, title, ok, detail):
    RESULTS[n] = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({detail})"
    return ok


def seeds(seed, n):
    return [int(s) for s in np.random.default_rng(seed).integers(2**63, size=n)]


def su31_pairs(n, seed):
    s = seeds(seed, 2 * n)
    return [(random_su31(s[2 * i]).matrix, random_su31(s[2 * i + 1]).matrix) for i in range(n)]


def sl4_pairs(n, seed):
    s = seeds(seed, 2 * n)
    return [(random_sl4(s[2 * i]).matrix, random_sl4(s[2 * i + 1]).matrix) for i in range(n)]


def swap(w):
    return w.translate(str.maketrans("xyXY", "yxYX"))


def test_criterion_1_catalog_fidelity():
    djokovic = [w.letters for w in co.SL4_DJOKOVIC_30] == [expand(w) for w in G1 + G2]
    base = [expand(w) for w in S]
    classes = []
    for w in base + [swap(w) for w in base] + [expand("x^-1 y^-1 x^2 y^2")]:
        if cyclic_class(w) not in classes:
            classes.append(cyclic_class(w))
    symmetric = (len(co.SL4_SYMMETRIC_30) == 30 and len(classes) == 30
                 and {cyclic_class(w.letters) for w in co.SL4_SYMMETRIC_30} == set(classes))
    su31 = [w.letters for w in co.SU31_22] == [expand(w) for w in SU31]
    sizes = (len(co.SL4_DJOKOVIC_30), len(co.SL4_SYMMETRIC_30), len(co.SU31_22))
    ok = djokovic and symmetric and su31 and sizes == (30, 30, 22)
    assert record(1, "catalog fidelity", ok,
                  f"sizes {sizes}, djokovic {djokovic}, symmetric {symmetric}, su31 {su31}")


def test_criterion_2_su31_reality():
    worst_sigma = worst_conj = worst_oracle = 0.0
    words = [w.letters for w in co.SU31_22]
    for A, B in su31_pairs(1000, 2):
        vec = co.compute("SU31_22", A, B)
        worst_sigma = max(worst_sigma, max(abs(s.imag) for s in co.sigma_values(vec).values()))
        worst_conj = max(worst_conj, max(co.conjugation_residuals(co.SU31_22.words, A, B).values()))
        # the same quantities from direct products
        Ai, Bi = np.linalg.inv(A), np.linalg.inv(B)
        for w in ("x", "y", "xy", "xxy", "yyx"):
            t, t2 = word_trace_fast(w, A, B, Ai, Bi), word_trace_fast(w + w, A, B, Ai, Bi)
            worst_oracle = max(worst_oracle, abs(((t * t - t2) / 2).imag))
        for w in words:
            inv = w[::-1].swapcase()
            worst_oracle = max(worst_oracle, abs(word_trace_fast(inv, A, B, Ai, Bi)
                                                 - np.conj(word_trace_fast(w, A, B, Ai, Bi))))
    ok = max(worst_sigma, worst_conj, worst_oracle) < 1e-9
    assert record(2, "SU(3,1) reality", ok,
                  f"max |Im sigma| {worst_sigma:.2e}, max conj residual {worst_conj:.2e}, oracle {worst_oracle:.2e}, tol 1e-9")


def test_criterion_3_identity_suites():
    rng = np.random.default_rng(3)
    worst = dict.fromkeys(["sublemma", "x-inverse", "xy2", "long-word", "eliminated"], 0.0)
    for A, B in sl4_pairs(1000, 31):
        Ai, Bi = np.linalg.inv(A), np.linalg.inv(B)

        def tr(w):
            return word_trace_fast(w, A, B, Ai, Bi)

        u, v = random_word(rng, 4), random_word(rng, 4)
        # oracle form of the substitution identity, then the library residual
        sig = (tr("x") ** 2 - tr("xx")) / 2
        lhs = -tr(u + "X" + v)
        rhs = tr(u + "xxx" + v) - tr("x") * tr(u + "xx" + v) + sig * tr(u + "x" + v) - tr("X") * tr(u + v)
        worst["sublemma"] = max(worst["sublemma"], abs(lhs - rhs), co.verify_sublemma(u, v, A, B))
        worst["x-inverse"] = max(worst["x-inverse"],
                                 abs(co.recover_tr_x_inverse(tr("x"), tr("xx"), tr("xxx")) - tr("X")))
        worst["xy2"] = max(worst["xy2"], abs(co.recover_tr_xy2(A, B) - tr("xyy")))
    for A, B in su31_pairs(1000, 32):
        Ai, Bi = np.linalg.inv(A), np.linalg.inv(B)
        worst["long-word"] = max(worst["long-word"],
                                 abs(co.recover_long_word(A, B) - word_trace_fast("yyxyyxxyx", A, B, Ai, Bi)),
                                 abs(co.recover_long_word(B, A) - word_trace_fast("xxyxxyyxy", A, B, Ai, Bi)))
        rep = co.verify_eliminated_traces(A, B)
        direct = max(abs(word_trace_fast(w.letters, A, B, Ai, Bi)
                         - np.conj(word_trace_fast(w.letters[::-1].swapcase(), A, B, Ai, Bi)))
                     for w in co.ELIMINATED_WORDS)
        worst["eliminated"] = max(worst["eliminated"], rep.max_residual, direct)
    ok = max(worst.values()) < 1e-7
    assert record(3, "identity suites", ok,
                  ", ".join(f"{k} {v:.2e}" for k, v in worst.items()) + ", tol 1e-7")


def test_criterion_4_eigenvalue_pairing():
    worst = 0.0
    for s in seeds(4, 1000):
        g = random_su31(s).matrix
        ev = eigenvalues(g)
        # companion-matrix roots of the characteristic polynomial as second solver
        roots = np.roots(np.poly(g))
        worst = max(worst, max(np.min(np.abs(roots - 1 / np.conj(lam))) for lam in ev))
    ok = worst < 1e-7
    assert record(4, "eigenvalue pairing", ok, f"max pairing defect {worst:.2e}, tol 1e-7")


def test_criterion_5_independence():
    params, full = [], []
    for A, B in sl4_pairs(20, 5):
        params.append(co.jacobian_rank(A, B, "SL4_PARAMETERS_15"))
        full.append(co.jacobian_rank(A, B, "SL4_DJOKOVIC_30"))
    ident = co.jacobian_rank(np.eye(4), np.eye(4), "SL4_DJOKOVIC_30")
    ok = set(params) == {15} and set(full) == {15} and ident == 0
    assert record(5, "independence certificate", ok,
                  f"parameter ranks {sorted(set(params))}, catalog ranks {sorted(set(full))}, identity rank {ident}")


def test_criterion_6_conjugacy_round_trip():
    worst_dist = worst_res = 0.0
    kernels = set()
    irreducible = 0
    for i, (A, B) in enumerate(su31_pairs(200, 6)):
        g = random_su31(seeds(60 + i, 1)[0]).matrix
        A2, B2 = conjugate_by(g, A), conjugate_by(g, B)
        irreducible += irreducibility(A, B).irreducible
        cert = conjugacy_test(A, B, A2, B2)
        worst_dist = max(worst_dist, cert.coordinate_distance)
        found = find_conjugator(A, B, A2, B2)
        kernels.add(found.kernel_dimension)
        M, Mi = found.conjugator, adjugate(found.conjugator)
        worst_res = max(worst_res, np.max(np.abs(M @ A @ Mi - A2)), np.max(np.abs(M @ B @ Mi - B2)))
    rng = np.random.default_rng(66)
    basis = su31_basis()
    least = np.inf
    for A, B in su31_pairs(200, 67):
        X = np.tensordot(rng.standard_normal(15), basis, axes=(0, 0))
        B2 = B @ expm(1e-2 * X / np.linalg.norm(X))
        least = min(least, conjugacy_test(A, B, A, B2).coordinate_distance)
    ok = irreducible == 200 and worst_dist < 1e-9 and kernels == {1} and worst_res < 1e-7 and least > 1e-4
    assert record(6, "conjugacy round-trip", ok,
                  f"irreducible {irreducible}/200, max distance {worst_dist:.2e}, kernel dims {sorted(kernels)}, "
                  f"max residual {worst_res:.2e}, min perturbed distance {least:.2e}")


def _subspace_residual(M, sub1, sub2):
    """How far M sub1 sticks out of span(sub2)."""
    q, _ = np.linalg.qr(sub2)
    img = M @ sub1
    return np.max(np.abs(img - q @ (np.conj(q.T) @ img))) / max(1.0, np.max(np.abs(img)))


def test_criterion_7_reduced_invariants():
    worst_inv = worst_res = worst_block = 0.0
    found = {Case.LINE: 0, Case.PLANE: 0}
    for case, seed in ((Case.LINE, 71), (Case.PLANE, 72)):
        for i, s in enumerate(seeds(seed, 100)):
            A, B, _ = random_reducible_pair(s, case)
            g = random_su31(seeds(seed + 1000 + i, 1)[0]).matrix
            A2, B2 = conjugate_by(g, A), conjugate_by(g, B)
            r1, r2 = irreducibility(A, B), irreducibility(A2, B2)
            worst_inv = max(worst_inv, reduced_invariants(A, B, case, r1).distance(reduced_invariants(A2, B2, case, r2)))
            cert = reduced_conjugacy_test(A, B, A2, B2)
            if not cert.conjugate:
                continue
            found[case] += 1
            M, Mi = cert.conjugator, np.linalg.inv(cert.conjugator)
            worst_res = max(worst_res, np.max(np.abs(M @ A @ Mi - A2)), np.max(np.abs(M @ B @ Mi - B2)))
            worst_block = max(worst_block, _subspace_residual(M, r1.candidates[case], r2.candidates[case]))
    ok = (found == {Case.LINE: 100, Case.PLANE: 100} and worst_inv < 1e-9
          and worst_res < 1e-7 and worst_block < 1e-7)
    assert record(7, "reduced invariants", ok,
                  f"conjugators found line {found[Case.LINE]}/100 plane {found[Case.PLANE]}/100, "
                  f"max invariant drift {worst_inv:.2e}, max residual {worst_res:.2e}, "
                  f"max off-subspace {worst_block:.2e}")


def test_criterion_8_reconstruction():
    converged = consistent = 0
    t0 = time.perf_counter()
    for i, (A, B) in enumerate(su31_pairs(50, 8)):
        target = co.compute("SU31_22", A, B)
        res = fit_pair(target, FitConfig(restarts=32, seed=800 + i))
        if res.converged and res.residual < 1e-6:
            converged += 1
            consistent += co.compute("SU31_22", *res.pair).distance(target) < 1e-6
    elapsed = time.perf_counter() - t0
    ok = converged >= 40 and consistent == converged
    assert record(8, "reconstruction", ok,
                  f"converged {converged}/50 (need 40), self-consistent {consistent}/{converged}, {elapsed:.0f}s")


def test_criterion_9_count_checks():
    slots = co.real_slot_names()
    missing = {f"Im:{w}" for w in co.SU31_22.words} - set(slots)
    expected = {f"Im:{expand(w)}" for w in ("x^2", "y^2", "x y x y", "x^2 y x^2 y", "y^2 x y^2 x")}
    worst = 0.0
    for A, B in su31_pairs(1000, 9):
        r = co.real_coords(A, B)
        Ai, Bi = np.linalg.inv(A), np.linalg.inv(B)
        direct = np.array([word_trace_fast(w.letters, A, B, Ai, Bi) for w in co.SU31_22.words])
        worst = max(worst, np.max(np.abs(r.complex_values() - direct)))
    ok = len(slots) == 39 and missing == expected and worst < 1e-9
    assert record(9, "count checks", ok,
                  f"{len(slots)} slots, omitted {sorted(missing)}, max recovery error {worst:.2e}, tol 1e-9")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            failed += 1
    for n in sorted(RESULTS):
        print(RESULTS[n])
    sys.exit(1 if failed else 0)
