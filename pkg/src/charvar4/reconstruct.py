"""Conjugacy certificates and numerical inversion of the coordinate maps."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classify import (
    Case,
    ReducibilityReport,
    block_decompose_case,
    block_mask,
    check_reduced_case,
    irreducibility,
    reduced_invariants,
)
from .coordinates import SL4_DJOKOVIC_30, TraceVector, compute, get_catalog
from .errors import CaseMismatch, NoConjugator, NotIrreducible, SingularMatrix
from .matrices import (
    H,
    Flavor,
    GroupElement,
    adjugate,
    as_matrix,
    expm,
    is_su31,
    random_sl4,
    random_su31,
    sl4_basis,
    su31_basis,
)
from .words import trace_all

log = logging.getLogger(__name__)

#: status strings carried by certificates
CONJUGATE = "conjugate"
NOT_CONJUGATE = "not-conjugate"
UNVERIFIED = "coordinates-equal, polystability unverified"

#: max-norm conjugation residual a returned conjugator must meet
CONJUGATOR_TOL = 1e-7
#: relative singular-value threshold for the intertwiner kernel
KERNEL_TOL = 1e-8


@dataclass
class ConjugacyCertificate:
    conjugate: bool
    coordinate_distance: float
    kernel_dimension: Optional[int] = None
    conjugator: Optional[np.ndarray] = None
    status: str = ""
    residuals: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        from .serialize import matrix_to_json

        return {
            "conjugate": self.conjugate,
            "status": self.status,
            "coordinate_distance": self.coordinate_distance,
            "kernel_dimension": self.kernel_dimension,
            "conjugator": None if self.conjugator is None else matrix_to_json(self.conjugator),
            "residuals": self.residuals,
            "tolerances": self.tolerances,
            "notes": self.notes,
        }


def conjugacy_test(A, B, A2, B2, catalog="SU31_22", tol: float = 1e-8) -> ConjugacyCertificate:
    """Compare trace coordinates; certify only when both pairs are irreducible."""
    cat = get_catalog(catalog)
    d = compute(cat, A, B).distance(compute(cat, A2, B2))
    tols = {"coordinate": tol}
    if d >= tol:
        return ConjugacyCertificate(False, d, status=NOT_CONJUGATE, tolerances=tols)
    irreducible = irreducibility(A, B).irreducible and irreducibility(A2, B2).irreducible
    if irreducible:
        return ConjugacyCertificate(True, d, status=CONJUGATE, tolerances=tols)
    return ConjugacyCertificate(
        False,
        d,
        status=UNVERIFIED,
        tolerances=tols,
        notes=["at least one pair is reducible; equal traces do not certify conjugacy here"],
    )


def intertwiner_system(A, B, A2, B2, mask=None) -> np.ndarray:
    """Matrix of M -> (M A - A2 M, M B - B2 M) on row-major vec(M).

    With ``mask`` only the masked entries of M are unknowns.
    """
    A, B, A2, B2 = map(as_matrix, (A, B, A2, B2))
    eye = np.eye(4)
    rows = []
    for X, Y in ((A, A2), (B, B2)):
        rows.append(np.kron(eye, X.T) - np.kron(Y, eye))
    S = np.concatenate(rows)
    if mask is not None:
        S = S[:, np.asarray(mask).reshape(-1)]
    return S


def _kernel(S, rel_tol=KERNEL_TOL):
    _, s, vh = np.linalg.svd(S)
    thresh = rel_tol * max(1.0, s[0])
    null = np.conj(vh[np.sum(s > thresh) :]).T
    return null, s


def _normalize_det(M):
    d = np.linalg.det(M)
    return M / d ** 0.25


def _conjugation_residuals(M, A, B, A2, B2):
    Mi = adjugate(M)
    return {
        "A": float(np.max(np.abs(M @ A @ Mi - A2))),
        "B": float(np.max(np.abs(M @ B @ Mi - B2))),
        "det": float(abs(np.linalg.det(M) - 1)),
    }


def find_conjugator(A, B, A2, B2, report: Optional[ReducibilityReport] = None) -> ConjugacyCertificate:
    """Solve M A = A2 M, M B = B2 M for an irreducible pair (A, B).

    The kernel is one-dimensional for conjugate pairs; the kernel vector is
    scaled to determinant one by the principal fourth root, so it is fixed
    up to the centre {+-I, +-iI}.
    """
    A, B, A2, B2 = map(as_matrix, (A, B, A2, B2))
    if report is None:
        report = irreducibility(A, B)
    if not report.irreducible:
        raise NotIrreducible(f"first pair is {report.verdict.value}")
    null, s = _kernel(intertwiner_system(A, B, A2, B2))
    kdim = null.shape[1]
    if kdim != 1:
        raise NoConjugator(f"intertwiner kernel has dimension {kdim}")
    M = null[:, 0].reshape(4, 4)
    if np.linalg.cond(M) > 1e12:
        raise NoConjugator("kernel element is singular")
    M = _normalize_det(M)
    res = _conjugation_residuals(M, A, B, A2, B2)
    scale = max(1.0, np.max(np.abs(A2)), np.max(np.abs(B2)))
    if max(res["A"], res["B"]) > CONJUGATOR_TOL * scale:
        raise NoConjugator(f"kernel element fails to conjugate (residuals {res})")
    dist = compute(SL4_DJOKOVIC_30, A, B).distance(compute(SL4_DJOKOVIC_30, A2, B2))
    return ConjugacyCertificate(
        True,
        dist,
        kdim,
        M,
        CONJUGATE,
        res,
        {"kernel": KERNEL_TOL, "conjugation": CONJUGATOR_TOL},
        [f"smallest singular values {s[-2:].tolist()}"],
    )


def _pick_case(r1: ReducibilityReport, r2: ReducibilityReport) -> Case:
    for case in (Case.LINE, Case.PLANE):
        if r1.supports(case) and r2.supports(case):
            return case
    raise CaseMismatch(f"pairs are {r1.verdict.value} and {r2.verdict.value}")


def _unitarize_blocks(M0, case):
    """Rescale each diagonal block so it preserves the form when it can."""
    from .matrices import BLOCKS

    M0 = M0.copy()
    for part in BLOCKS[case.value.lower()]:
        idx = np.ix_(part, part)
        Mb, Hb = M0[idx], H[idx]
        G = np.conj(Mb.T) @ Hb @ Mb
        c = np.real(np.trace(G @ Hb)) / len(part)
        if c > 0 and np.max(np.abs(G - c * Hb)) < 1e-8 * c:
            M0[idx] = Mb / np.sqrt(c)
    return M0


def reduced_conjugacy_test(A, B, A2, B2, tol: float = 1e-8, seed: int = 0, attempts: int = 8) -> ConjugacyCertificate:
    """Compare reduced invariants; on agreement build a block-respecting conjugator."""
    A, B, A2, B2 = map(as_matrix, (A, B, A2, B2))
    r1, r2 = irreducibility(A, B), irreducibility(A2, B2)
    case = _pick_case(r1, r2)
    check_reduced_case(A, B, case, r1)
    check_reduced_case(A2, B2, case, r2)
    inv1 = reduced_invariants(A, B, case, r1)
    inv2 = reduced_invariants(A2, B2, case, r2)
    d = inv1.distance(inv2)
    tols = {"invariants": tol, "conjugation": CONJUGATOR_TOL}
    if d >= tol:
        return ConjugacyCertificate(False, d, status=NOT_CONJUGATE, tolerances=tols, notes=[f"case {case.value}"])
    k1, (a1, b1) = block_decompose_case(A, B, r1, case)
    k2, (a2, b2) = block_decompose_case(A2, B2, r2, case)
    mask = block_mask(case)
    null, _ = _kernel(intertwiner_system(a1, b1, a2, b2, mask))
    kdim = null.shape[1]
    if kdim == 0:
        return ConjugacyCertificate(False, d, 0, status=NOT_CONJUGATE, tolerances=tols,
                                    notes=["no block-respecting intertwiner"])
    rng = np.random.default_rng(seed)
    scale = max(1.0, np.max(np.abs(A2)), np.max(np.abs(B2)))
    for _ in range(attempts):
        coeffs = rng.standard_normal(kdim) + 1j * rng.standard_normal(kdim)
        M0 = np.zeros(16, dtype=complex)
        M0[mask.reshape(-1)] = null @ coeffs
        M0 = M0.reshape(4, 4)
        if np.linalg.cond(M0) > 1e10:
            continue
        M0 = _unitarize_blocks(M0, case)
        M = _normalize_det(k2 @ M0 @ adjugate(k1))
        res = _conjugation_residuals(M, A, B, A2, B2)
        if max(res["A"], res["B"]) <= CONJUGATOR_TOL * scale:
            notes = [f"case {case.value}", f"conjugator in SU(3,1): {bool(is_su31(M, 1e-8 * scale**2))}"]
            return ConjugacyCertificate(True, d, kdim, M, CONJUGATE, res, tols, notes)
    return ConjugacyCertificate(False, d, kdim, status=UNVERIFIED, tolerances=tols,
                                notes=["invariants agree but no invertible intertwiner was found"])


# -- fitting ------------------------------------------------------------------


@dataclass
class FitConfig:
    restarts: int = 32
    max_iter: int = 200
    tol: float = 1e-6
    damping: float = 1e-3
    damping_factor: float = 10.0
    fd_step: float = 1e-6
    seed: int = 0
    scale: float = 1.0
    initial: Optional[tuple] = None


@dataclass
class FitResult:
    pair: tuple
    residual: float
    iterations: int
    restarts_used: int
    converged: bool
    history: list = field(default_factory=list, repr=False)
    seed: int = 0
    config: Optional[FitConfig] = field(default=None, repr=False)

    def to_json(self) -> dict:
        from .serialize import pair_to_json

        cfg = self.config
        return {
            "pair": pair_to_json(*self.pair),
            "residual": self.residual,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "seed": self.seed,
            "config": None if cfg is None else {
                "restarts": cfg.restarts, "max_iter": cfg.max_iter, "tol": cfg.tol,
                "damping": cfg.damping, "damping_factor": cfg.damping_factor,
                "fd_step": cfg.fd_step, "seed": cfg.seed, "scale": cfg.scale,
            },
        }


class _Problem:
    """Residual map around a base pair: (a, b) -> traces(A exp(X_a), B exp(X_b)) - target."""

    def __init__(self, target: TraceVector):
        self.cat = get_catalog(target.catalog)
        self.target = target.values
        if self.cat.flavor is Flavor.SU31:
            self.basis = su31_basis()
            self.complex_coeffs = False
        else:
            self.basis = sl4_basis()
            self.complex_coeffs = True
        n = len(self.basis)
        self.nparams = 4 * n if self.complex_coeffs else 2 * n

    def generators(self, p):
        """Stacked algebra elements for parameter rows p, shape (..., 2, 4, 4)."""
        p = np.atleast_2d(p)
        n = len(self.basis)
        if self.complex_coeffs:
            c = p[:, : 2 * n] + 1j * p[:, 2 * n :]
        else:
            c = p.astype(complex)
        ca, cb = c[:, :n], c[:, n:]
        return np.einsum("kn,nij->kij", ca, self.basis), np.einsum("kn,nij->kij", cb, self.basis)

    def residuals(self, A, B, P):
        Xa, Xb = self.generators(P)
        As = A @ expm(Xa)
        Bs = B @ expm(Xb)
        diff = trace_all(self.cat.words, As, Bs) - self.target
        return np.concatenate([diff.real, diff.imag], axis=-1)

    def step(self, A, B, p):
        Xa, Xb = self.generators(p)
        return A @ expm(Xa[0]), B @ expm(Xb[0])


def _lm(problem: _Problem, A, B, cfg: FitConfig):
    """Levenberg-Marquardt on the rebased exponential chart; returns (A, B, maxres, iters, history)."""
    m = problem.nparams
    r = problem.residuals(A, B, np.zeros((1, m)))[0]
    cost = float(r @ r)
    history = [cost]
    lam = cfg.damping
    it = 0
    polish = cfg.tol * 1e-3
    h = cfg.fd_step
    eye = np.eye(m)
    while it < cfg.max_iter and np.max(np.abs(r)) > polish:
        it += 1
        P = np.concatenate([h * eye, -h * eye])
        R = problem.residuals(A, B, P)
        J = ((R[:m] - R[m:]) / (2 * h)).T
        JtJ = J.T @ J
        g = J.T @ r
        diag = np.diag(JtJ) + 1e-12
        accepted = False
        while lam < 1e12:
            try:
                delta = np.linalg.solve(JtJ + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= cfg.damping_factor
                continue
            A_new, B_new = problem.step(A, B, delta)
            try:
                r_new = problem.residuals(A_new, B_new, np.zeros((1, m)))[0]
            except SingularMatrix:
                # an overlong step can leave the generators numerically singular
                lam *= cfg.damping_factor
                continue
            cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                A, B, r, cost = A_new, B_new, r_new, cost_new
                lam = max(lam / cfg.damping_factor, 1e-15)
                history.append(cost)
                accepted = True
                break
            lam *= cfg.damping_factor
        if not accepted:
            break
    return A, B, float(np.max(np.abs(r))), it, history


def _random_pair(problem: _Problem, seed: int, scale: float):
    rng = np.random.default_rng(seed)
    s1, s2 = (int(s) for s in rng.integers(2**63, size=2))
    if problem.cat.flavor is Flavor.SU31:
        return random_su31(s1, scale).matrix, random_su31(s2, scale).matrix
    return random_sl4(s1).matrix, random_sl4(s2).matrix


def fit_pair(target: TraceVector, config: Optional[FitConfig] = None) -> FitResult:
    """Search for a pair whose catalog traces match ``target``.

    Each restart runs damped least squares from a seeded random pair (or
    ``config.initial`` for the first start).  Stops at the first restart
    whose max-norm residual drops below ``config.tol``; otherwise returns the
    best restart with ``converged=False``.
    """
    cfg = config or FitConfig()
    problem = _Problem(target)
    seeds = np.random.default_rng(cfg.seed).integers(2**63, size=max(cfg.restarts, 1))
    best = None
    for i in range(max(cfg.restarts, 1)):
        if i == 0 and cfg.initial is not None:
            A0, B0 = (as_matrix(g) for g in cfg.initial)
        else:
            A0, B0 = _random_pair(problem, int(seeds[i]), cfg.scale)
        A, B, res, iters, hist = _lm(problem, A0, B0, cfg)
        log.debug("restart %d: residual %.3g after %d iterations", i, res, iters)
        if best is None or res < best[2]:
            best = (A, B, res, iters, hist, i)
        if res < cfg.tol:
            break
    A, B, res, iters, hist, idx = best
    flavor = Flavor.SU31 if problem.cat.flavor is Flavor.SU31 else Flavor.SL4
    scale = max(1.0, np.max(np.abs(A)), np.max(np.abs(B))) ** 2
    pair = (GroupElement(A, flavor, 1e-8 * scale), GroupElement(B, flavor, 1e-8 * scale))
    return FitResult(pair, res, iters, idx + 1, res < cfg.tol, hist, cfg.seed, cfg)
