"""Isometry types, reducibility, and the reduced invariants of reducible
loxodromic pairs.

Reducibility is decided linearly: a pair is irreducible exactly when the
algebra it generates is all of M_4(C) (Burnside).  For reducible pairs a
common invariant subspace is located and its signature under H decides
between the two cases handled by :func:`reduced_invariants`:

* ``Line``: an invariant subspace of signature (1,1), block-diagonalised on
  {e1, e4} + {e2, e3};
* ``Plane``: an invariant subspace of signature (2,1), block-diagonalised on
  {e1, e2, e4} + {e3}.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CaseMismatch, DecompositionFailed, FlavorMismatch, NotLoxodromic, ToleranceAmbiguous
from .matrices import (
    BLOCKS,
    MEMBERSHIP_TOL,
    H,
    GroupElement,
    adjugate,
    as_matrix,
    block_algebra_basis,
    eigenvalues,
    expm,
    hermitian_adjoint,
    is_su31,
    loxodromic_diagonal,
    random_algebra_element,
    random_su31,
    sigma,
    trace,
)


class IsometryType(str, enum.Enum):
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    LOXODROMIC = "Loxodromic"


class Verdict(str, enum.Enum):
    IRREDUCIBLE = "Irreducible"
    LINE = "ReducibleLine"
    PLANE = "ReduciblePlane"
    OTHER = "ReducibleOther"


class Case(str, enum.Enum):
    LINE = "Line"
    PLANE = "Plane"


#: default tolerance on ||lambda| - 1| separating loxodromic elements
MODULUS_TOL = 1e-6
#: eigenvalues closer than this are treated as one cluster
CLUSTER_RADIUS = 1e-5
#: relative minimal-polynomial residuals below DIAG_LO are diagonalizable,
#: above DIAG_HI defective, in between marginal
DIAG_LO = 1e-8
DIAG_HI = 1e-5
#: relative threshold for the rank of the word span
SPAN_TOL = 1e-9
#: Gram eigenvalues below this count as null directions
SIGNATURE_TOL = 1e-8


def _cluster(ev, radius):
    clusters: list[list[complex]] = []
    for lam in ev:
        for c in clusters:
            if min(abs(lam - mu) for mu in c) <= radius:
                c.append(lam)
                break
        else:
            clusters.append([lam])
    # single-linkage merge of clusters that became close
    merged = True
    while merged:
        merged = False
        for i, j in itertools.combinations(range(len(clusters)), 2):
            if min(abs(a - b) for a in clusters[i] for b in clusters[j]) <= radius:
                clusters[i].extend(clusters.pop(j))
                merged = True
                break
    return [np.mean(c) for c in clusters], [len(c) for c in clusters]


def diagonalizability_residual(g, radius: float = CLUSTER_RADIUS) -> float:
    """Relative norm of prod_c (g - lambda_c I) over eigenvalue clusters.

    Zero exactly when g is diagonalizable with the given cluster centres.
    """
    m = as_matrix(g)
    centres, _ = _cluster(eigenvalues(m), radius)
    prod = np.eye(4, dtype=complex)
    scale = 1.0
    norm = np.linalg.norm(m, 2)
    for lam in centres:
        prod = prod @ (m - lam * np.eye(4))
        scale *= norm + abs(lam)
    return float(np.linalg.norm(prod, 2) / scale)


@dataclass
class IsometryReport:
    kind: IsometryType
    eigenvalues: np.ndarray
    modulus_deviation: float
    diagonal_residual: float
    tol: float


def isometry_report(g, tol: float = MODULUS_TOL, membership_tol: float = MEMBERSHIP_TOL) -> IsometryReport:
    m = as_matrix(g)
    if not (isinstance(g, GroupElement) and g.is_su31):
        rep = is_su31(m, membership_tol * max(1.0, float(np.max(np.abs(m)))) ** 2)
        if not rep:
            raise FlavorMismatch(f"not in SU(3,1): form residual {rep.form_residual:.3g}")
    ev = eigenvalues(m)
    dev = float(np.max(np.abs(np.abs(ev) - 1)))
    resid = diagonalizability_residual(m)
    near_boundary = tol / 10 < dev <= 10 * tol
    if near_boundary and DIAG_LO < resid < DIAG_HI:
        raise ToleranceAmbiguous(
            f"eigenvalue modulus deviation {dev:.3g} is within a decade of tol {tol:.3g} "
            f"and the diagonalizability residual {resid:.3g} is marginal"
        )
    if dev > tol:
        kind = IsometryType.LOXODROMIC
    elif resid <= np.sqrt(DIAG_LO * DIAG_HI):
        kind = IsometryType.ELLIPTIC
    else:
        kind = IsometryType.PARABOLIC
    return IsometryReport(kind, ev, dev, resid, tol)


def classify_isometry(g, tol: float = MODULUS_TOL) -> IsometryType:
    """Loxodromic if an eigenvalue leaves the unit circle, otherwise elliptic
    when diagonalizable and parabolic when not."""
    return isometry_report(g, tol).kind


# -- reducibility -------------------------------------------------------------


def _vec(m):
    return np.asarray(m).reshape(-1)


def algebra_basis(A, B, tol: float = SPAN_TOL) -> np.ndarray:
    """Orthonormal basis (as 4x4 matrices) of the algebra generated by A and B.

    Starts from {I, A, B} and multiplies new basis elements on the left by A
    and B until the span stops growing or reaches dimension 16.
    """
    A, B = as_matrix(A), as_matrix(B)
    scale = max(1.0, np.linalg.norm(A), np.linalg.norm(B))
    basis: list[np.ndarray] = []

    def add(m):
        v = _vec(m) / scale
        for q in basis:
            v = v - np.vdot(q, v) * q
        for q in basis:  # second pass against cancellation
            v = v - np.vdot(q, v) * q
        n = np.linalg.norm(v)
        if n > tol * max(1.0, np.linalg.norm(_vec(m)) / scale):
            basis.append(v / n)
            return True
        return False

    frontier = [m for m in (np.eye(4, dtype=complex), A, B) if add(m)]
    while frontier and len(basis) < 16:
        new = []
        for m in frontier:
            for g in (A, B):
                p = g @ m
                if add(p):
                    new.append(p)
                if len(basis) == 16:
                    break
        frontier = new
    return np.array(basis).reshape(-1, 4, 4)


def span_dimension(A, B, tol: float = SPAN_TOL) -> int:
    return len(algebra_basis(A, B, tol))


def subspace_signature(basis, tol: float = SIGNATURE_TOL) -> tuple[int, int, int]:
    """(positive, negative, null) counts of H restricted to the column span."""
    q, _ = np.linalg.qr(np.asarray(basis, dtype=complex))
    gram = np.conj(q.T) @ H @ q
    ev = np.linalg.eigvalsh((gram + np.conj(gram.T)) / 2)
    return int(np.sum(ev > tol)), int(np.sum(ev < -tol)), int(np.sum(np.abs(ev) <= tol))


def _orth(cols, tol=1e-8):
    cols = np.asarray(cols, dtype=complex)
    if cols.size == 0:
        return cols.reshape(4, 0)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    return u[:, s > tol * max(1.0, s[0])]


def h_complement(basis) -> np.ndarray:
    """Columns spanning {z : <z, w> = 0 for all w in span(basis)}."""
    w = np.asarray(basis, dtype=complex)
    _, s, vh = np.linalg.svd(np.conj(w.T) @ H)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0]) if len(s) else 0))
    return np.conj(vh[rank:].T)


def invariant_subspaces(A, B, alg: Optional[np.ndarray] = None, seed: int = 0) -> list[np.ndarray]:
    """Proper common invariant subspaces found from eigenvectors of a
    random algebra element, together with their sums and H-complements."""
    A, B = as_matrix(A), as_matrix(B)
    if alg is None:
        alg = algebra_basis(A, B)
    if len(alg) == 16:
        return []
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(len(alg)) + 1j * rng.standard_normal(len(alg))
    r = np.tensordot(coeffs, alg, axes=(0, 0))
    _, vecs = np.linalg.eig(r)
    minimal = []
    for v in vecs.T:
        sub = _orth(np.stack([m @ v for m in alg], axis=1))
        if 0 < sub.shape[1] < 4 and not any(_same_span(sub, s) for s in minimal):
            minimal.append(sub)
    found = []

    def push(sub):
        if 0 < sub.shape[1] < 4 and not any(_same_span(sub, s) for s in found):
            found.append(sub)

    for k in range(1, len(minimal) + 1):
        for combo in itertools.combinations(minimal, k):
            push(_orth(np.concatenate(combo, axis=1)))
    for sub in list(found):
        if subspace_signature(sub)[2] == 0:
            push(h_complement(sub))
    return found


def _same_span(a, b, tol=1e-8):
    if a.shape[1] != b.shape[1]:
        return False
    return np.linalg.norm(b - a @ (np.conj(a.T) @ b)) < tol * max(1.0, np.linalg.norm(b))


@dataclass
class ReducibilityReport:
    verdict: Verdict
    span_dimension: int
    subspace_basis: Optional[np.ndarray] = None
    subspace_signature: Optional[tuple[int, int]] = None
    #: every nondegenerate Line/Plane-type subspace found, keyed by case
    candidates: dict = field(default_factory=dict, repr=False)

    @property
    def irreducible(self) -> bool:
        return self.verdict is Verdict.IRREDUCIBLE

    def supports(self, case: Case) -> bool:
        return Case(case) in self.candidates


def irreducibility(A, B, tol: float = SPAN_TOL) -> ReducibilityReport:
    """Burnside test plus, for reducible pairs, a classified invariant subspace.

    ``ReducibleLine`` is reported when some invariant subspace has signature
    (1,1); otherwise ``ReduciblePlane`` when one has signature (2,1).  The
    H-complement of a nondegenerate invariant subspace is invariant too, so
    a positive line or plane also counts.  Signatures are only meaningful
    for SU(3,1) pairs.
    """
    A, B = as_matrix(A), as_matrix(B)
    alg = algebra_basis(A, B, tol)
    dim = len(alg)
    if dim == 16:
        return ReducibilityReport(Verdict.IRREDUCIBLE, dim)
    if dim == 1:
        # scalar pair: every subspace is invariant, none is distinguished
        return ReducibilityReport(Verdict.OTHER, dim)
    subs = invariant_subspaces(A, B, alg)
    candidates: dict[Case, np.ndarray] = {}
    for sub in subs:
        p, n, z = subspace_signature(sub)
        if z:
            continue
        if (p, n) == (1, 1):
            candidates.setdefault(Case.LINE, sub)
        elif (p, n) == (2, 1):
            candidates.setdefault(Case.PLANE, sub)
    for case, verdict in ((Case.LINE, Verdict.LINE), (Case.PLANE, Verdict.PLANE)):
        if case in candidates:
            sub = candidates[case]
            sig = subspace_signature(sub)
            return ReducibilityReport(verdict, dim, sub, sig[:2], candidates)
    if subs:
        sig = subspace_signature(subs[0])
        return ReducibilityReport(Verdict.OTHER, dim, subs[0], sig[:2], candidates)
    return ReducibilityReport(Verdict.OTHER, dim)


# -- reduced invariants -------------------------------------------------------


@dataclass
class ReducedInvariants:
    case: Case
    names: tuple[str, ...]
    values: np.ndarray

    def as_dict(self):
        return dict(zip(self.names, self.values))

    def distance(self, other: "ReducedInvariants") -> float:
        if self.case != other.case:
            raise CaseMismatch(f"cannot compare {self.case.value} and {other.case.value} invariants")
        return float(np.max(np.abs(self.values - other.values)))


LINE_NAMES = ("tr A", "tr B", "tr AB", "sigma A", "sigma B", "sigma AB")
PLANE_NAMES = ("tr A", "tr B", "tr AB", "tr A^-1 B", "tr [A,B]", "sigma A", "sigma B")


def check_reduced_case(A, B, case, report: Optional[ReducibilityReport] = None) -> ReducibilityReport:
    """Validate the hypotheses shared by the reduced-invariant operations."""
    case = Case(case)
    if report is None:
        report = irreducibility(A, B)
    if not report.supports(case):
        raise CaseMismatch(f"pair is {report.verdict.value}, no invariant subspace of {case.value} type")
    for g, what in ((A, "A"), (B, "B")):
        kind = classify_isometry(g)
        if kind is not IsometryType.LOXODROMIC:
            raise NotLoxodromic(f"{what} is {kind.value}")
    return report


def reduced_invariants(A, B, case, report: Optional[ReducibilityReport] = None) -> ReducedInvariants:
    """The 6 (Line) or 7 (Plane) conjugacy invariants of a reducible loxodromic pair."""
    case = Case(case)
    check_reduced_case(A, B, case, report)
    A, B = as_matrix(A), as_matrix(B)
    AB = A @ B
    if case is Case.LINE:
        vals = [trace(A), trace(B), trace(AB), sigma(A), sigma(B), sigma(AB)]
        return ReducedInvariants(case, LINE_NAMES, np.array(vals, dtype=complex))
    Ai, Bi = adjugate(A), adjugate(B)
    comm = A @ B @ Ai @ Bi
    vals = [trace(A), trace(B), trace(AB), trace(Ai @ B), trace(comm), sigma(A), sigma(B)]
    return ReducedInvariants(case, PLANE_NAMES, np.array(vals, dtype=complex))


# -- block decomposition ------------------------------------------------------


def _h_orthonormal(basis):
    """Re-basis a nondegenerate subspace so its Gram matrix is diagonal +-1.

    Returns (positive columns, negative columns).
    """
    gram = np.conj(basis.T) @ H @ basis
    gram = (gram + np.conj(gram.T)) / 2
    ev, U = np.linalg.eigh(gram)
    if np.min(np.abs(ev)) <= SIGNATURE_TOL * max(1.0, np.max(np.abs(ev))):
        raise DecompositionFailed(f"invariant subspace is degenerate (Gram eigenvalues {ev})")
    cols = basis @ U / np.sqrt(np.abs(ev))
    return cols[:, ev > 0], cols[:, ev < 0]


def block_decompose(A, B, report: ReducibilityReport):
    """Return (k, (k^-1 A k, k^-1 B k)) with k in SU(3,1) and the blocks
    supported on BLOCKS["line"] or BLOCKS["plane"]."""
    if report.verdict is Verdict.LINE:
        case = Case.LINE
    elif report.verdict is Verdict.PLANE:
        case = Case.PLANE
    else:
        raise DecompositionFailed(f"no block form for verdict {report.verdict.value}")
    return block_decompose_case(A, B, report, case)


def block_decompose_case(A, B, report: ReducibilityReport, case):
    case = Case(case)
    A, B = as_matrix(A), as_matrix(B)
    sub = report.candidates.get(case)
    if sub is None:
        raise DecompositionFailed(f"no invariant subspace of {case.value} type")
    pos, neg = _h_orthonormal(sub)
    rest_pos, rest_neg = _h_orthonormal(h_complement(sub))
    if neg.shape[1] != 1 or rest_neg.shape[1] != 0:
        raise DecompositionFailed("invariant subspace does not contain the negative direction")
    p = pos[:, 0]
    n = neg[:, 0]
    f1 = (p + n) / np.sqrt(2)
    f4 = (p - n) / np.sqrt(2)
    if case is Case.LINE:
        mids = [rest_pos[:, 0], rest_pos[:, 1]]
    else:
        mids = [pos[:, 1], rest_pos[:, 0]]
    k = np.stack([f1, mids[0], mids[1], f4], axis=1)
    d = np.linalg.det(k)
    k[:, 1] /= d / abs(d)
    kinv = hermitian_adjoint(k)
    blocks = (kinv @ A @ k, kinv @ B @ k)
    resid = max(off_block_residual(m, case) for m in blocks)
    if resid > 1e-8 * max(1.0, np.max(np.abs(A)), np.max(np.abs(B))):
        raise DecompositionFailed(f"off-block residual {resid:.3g} after decomposition")
    return k, blocks


def block_mask(case) -> np.ndarray:
    mask = np.zeros((4, 4), bool)
    for part in BLOCKS[Case(case).value.lower()]:
        mask[np.ix_(part, part)] = True
    return mask


def off_block_residual(m, case) -> float:
    return float(np.max(np.abs(np.where(block_mask(case), 0, as_matrix(m)))))


# -- constructions ------------------------------------------------------------


def random_block_loxodromic(rng, case, modulus_range=(1.5, 3.0)) -> np.ndarray:
    """A loxodromic element preserving the block splitting of ``case``."""
    case = Case(case)
    modulus = rng.uniform(*modulus_range)
    theta, phase = rng.uniform(0, 2 * np.pi, 2)
    d = loxodromic_diagonal(modulus, theta, phase)
    k = expm(random_algebra_element(rng, block_algebra_basis(case.value.lower()), 1.5))
    return k @ d @ hermitian_adjoint(k)


def random_reducible_pair(seed: int, case, conjugate: bool = True):
    """A reducible loxodromic SU(3,1) pair of the given case, optionally
    conjugated by a random SU(3,1) element.  Returns (A, B, g)."""
    rng = np.random.default_rng(seed)
    A = random_block_loxodromic(rng, case)
    B = random_block_loxodromic(rng, case)
    g = random_su31(int(rng.integers(2**63)), 1.0).matrix if conjugate else np.eye(4, dtype=complex)
    gi = hermitian_adjoint(g)
    return g @ A @ gi, g @ B @ gi, g


# -- report -------------------------------------------------------------------


@dataclass
class ClassificationReport:
    reducibility: ReducibilityReport
    isometry_types: dict
    tolerances: dict

    def to_json(self) -> dict:
        r = self.reducibility
        basis = None
        if r.subspace_basis is not None:
            basis = [[[float(z.real), float(z.imag)] for z in col] for col in r.subspace_basis.T]
        return {
            "verdict": r.verdict.value,
            "span_dimension": r.span_dimension,
            "isometry_types": {k: (v.value if isinstance(v, IsometryType) else v) for k, v in self.isometry_types.items()},
            "subspace_basis": basis,
            "subspace_signature": list(r.subspace_signature) if r.subspace_signature else None,
            "tolerances": self.tolerances,
        }


def classify_pair(A, B, tol: float = MODULUS_TOL) -> ClassificationReport:
    """Reducibility and, for SU(3,1) generators, per-generator isometry types."""
    types = {}
    for g, name in ((A, "A"), (B, "B")):
        try:
            types[name] = classify_isometry(g, tol)
        except FlavorMismatch:
            types[name] = "not-SU31"
        except ToleranceAmbiguous as exc:
            types[name] = f"ambiguous: {exc}"
    tols = {
        "modulus": tol,
        "cluster_radius": CLUSTER_RADIUS,
        "diagonalizability": [DIAG_LO, DIAG_HI],
        "span": SPAN_TOL,
        "signature": SIGNATURE_TOL,
    }
    return ClassificationReport(irreducibility(A, B), types, tols)
