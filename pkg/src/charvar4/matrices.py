"""4x4 complex matrices, the (3,1) Hermitian form, and group sampling.

All functions accept plain ``numpy`` arrays; :class:`GroupElement` is a thin
validated wrapper used at API and file boundaries.  Most helpers also work on
stacks of shape ``(..., 4, 4)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, FlavorMismatch, InputError, NotUnimodular

#: default tolerance for determinant and form-preservation checks
MEMBERSHIP_TOL = 1e-9


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


#: matrix of the Hermitian form <z, w> = w* H z of signature (3, 1)
H = _frozen([[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]])
I4 = _frozen(np.eye(4))


class Flavor(str, enum.Enum):
    SL4 = "SL4"
    SU31 = "SU31"


def as_matrix(a) -> np.ndarray:
    if isinstance(a, GroupElement):
        return a.matrix
    m = np.asarray(a, dtype=complex)
    if m.shape[-2:] != (4, 4):
        raise InputError(f"expected a 4x4 matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class MembershipReport:
    ok: bool
    form_residual: float
    det_residual: float
    tol: float

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A validated determinant-one matrix, optionally in SU(3,1)."""

    matrix: np.ndarray
    flavor: Flavor = Flavor.SL4
    tol: float = MEMBERSHIP_TOL

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (4, 4):
            raise InputError(f"expected a 4x4 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InputError("matrix has non-finite entries")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        det_res = abs(np.linalg.det(m) - 1)
        if det_res > self.tol:
            raise NotUnimodular(f"|det - 1| = {det_res:.3g} exceeds {self.tol:.3g}")
        if self.flavor is Flavor.SU31:
            rep = is_su31(m, self.tol)
            if not rep:
                raise FlavorMismatch(
                    f"not in SU(3,1): form residual {rep.form_residual:.3g}, tol {self.tol:.3g}"
                )

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __matmul__(self, other):
        other_m = as_matrix(other)
        flavor = self.flavor
        if not (isinstance(other, GroupElement) and other.flavor is Flavor.SU31):
            flavor = Flavor.SL4
        return GroupElement(self.matrix @ other_m, flavor, max(self.tol, getattr(other, "tol", 0)))

    @property
    def is_su31(self) -> bool:
        return self.flavor is Flavor.SU31


def multiply(a, b) -> np.ndarray:
    return as_matrix(a) @ as_matrix(b)


def trace(a) -> complex:
    return np.trace(as_matrix(a), axis1=-2, axis2=-1)


def det(a):
    return np.linalg.det(as_matrix(a))


def adjugate(a) -> np.ndarray:
    """Classical adjugate: entry (i, j) is (-1)^(i+j) times the minor
    obtained by deleting row j and column i."""
    m = as_matrix(a)
    out = np.empty(m.shape, dtype=complex)
    keep = [[r for r in range(4) if r != k] for k in range(4)]
    for i in range(4):
        for j in range(4):
            minor = m[..., keep[j], :][..., :, keep[i]]
            out[..., i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return out


def inverse(a, tol: float = MEMBERSHIP_TOL):
    """Inverse of a determinant-one element via its adjugate.

    Returns a :class:`GroupElement` of the same flavor when given one,
    otherwise an array.
    """
    m = as_matrix(a)
    d = np.linalg.det(m)
    if np.max(np.abs(d - 1)) > tol:
        raise NotUnimodular(f"|det - 1| = {np.max(np.abs(d - 1)):.3g} exceeds {tol:.3g}")
    inv = adjugate(m)
    if isinstance(a, GroupElement):
        return GroupElement(inv, a.flavor, max(a.tol, tol))
    return inv


def hermitian_adjoint(a) -> np.ndarray:
    """H^-1 a* H, which equals a^-1 exactly when a preserves the form."""
    m = as_matrix(a)
    return H @ np.conj(np.swapaxes(m, -1, -2)) @ H


def sigma(a) -> complex:
    """Second characteristic-polynomial coefficient (tr(a)^2 - tr(a^2)) / 2."""
    m = as_matrix(a)
    t = trace(m)
    return (t * t - trace(m @ m)) / 2


@dataclass(frozen=True)
class CharPolyData:
    """Coefficients of x^4 - t1 x^3 + sigma x^2 - t_inv x + det."""

    t1: complex
    sigma: complex
    t_inv: complex
    det: complex

    def coefficients(self) -> np.ndarray:
        """Monic coefficients, highest degree first."""
        return np.array([1, -self.t1, self.sigma, -self.t_inv, self.det], dtype=complex)

    def evaluate_at(self, m) -> np.ndarray:
        m = as_matrix(m)
        m2 = m @ m
        m3 = m2 @ m
        return m3 @ m - self.t1 * m3 + self.sigma * m2 - self.t_inv * m + self.det * np.eye(4)


def char_poly(a, tol: float = MEMBERSHIP_TOL) -> CharPolyData:
    m = as_matrix(a)
    d = complex(np.linalg.det(m))
    if abs(d - 1) > tol:
        raise NotUnimodular(f"|det - 1| = {abs(d - 1):.3g} exceeds {tol:.3g}")
    return CharPolyData(complex(trace(m)), complex(sigma(m)), complex(trace(adjugate(m))), d)


def eigenvalues(a) -> np.ndarray:
    """Eigenvalues with multiplicity, sorted by (real, imaginary) part."""
    m = as_matrix(a)
    if not np.all(np.isfinite(m)):
        raise ConvergenceFailure("matrix has non-finite entries")
    try:
        ev = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return ev[np.lexsort((ev.imag, ev.real))]


def is_su31(a, tol: float = MEMBERSHIP_TOL) -> MembershipReport:
    m = as_matrix(a)
    form_res = float(np.max(np.abs(np.conj(m.T) @ H @ m - H)))
    det_res = float(abs(np.linalg.det(m) - 1))
    return MembershipReport(bool(form_res <= tol and det_res <= tol), form_res, det_res, tol)


def conjugate_by(g, m) -> np.ndarray:
    """g m g^-1 for a determinant-one g."""
    g = as_matrix(g)
    return g @ as_matrix(m) @ adjugate(g)


def expm(x) -> np.ndarray:
    return scipy.linalg.expm(np.asarray(x, dtype=complex))


# -- Lie algebras -------------------------------------------------------------


def _orthonormal_real_span(mats, rank=None) -> np.ndarray:
    """Real-orthonormal basis (Frobenius inner product Re tr(X* Y)) of a real span."""
    mats = np.asarray(mats, dtype=complex)
    flat = np.concatenate([mats.real.reshape(len(mats), -1), mats.imag.reshape(len(mats), -1)], axis=1)
    _, s, vt = np.linalg.svd(flat, full_matrices=False)
    if rank is None:
        rank = int(np.sum(s > 1e-10 * s[0]))
    vt = vt[:rank]
    basis = vt[:, :16] + 1j * vt[:, 16:]
    return basis.reshape(rank, 4, 4)


@lru_cache(maxsize=None)
def _su31_basis() -> np.ndarray:
    anti = []
    for j in range(4):
        e = np.zeros((4, 4), complex)
        e[j, j] = 1j
        anti.append(e)
        for k in range(j + 1, 4):
            e = np.zeros((4, 4), complex)
            e[j, k], e[k, j] = 1, -1
            anti.append(e)
            e = np.zeros((4, 4), complex)
            e[j, k], e[k, j] = 1j, 1j
            anti.append(e)
    algebra = []
    for k in anti:
        x = H @ k
        algebra.append(x - np.trace(x) / 4 * np.eye(4))
    basis = _orthonormal_real_span(algebra, rank=15)
    basis.setflags(write=False)
    return basis


def su31_basis() -> np.ndarray:
    """Frobenius-orthonormal real basis of {X : X* H + H X = 0, tr X = 0}, shape (15, 4, 4)."""
    return _su31_basis()


@lru_cache(maxsize=None)
def _sl4_basis() -> np.ndarray:
    mats = []
    for j in range(4):
        for k in range(4):
            if j != k:
                e = np.zeros((4, 4), complex)
                e[j, k] = 1
                mats.append(e)
    for j in range(3):
        e = np.zeros((4, 4), complex)
        e[j, j], e[3, 3] = 1, -1
        mats.append(e)
    basis = np.array(mats)
    basis.setflags(write=False)
    return basis


def sl4_basis() -> np.ndarray:
    """Complex basis of traceless 4x4 matrices, shape (15, 4, 4)."""
    return _sl4_basis()


#: index sets of the two block splittings, both compatible with H
BLOCKS = {"line": ((0, 3), (1, 2)), "plane": ((0, 1, 3), (2,))}


@lru_cache(maxsize=None)
def _block_basis(case: str) -> np.ndarray:
    mask = np.zeros((4, 4), bool)
    for part in BLOCKS[case]:
        mask[np.ix_(part, part)] = True
    masked = [np.where(mask, x, 0) for x in su31_basis()]
    basis = _orthonormal_real_span(masked)
    basis.setflags(write=False)
    return basis


def block_algebra_basis(case: str) -> np.ndarray:
    """Basis of the block-diagonal subalgebra of su(3,1) for ``case`` in
    {"line", "plane"}: s(u(1,1)+u(2)) on {e1,e4}+{e2,e3} (7-dim) or
    s(u(2,1)+u(1)) on {e1,e2,e4}+{e3} (9-dim)."""
    return _block_basis(case)


def algebra_element(basis, coeffs) -> np.ndarray:
    return np.tensordot(np.asarray(coeffs, dtype=float), basis, axes=(0, 0))


# -- sampling -----------------------------------------------------------------


def _rng(seed):
    return np.random.default_rng(seed)


def random_sl4(seed: int) -> GroupElement:
    """Gaussian complex matrix rescaled to determinant one (principal fourth root)."""
    rng = _rng(seed)
    while True:
        m = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / np.sqrt(2)
        d = np.linalg.det(m)
        if abs(d) > 0.05:
            break
    m = m / d ** 0.25
    m = m / np.linalg.det(m) ** 0.25
    return GroupElement(m, Flavor.SL4)


def random_algebra_element(rng, basis, scale: float) -> np.ndarray:
    coeffs = rng.standard_normal(len(basis)) * scale / np.sqrt(len(basis))
    return algebra_element(basis, coeffs)


def random_su31(seed: int, scale: float = 1.0) -> GroupElement:
    """exp of a Gaussian element of su(3,1) with expected Frobenius norm ``scale``."""
    if scale < 0:
        raise ValueError("scale must be non-negative")
    x = random_algebra_element(_rng(seed), su31_basis(), scale)
    return GroupElement(expm(x), Flavor.SU31)


def loxodromic_diagonal(modulus: float, theta: float, phase: float) -> np.ndarray:
    """diag(lam, u, v, 1/conj(lam)) with |lam| = modulus and det 1."""
    lam = modulus * np.exp(1j * theta)
    u = np.exp(1j * phase)
    v = np.exp(-2j * theta) / u
    return np.diag([lam, u, v, 1 / np.conj(lam)])


def random_loxodromic(seed: int, modulus: float = 2.0) -> GroupElement:
    if modulus <= 1:
        raise ValueError("modulus must exceed 1")
    rng = _rng(seed)
    theta, phase = rng.uniform(0, 2 * np.pi, 2)
    k = random_su31(int(rng.integers(2**63)), 1.0).matrix
    g = k @ loxodromic_diagonal(modulus, theta, phase) @ hermitian_adjoint(k)
    return GroupElement(g, Flavor.SU31, 1e-8)
