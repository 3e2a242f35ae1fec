"""Trace-coordinate catalogs and the identities relating their entries.

Three catalogs are shipped, each a frozen, ordered tuple of reduced words:

``SL4_DJOKOVIC_30``
    Degree-ordered minimal generators of the SL(4, C) pair invariants; the
    first 15 entries form a system of parameters.
``SL4_SYMMETRIC_30``
    A tau-stable variant with inverse letters: 16 base words, the 13 new
    tau-images, and x^-1 y^-1 x^2 y^2.
``SU31_22``
    Traces that separate polystable SU(3,1) pairs.

Catalog order is part of the file format and must not change.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import FlavorMismatch, InputError
from .matrices import (
    MEMBERSHIP_TOL,
    Flavor,
    GroupElement,
    as_matrix,
    expm,
    is_su31,
    sigma,
    sl4_basis,
    su31_basis,
    trace,
)
from .words import Word, as_word, evaluate, trace_all

# -- catalogs -----------------------------------------------------------------

_DJOKOVIC_PARAMETERS = (
    "x y xx xy yy xxx xxy xyy yyy xxxy xxyy xyyy xyxy xxyxxy yyxyyx"
)
_DJOKOVIC_EXTRA = (
    "xxxyy yyyxx xxyyxy yyxxyx xxxyyxy yyyxxyx xxxyyxxy yyyxxyyx xxxyyyxy "
    "yyyxxxyx xxxyxxyxy xxyyxyxxy yyxxyxyyx yyyxyyxyx xxxyyyxxyy"
)
_SYMMETRIC_BASE = (
    "x xx xy X xYY Xy xxyy xyxy Xyy xxyxxy xxyyxy Xyyxy Xyyxxy XYxy Xyxxyxy xxyyxyxxy"
)
_SYMMETRIC_EXTRA = "XYxxyy"
_SU31 = (
    "x y xx xy yy Xy xyy yxx xxyy xyxy XYxy Xyyxy Yxxyx xxyxxy yyxyyx xxyyxy "
    "XYxxyy yyxxyx Xyyxxy Yxxyyx Xyxxyxy Yxyyxyx"
)


@dataclass(frozen=True)
class Catalog:
    name: str
    words: tuple[Word, ...]
    flavor: Flavor = Flavor.SL4

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def index(self, w: Word | str) -> int:
        """Position of the entry with the same trace function as ``w``."""
        key = as_word(w).cyclic_normal_form()
        for i, entry in enumerate(self.words):
            if entry.cyclic_normal_form() == key:
                return i
        raise KeyError(f"{w} is not in catalog {self.name}")


def _words(spec: str) -> tuple[Word, ...]:
    return tuple(Word(s) for s in spec.split())


def _symmetric_words() -> tuple[Word, ...]:
    base = _words(_SYMMETRIC_BASE)
    out = list(base)
    seen = {w.cyclic_normal_form() for w in out}
    for w in base:
        t = w.tau()
        if t.cyclic_normal_form() not in seen:
            seen.add(t.cyclic_normal_form())
            out.append(t)
    out.extend(_words(_SYMMETRIC_EXTRA))
    return tuple(out)


SL4_DJOKOVIC_30 = Catalog("SL4_DJOKOVIC_30", _words(_DJOKOVIC_PARAMETERS) + _words(_DJOKOVIC_EXTRA))
SL4_SYMMETRIC_30 = Catalog("SL4_SYMMETRIC_30", _symmetric_words())
SU31_22 = Catalog("SU31_22", _words(_SU31), Flavor.SU31)
#: the 15 algebraically independent leading entries of SL4_DJOKOVIC_30
SL4_PARAMETERS_15 = Catalog("SL4_PARAMETERS_15", SL4_DJOKOVIC_30.words[:15])

CATALOGS = {c.name: c for c in (SL4_DJOKOVIC_30, SL4_SYMMETRIC_30, SU31_22, SL4_PARAMETERS_15)}

#: words w with (tr w, tr w^2) both recoverable from SU31_22; sigma(w) is real
SIGMA_WORDS = _words("x y xy xxy yyx")
#: the entries tr(w^2) whose imaginary part is dropped from the real system
DROPPED_IMAGINARY = _words("xx yy xyxy xxyxxy yyxyyx")
#: eliminated traces of the symmetric catalog, recovered as conjugates
ELIMINATED_WORDS = _words("X Y Xyy Yxx Yx YXyx")


def _validate_catalogs():
    expected = {"SL4_DJOKOVIC_30": 30, "SL4_SYMMETRIC_30": 30, "SU31_22": 22, "SL4_PARAMETERS_15": 15}
    for name, n in expected.items():
        cat = CATALOGS[name]
        forms = {w.cyclic_normal_form() for w in cat.words}
        if len(cat.words) != n or len(forms) != n:
            raise RuntimeError(f"catalog {name} is corrupt: {len(cat.words)} words, {len(forms)} distinct")
    for w in DROPPED_IMAGINARY:
        SU31_22.index(w)


_validate_catalogs()


def get_catalog(name: str | Catalog) -> Catalog:
    if isinstance(name, Catalog):
        return name
    try:
        return CATALOGS[name]
    except KeyError:
        raise InputError(f"unknown catalog {name!r}; choose from {sorted(CATALOGS)}") from None


# -- vectors ------------------------------------------------------------------

#: default max-norm tolerance for comparing trace vectors
VECTOR_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class TraceVector:
    catalog: str
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.shape != (len(get_catalog(self.catalog)),):
            raise InputError(f"{self.catalog} needs {len(get_catalog(self.catalog))} values, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def distance(self, other: "TraceVector") -> float:
        if other.catalog != self.catalog:
            raise InputError(f"cannot compare {self.catalog} with {other.catalog}")
        return float(np.max(np.abs(self.values - other.values)))

    def isclose(self, other: "TraceVector", tol: float = VECTOR_TOL) -> bool:
        return self.distance(other) < tol

    def as_dict(self) -> dict[str, complex]:
        return {str(w): complex(v) for w, v in zip(get_catalog(self.catalog).words, self.values)}


def real_slot_names() -> list[str]:
    dropped = set(DROPPED_IMAGINARY)
    names = []
    for w in SU31_22.words:
        names.append(f"Re:{w}")
        if w not in dropped:
            names.append(f"Im:{w}")
    return names


@dataclass(frozen=True, eq=False)
class RealCoordinateVector:
    slots: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if len(self.slots) != len(vals):
            raise InputError("slot map and values differ in length")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "slots", tuple(self.slots))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, slot: str) -> float:
        return float(self.values[self.slots.index(slot)])

    def complex_values(self) -> np.ndarray:
        """All 22 SU31_22 traces, restoring each dropped Im tr(w^2) as Im(tr(w)^2)."""
        out = np.empty(len(SU31_22), dtype=complex)
        for i, w in enumerate(SU31_22.words):
            re = self[f"Re:{w}"]
            if f"Im:{w}" in self.slots:
                out[i] = re + 1j * self[f"Im:{w}"]
            else:
                root = SU31_22.words[SU31_22.index(w.letters[: len(w) // 2])]
                t = self[f"Re:{root}"] + 1j * self[f"Im:{root}"]
                out[i] = re + 1j * (t * t).imag
        return out


# -- evaluation ---------------------------------------------------------------


def _require_su31(m, what: str, tol: float):
    if isinstance(m, GroupElement) and m.is_su31:
        return
    scale = max(1.0, float(np.max(np.abs(as_matrix(m)))) ** 2)
    rep = is_su31(m, tol * scale)
    if not rep:
        raise FlavorMismatch(
            f"{what} is not in SU(3,1) (form residual {rep.form_residual:.3g}, "
            f"det residual {rep.det_residual:.3g})"
        )


def require_su31_pair(A, B, tol: float = MEMBERSHIP_TOL):
    _require_su31(A, "A", tol)
    _require_su31(B, "B", tol)


def compute(catalog: str | Catalog, A, B, tol: float = MEMBERSHIP_TOL) -> TraceVector:
    cat = get_catalog(catalog)
    if cat.flavor is Flavor.SU31:
        require_su31_pair(A, B, tol)
    vals = trace_all(cat.words, as_matrix(A), as_matrix(B))
    return TraceVector(cat.name, vals)


def real_coords(A, B, tol: float = MEMBERSHIP_TOL) -> RealCoordinateVector:
    vec = compute(SU31_22, A, B, tol)
    return real_coords_from_traces(vec)


def real_coords_from_traces(vec: TraceVector) -> RealCoordinateVector:
    if vec.catalog != SU31_22.name:
        raise InputError(f"real coordinates need an SU31_22 vector, got {vec.catalog}")
    dropped = set(DROPPED_IMAGINARY)
    vals = []
    for w, v in zip(SU31_22.words, vec.values):
        vals.append(v.real)
        if w not in dropped:
            vals.append(v.imag)
    return RealCoordinateVector(tuple(real_slot_names()), np.array(vals))


def sigma_values(vec: TraceVector) -> dict[str, complex]:
    """sigma(w) = (tr(w)^2 - tr(w^2)) / 2 for the SIGMA_WORDS, read off a vector."""
    cat = get_catalog(vec.catalog)
    out = {}
    for w in SIGMA_WORDS:
        t = vec.values[cat.index(w)]
        t2 = vec.values[cat.index(w * w)]
        out[str(w)] = (t * t - t2) / 2
    return out


# -- identities ---------------------------------------------------------------

_FAULTS: set[str] = set()


def inject_fault(name: str, active: bool = True):
    """Test hook: ``"xy2-sign"`` flips one sign inside :func:`recover_tr_xy2`."""
    if active:
        _FAULTS.add(name)
    else:
        _FAULTS.discard(name)


def recover_tr_x_inverse(t1, t2, t3):
    """tr(x^-1) of a determinant-one matrix from tr(x), tr(x^2), tr(x^3)."""
    return (t3 + t1**3 / 2 - 1.5 * t1 * t2) / 3


def _tr(w, A, B):
    return complex(np.trace(evaluate(w, A, B)))


def verify_sublemma(u: Word | str, v: Word | str, A, B) -> float:
    """Residual of the Cayley-Hamilton substitution

    -tr(u x^-1 v) = tr(u x^3 v) - tr(x) tr(u x^2 v) + sigma(x) tr(u x v) - tr(x^-1) tr(u v)
    """
    A, B = as_matrix(A), as_matrix(B)
    U = evaluate(u, A, B)
    V = evaluate(v, A, B)
    Ainv = evaluate("X", A, B)
    A2 = A @ A
    lhs = -np.trace(U @ Ainv @ V)
    rhs = (
        np.trace(U @ A2 @ A @ V)
        - trace(A) * np.trace(U @ A2 @ V)
        + sigma(A) * np.trace(U @ A @ V)
        - trace(Ainv) * np.trace(U @ V)
    )
    return float(abs(lhs - rhs))


def recover_tr_xy2(A, B) -> complex:
    """tr(x y^2) through tr(x y^-2) and lower-order traces."""
    A, B = as_matrix(A), as_matrix(B)
    t = dict(zip(["y", "xy", "x", "Y", "xY", "xYY"], trace_all(["y", "xy", "x", "Y", "xY", "xYY"], A, B)))
    sig_y = sigma(B)
    last = -t["xYY"] if "xy2-sign" not in _FAULTS else t["xYY"]
    return complex(t["y"] * t["xy"] - sig_y * t["x"] + t["Y"] * t["xY"] + last)


#: tr((y^2 x)^2 x y x) and its tau-image, the words removed from the symmetric catalog
LONG_WORD = Word("yyxyyxxyx")


def recover_long_word(A, B, tol: float = MEMBERSHIP_TOL) -> complex:
    """tr(y^2 x y^2 x^2 y x) from SU31_22 entries and complex conjugates.

    Only valid in SU(3,1), where tr(w^-1) = conj(tr(w)).  Swap ``A`` and
    ``B`` for the tau-image.
    """
    require_su31_pair(A, B, tol)
    names = ["yyx", "yyxxyx", "yyxyyx", "xxy", "xY", "Xyyxy"]
    t = dict(zip(names, trace_all(names, as_matrix(A), as_matrix(B))))
    v = t["yyx"]
    return complex(
        v * t["yyxxyx"]
        - (v * v - t["yyxyyx"]) / 2 * t["xxy"]
        + np.conj(v) * t["xY"]
        - np.conj(t["Xyyxy"])
    )


@dataclass
class EliminationReport:
    residuals: dict[str, float]
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def ok(self) -> bool:
        return self.max_residual < self.tol


def conjugation_residuals(words: Sequence[Word | str], A, B) -> dict[str, float]:
    """|tr(w^-1) - conj tr(w)| for each word; all vanish on SU(3,1) pairs."""
    words = [as_word(w) for w in words]
    t = trace_all(words + [w.inverse() for w in words], as_matrix(A), as_matrix(B))
    n = len(words)
    return {str(w): float(abs(t[i] - np.conj(t[n + i]))) for i, w in enumerate(words)}


def verify_eliminated_traces(A, B, tol: float = 1e-9) -> EliminationReport:
    """Residuals for the six traces that SU(3,1) lets us drop.

    Raw matrices are accepted so the relation can be exhibited failing off
    the real form; a :class:`GroupElement` must carry the SU31 flavor.
    """
    for m, what in ((A, "A"), (B, "B")):
        if isinstance(m, GroupElement) and not m.is_su31:
            raise FlavorMismatch(f"{what} has flavor {m.flavor.value}, expected SU31")
    return EliminationReport(conjugation_residuals(ELIMINATED_WORDS, A, B), tol)


# -- independence -------------------------------------------------------------

#: relative singular-value threshold for numerical rank
RANK_REL_TOL = 1e-6


@dataclass
class JacobianReport:
    rank: int
    singular_values: np.ndarray
    catalog: str
    step: float
    threshold: float
    directions: int = field(default=0)


def jacobian(A, B, catalog: str | Catalog, h: float = 1e-5) -> np.ndarray:
    """Central-difference derivatives of the catalog traces.

    SL(4, C) catalogs: complex matrix of shape (n_words, 30), one column per
    traceless complex direction A -> A exp(tE) or B -> B exp(tE).
    SU31_22: real matrix of shape (2 n_words, 30) over the su(3,1) directions,
    rows stacking real then imaginary parts.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    cat = get_catalog(catalog)
    A, B = as_matrix(A), as_matrix(B)
    basis = su31_basis() if cat.flavor is Flavor.SU31 else sl4_basis()
    steps = np.concatenate([expm(h * basis), expm(-h * basis)])
    n = len(basis)
    As = np.concatenate([A @ steps[:n], np.broadcast_to(A, (n, 4, 4)), A @ steps[n:], np.broadcast_to(A, (n, 4, 4))])
    Bs = np.concatenate([np.broadcast_to(B, (n, 4, 4)), B @ steps[:n], np.broadcast_to(B, (n, 4, 4)), B @ steps[n:]])
    vals = trace_all(cat.words, As, Bs)
    J = ((vals[: 2 * n] - vals[2 * n :]) / (2 * h)).T
    if cat.flavor is Flavor.SU31:
        J = np.concatenate([J.real, J.imag])
    return J


def jacobian_report(A, B, catalog: str | Catalog, h: float = 1e-5, rel_tol: float = RANK_REL_TOL) -> JacobianReport:
    J = jacobian(A, B, catalog, h)
    s = np.linalg.svd(J, compute_uv=False)
    threshold = rel_tol * max(1.0, float(s[0]) if len(s) else 0.0)
    return JacobianReport(int(np.sum(s > threshold)), s, get_catalog(catalog).name, h, threshold, J.shape[1])


def jacobian_rank(A, B, catalog: str | Catalog, h: float = 1e-5) -> int:
    return jacobian_report(A, B, catalog, h).rank
