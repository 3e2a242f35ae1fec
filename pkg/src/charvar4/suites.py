"""Residual suites shared by ``charvar4 verify`` and ``charvar4 fuzz``.

Every suite compares a library identity against direct word evaluation and
reports the largest residual over its trials.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import coordinates as co
from .classify import classify_isometry, IsometryType
from .matrices import conjugate_by, eigenvalues, random_loxodromic, random_sl4, random_su31, trace
from .words import Word, trace_all


@dataclass
class SuiteResult:
    name: str
    trials: int
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol

    def to_json(self):
        out = asdict(self)
        out["passed"] = self.passed
        return out


def random_word(rng, max_len: int) -> Word:
    n = int(rng.integers(0, max_len + 1))
    return Word("".join(rng.choice(list("xyXY"), size=n)))


def sl4_pairs(n: int, seed: int):
    seeds = np.random.default_rng(seed).integers(2**63, size=(n, 2))
    return [(random_sl4(int(a)).matrix, random_sl4(int(b)).matrix) for a, b in seeds]


def su31_pairs(n: int, seed: int, scale: float = 1.0):
    seeds = np.random.default_rng(seed).integers(2**63, size=(n, 2))
    return [(random_su31(int(a), scale).matrix, random_su31(int(b), scale).matrix) for a, b in seeds]


def sublemma(pairs, rng, words_per_pair: int = 25, tol: float = 1e-7) -> SuiteResult:
    worst = 0.0
    for A, B in pairs:
        for _ in range(words_per_pair):
            u, v = random_word(rng, 4), random_word(rng, 4)
            worst = max(worst, co.verify_sublemma(u, v, A, B))
    return SuiteResult("sublemma", len(pairs), worst, tol)


def x_inverse(pairs, rng=None, tol: float = 1e-7) -> SuiteResult:
    worst = 0.0
    for A, B in pairs:
        for M in (A, B):
            t1, t2, t3, ti = trace_all(["x", "xx", "xxx", "X"], M, M)
            worst = max(worst, abs(co.recover_tr_x_inverse(t1, t2, t3) - ti))
    return SuiteResult("x-inverse", len(pairs), float(worst), tol)


def xy2(pairs, rng=None, tol: float = 1e-8) -> SuiteResult:
    worst = 0.0
    for A, B in pairs:
        direct = np.trace(A @ B @ B)
        worst = max(worst, abs(co.recover_tr_xy2(A, B) - direct))
    return SuiteResult("xy2", len(pairs), float(worst), tol)


def long_word(pairs, rng=None, tol: float = 1e-8) -> SuiteResult:
    worst = 0.0
    for A, B in pairs:
        for P, Q in ((A, B), (B, A)):
            direct = trace_all([co.LONG_WORD], P, Q)[0]
            worst = max(worst, abs(co.recover_long_word(P, Q) - direct))
    return SuiteResult("long-word", len(pairs), float(worst), tol)


def eliminated(pairs, rng=None, tol: float = 1e-9) -> SuiteResult:
    worst = 0.0
    for A, B in pairs:
        worst = max(worst, co.verify_eliminated_traces(A, B, tol).max_residual)
    return SuiteResult("eliminated", len(pairs), worst, tol)


def su31_reality(pairs, rng=None, tol: float = 1e-9) -> SuiteResult:
    """max |Im sigma(w)| over the five sigma words and max |tr(w^-1) - conj tr(w)|
    over the SU31_22 catalog."""
    worst = 0.0
    for A, B in pairs:
        vec = co.compute(co.SU31_22, A, B)
        worst = max(worst, max(abs(s.imag) for s in co.sigma_values(vec).values()))
        worst = max(worst, max(co.conjugation_residuals(co.SU31_22.words, A, B).values()))
    return SuiteResult("su31-reality", len(pairs), worst, tol)


def eigen_pairing(pairs, rng=None, tol: float = 1e-7) -> SuiteResult:
    worst = 0.0
    for A, B in pairs:
        for M in (A, B):
            ev = eigenvalues(M)
            mirrored = 1 / np.conj(ev)
            worst = max(worst, max(np.min(np.abs(ev - m)) for m in mirrored))
    return SuiteResult("eigen-pairing", len(pairs), float(worst), tol)


def conjugation_invariance(pairs, rng, tol: float = 1e-9) -> SuiteResult:
    worst = 0.0
    for A, B in pairs:
        g = random_su31(int(rng.integers(2**63))).matrix
        v1 = co.compute(co.SU31_22, A, B)
        v2 = co.compute(co.SU31_22, conjugate_by(g, A), conjugate_by(g, B))
        worst = max(worst, v1.distance(v2))
    return SuiteResult("conjugation-invariance", len(pairs), worst, tol)


def loxodromic_classification(n: int, seed: int) -> SuiteResult:
    seeds = np.random.default_rng(seed).integers(2**63, size=n)
    bad = sum(classify_isometry(random_loxodromic(int(s), 2.0)) is not IsometryType.LOXODROMIC for s in seeds)
    return SuiteResult("loxodromic-classification", n, float(bad), 0.5)


#: suites selectable by ``verify``: name -> (function, pair flavour)
VERIFY_SUITES: dict[str, tuple[Callable, str]] = {
    "sublemma": (sublemma, "sl4"),
    "x-inverse": (x_inverse, "sl4"),
    "xy2": (xy2, "sl4"),
    "su31-reality": (su31_reality, "su31"),
    "eliminated": (eliminated, "su31"),
    "long-word": (long_word, "su31"),
}


def run_fuzz(trials: int, seed: int) -> list[SuiteResult]:
    """All invariant suites on ``trials`` seeded pairs each."""
    if trials <= 0:
        return []
    rng = np.random.default_rng(seed)
    sl4 = sl4_pairs(trials, seed)
    su31 = su31_pairs(trials, seed + 1)
    results = [
        sublemma(sl4, rng, words_per_pair=5),
        x_inverse(sl4),
        xy2(sl4),
        su31_reality(su31),
        eliminated(su31),
        long_word(su31),
        eigen_pairing(su31),
        conjugation_invariance(su31, rng),
        loxodromic_classification(trials, seed),
    ]
    return results
