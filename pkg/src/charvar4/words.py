"""Reduced words in the free group on ``x`` and ``y``.

Words are written over the ASCII alphabet ``x, y, X, Y`` where the capital
letter is the inverse of the lower-case one, so ``"Xyyxy"`` is
x^-1 y^2 x y.  Every constructor returns a freely reduced word.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, SingularMatrix

ALPHABET = "xyXY"

#: condition number above which an inverse letter refuses to evaluate
DEFAULT_COND_LIMIT = 1e12

_SUPERSCRIPT = str.maketrans("-0123456789", "⁻⁰¹²³⁴⁵⁶⁷⁸⁹")


class Letter(enum.Enum):
    X = "x"
    Y = "y"
    XINV = "X"
    YINV = "Y"

    @property
    def inverse(self) -> "Letter":
        return Letter(self.value.swapcase())

    @property
    def is_inverse(self) -> bool:
        return self.value.isupper()

    @property
    def weight(self) -> int:
        return 3 if self.is_inverse else 1


def _reduce_str(s: str) -> str:
    out: list[str] = []
    for c in s:
        if out and out[-1] == c.swapcase():
            out.pop()
        else:
            out.append(c)
    return "".join(out)


@dataclass(frozen=True, order=True)
class Word:
    """A freely reduced word; ``letters`` is the ASCII spelling."""

    letters: str = ""

    def __post_init__(self):
        bad = set(self.letters) - set(ALPHABET)
        if bad:
            raise InputError(
                f"invalid letters {sorted(bad)!r} in word {self.letters!r}; "
                f"allowed alphabet is {ALPHABET!r}"
            )
        object.__setattr__(self, "letters", _reduce_str(self.letters))

    @classmethod
    def parse(cls, text: str) -> "Word":
        return cls(text)

    @classmethod
    def from_letters(cls, seq: Iterable[Letter]) -> "Word":
        return cls("".join(Letter(l).value for l in seq))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return (Letter(c) for c in self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def __str__(self):
        return self.letters

    def __repr__(self):
        return f"Word({self.letters!r})"

    def pretty(self) -> str:
        """Exponent notation, e.g. ``x⁻¹y²xy``; the empty word prints as ``1``."""
        if not self.letters:
            return "1"
        parts = []
        i = 0
        s = self.letters
        while i < len(s):
            j = i
            while j < len(s) and s[j] == s[i]:
                j += 1
            n = j - i
            exp = -n if s[i].isupper() else n
            parts.append(s[i].lower() + ("" if exp == 1 else str(exp).translate(_SUPERSCRIPT)))
            i = j
        return "".join(parts)

    def inverse(self) -> "Word":
        return Word(self.letters[::-1].swapcase())

    def tau(self) -> "Word":
        return Word(self.letters.translate(str.maketrans("xyXY", "yxYX")))

    def iota(self) -> "Word":
        return Word(self.letters.swapcase())

    @property
    def weighted_length(self) -> int:
        return sum(3 if c.isupper() else 1 for c in self.letters)

    def exponent_sums(self) -> tuple[int, int]:
        s = self.letters
        return s.count("x") - s.count("X"), s.count("y") - s.count("Y")

    def cyclic_reduce(self) -> "Word":
        s = self.letters
        while len(s) >= 2 and s[0] == s[-1].swapcase():
            s = s[1:-1]
        return Word(s)

    def cyclic_normal_form(self) -> str:
        """Lexicographically least rotation of the cyclic reduction.

        Two words with equal normal forms have equal traces on every pair.
        """
        s = self.cyclic_reduce().letters
        if not s:
            return s
        return min(s[i:] + s[:i] for i in range(len(s)))


def reduce(seq: Sequence[Letter] | str) -> Word:
    if isinstance(seq, str):
        return Word(seq)
    return Word.from_letters(seq)


def invert(w: Word) -> Word:
    return w.inverse()


def apply_tau(w: Word) -> Word:
    return w.tau()


def apply_iota(w: Word) -> Word:
    return w.iota()


def weighted_length(w: Word) -> int:
    return w.weighted_length


def as_word(w: Word | str) -> Word:
    return w if isinstance(w, Word) else Word(w)


class _Context:
    """Generators and lazily computed inverses for one evaluation."""

    def __init__(self, A, B, cond_limit):
        self.mats = {"x": np.asarray(A, dtype=complex), "y": np.asarray(B, dtype=complex)}
        self.cond_limit = cond_limit
        shape = self.mats["x"].shape
        if shape[-2:] != (4, 4) or self.mats["y"].shape != shape:
            raise InputError(f"expected matching (..., 4, 4) arrays, got {shape} and {self.mats['y'].shape}")
        self.identity = np.broadcast_to(np.eye(4, dtype=complex), shape)

    def __getitem__(self, c):
        m = self.mats.get(c)
        if m is None:
            from .matrices import adjugate

            base = self.mats[c.lower()]
            cond = np.linalg.cond(base)
            if not np.all(np.isfinite(cond)) or np.max(cond) > self.cond_limit:
                raise SingularMatrix(
                    f"generator {c.lower()} has condition number {np.max(cond):.3g} "
                    f"(limit {self.cond_limit:.3g})"
                )
            det = np.linalg.det(base)
            m = adjugate(base) / det[..., None, None]
            self.mats[c] = m
        return m


def evaluate(w: Word | str, A, B, cond_limit: float = DEFAULT_COND_LIMIT) -> np.ndarray:
    """Substitute ``A`` for x and ``B`` for y and multiply left to right.

    ``A`` and ``B`` may be stacks of shape ``(..., 4, 4)``.
    """
    w = as_word(w)
    ctx = _Context(A, B, cond_limit)
    out = ctx.identity.copy()
    for c in w.letters:
        out = out @ ctx[c]
    return out


def evaluate_all(words: Sequence[Word | str], A, B, cond_limit: float = DEFAULT_COND_LIMIT) -> list[np.ndarray]:
    """Evaluate several words, sharing common prefixes."""
    ctx = _Context(A, B, cond_limit)
    cache: dict[str, np.ndarray] = {"": ctx.identity}
    results = []
    for w in words:
        s = as_word(w).letters
        k = len(s)
        while s[:k] not in cache:
            k -= 1
        m = cache[s[:k]]
        for i in range(k, len(s)):
            m = m @ ctx[s[i]]
            cache[s[: i + 1]] = m
        results.append(m)
    return results


def trace_all(words: Sequence[Word | str], A, B, cond_limit: float = DEFAULT_COND_LIMIT) -> np.ndarray:
    """Traces of ``words`` evaluated at ``(A, B)``; the word index is the last axis."""
    mats = evaluate_all(words, A, B, cond_limit)
    return np.stack([np.trace(m, axis1=-2, axis2=-1) for m in mats], axis=-1)
