"""Angular-momentum algebra: Wigner 6-j symbols and spin matrices.

The 6-j symbol is evaluated with the Racah single-sum formula in exact
integer/rational arithmetic (Python integers are unbounded, so there is no
overflow regime); only the final square root is taken in floating point.
Arguments are carried internally as doubled integers ``2j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

#: largest doubled argument accepted by :func:`wigner6j` (j <= 50)
MAX_TWICE_J = 100


@dataclass(frozen=True, order=True)
class HalfInt:
    """Non-negative integer or half-integer stored exactly as ``2j``."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, (int, np.integer)):
            raise TypeError("twice must be an integer")
        if self.twice < 0:
            raise ValueError(f"angular momentum must be >= 0, got 2j={self.twice}")

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Coerce an int, float, Fraction, string ("7/2") or HalfInt."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            value = Fraction(value)
        t = Fraction(value) * 2
        if t.denominator != 1:
            raise ValueError(f"{value!r} is not an integer or half-integer")
        return cls(int(t))

    @property
    def value(self) -> float:
        return self.twice / 2

    def __float__(self):
        return self.twice / 2

    def __str__(self):
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"


def _twice(x) -> int:
    return HalfInt.of(x).twice


def _triad_ok(a: int, b: int, c: int) -> bool:
    """Triangle condition on doubled arguments, including integer perimeter."""
    return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b


def _delta_sq(a: int, b: int, c: int) -> Fraction:
    # a, b, c doubled; the half-sums below are integers when _triad_ok holds
    f = math.factorial
    return Fraction(
        f((a + b - c) // 2) * f((a - b + c) // 2) * f((-a + b + c) // 2),
        f((a + b + c) // 2 + 1),
    )


@lru_cache(maxsize=None)
def wigner6j_squared_exact(a: int, b: int, c: int, d: int, e: int, f: int):
    """Return ``(sign, value**2)`` of {a/2 b/2 c/2; d/2 e/2 f/2} exactly.

    ``sign`` is -1, 0 or +1 and ``value**2`` is a :class:`Fraction`.
    """
    if not (_triad_ok(a, b, c) and _triad_ok(a, e, f)
            and _triad_ok(d, b, f) and _triad_ok(d, e, c)):
        return 0, Fraction(0)
    fac = math.factorial
    # triad sums and column-pair sums, all integers
    t1 = (a + b + c) // 2
    t2 = (a + e + f) // 2
    t3 = (d + b + f) // 2
    t4 = (d + e + c) // 2
    p1 = (a + b + d + e) // 2
    p2 = (b + c + e + f) // 2
    p3 = (c + a + f + d) // 2
    total = Fraction(0)
    for t in range(max(t1, t2, t3, t4), min(p1, p2, p3) + 1):
        den = (fac(t - t1) * fac(t - t2) * fac(t - t3) * fac(t - t4)
               * fac(p1 - t) * fac(p2 - t) * fac(p3 - t))
        term = Fraction(fac(t + 1), den)
        total += -term if t % 2 else term
    if total == 0:
        return 0, Fraction(0)
    norm = _delta_sq(a, b, c) * _delta_sq(a, e, f) * _delta_sq(d, b, f) * _delta_sq(d, e, c)
    sign = 1 if total > 0 else -1
    return sign, total * total * norm


def wigner6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}.

    Arguments may be ints, floats, Fractions, strings like ``"7/2"`` or
    :class:`HalfInt`. Returns 0.0 when any triangle condition fails.
    """
    tw = tuple(_twice(j) for j in (j1, j2, j3, j4, j5, j6))
    if max(tw) > MAX_TWICE_J:
        raise ValueError(f"6-j arguments limited to j <= {MAX_TWICE_J // 2}")
    sign, sq = wigner6j_squared_exact(*tw)
    if sign == 0:
        return 0.0
    return sign * math.sqrt(sq)


@dataclass(frozen=True)
class SpinMatrices:
    """Cartesian spin operators in the |F, mF> basis, mF ascending."""

    F: HalfInt
    Fx: np.ndarray
    Fy: np.ndarray
    Fz: np.ndarray

    @property
    def dim(self) -> int:
        return self.F.twice + 1

    @property
    def casimir(self) -> float:
        f = self.F.value
        return f * (f + 1)

    @property
    def F2(self) -> np.ndarray:
        return self.casimir * np.eye(self.dim, dtype=complex)

    def components(self):
        return (self.Fx, self.Fy, self.Fz)

    def m_values(self) -> np.ndarray:
        return np.arange(-self.F.twice, self.F.twice + 1, 2) / 2


@lru_cache(maxsize=64)
def _spin_matrices(twice_f: int) -> SpinMatrices:
    f = twice_f / 2
    m = np.arange(-twice_f, twice_f + 1, 2) / 2
    # <m+1| F+ |m> on the first sub-diagonal (column m -> row m+1)
    lower = np.sqrt(f * (f + 1) - m[:-1] * (m[:-1] + 1))
    fplus = np.diag(lower, -1).astype(complex)
    fminus = fplus.conj().T
    fx = (fplus + fminus) / 2
    fy = (fplus - fminus) / 2j
    fz = np.diag(m).astype(complex)
    for arr in (fx, fy, fz):
        arr.setflags(write=False)
    return SpinMatrices(HalfInt(twice_f), fx, fy, fz)


def spin_matrices(F) -> SpinMatrices:
    """Spin-F matrices with hbar = 1; the returned arrays are read-only."""
    twice_f = _twice(F)
    if twice_f < 1:
        raise ValueError("F must be >= 1/2")
    return _spin_matrices(twice_f)
