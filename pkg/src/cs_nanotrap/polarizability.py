"""Scalar, vector and tensor dynamic polarizabilities of a hyperfine manifold.

Every partner level n'J' coupled to the manifold's level contributes, for
each hyperfine F' of the partner, a term built from the squared reduced
dipole element, 6-j recoupling factors and the rank-K propagator

    G(K) = (1/hbar) [1/(w_ji - w) + (-1)^K/(w_ji + w)],

whose counter-rotating part changes sign for the vector rank K = 1.
Hyperfine splittings are neglected, so w_ji = +/- w_J'J for every F'
(positive for partners above the level, negative for partners below).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .angular import HalfInt, wigner6j
from .atomicdata import (CS_NUCLEAR_SPIN, AtomModel, LevelId, hyperfine_levels,
                         reduced_dipole_sq, transition_omega)
from .constants import HBAR
from .errors import NanotrapError, ResonanceError

#: default half-width of the resonance guard band, rad/s (2 pi x 1 GHz)
DEFAULT_GUARD = 2.0 * math.pi * 1e9


@dataclass(frozen=True, order=True)
class Manifold:
    """Hyperfine manifold (n L J, F) of 133Cs."""

    level: LevelId
    F: HalfInt

    def __post_init__(self):
        F = HalfInt.of(self.F)
        object.__setattr__(self, "F", F)
        I2 = CS_NUCLEAR_SPIN.twice
        if not (abs(self.level.J.twice - I2) <= F.twice <= self.level.J.twice + I2
                and (F.twice - self.level.J.twice - I2) % 2 == 0):
            raise ValueError(f"F={F} not allowed for J={self.level.J}, I=7/2")

    @classmethod
    def parse(cls, text: str) -> "Manifold":
        """Parse ``"6S1/2:F=4"`` (also ``"6S1/2 F=4"`` or ``"6S1/2,4"``)."""
        for sep in (":", " ", ","):
            if sep in text.strip():
                lvl, f = text.strip().split(sep, 1)
                break
        else:
            raise ValueError(f"cannot parse manifold {text!r}; expected e.g. 6S1/2:F=4")
        f = f.strip()
        if f.upper().startswith("F"):
            f = f[1:].lstrip("'").lstrip("=")
        return cls(LevelId.parse(lvl), HalfInt.of(f.strip()))

    @property
    def dim(self) -> int:
        return self.F.twice + 1

    def __str__(self):
        return f"{self.level}:F={self.F}"


@dataclass(frozen=True)
class PolarizabilityTriple:
    alpha0: float
    alpha1: float
    alpha2: float
    omega: float

    def __iter__(self):
        return iter((self.alpha0, self.alpha1, self.alpha2))


def propagator(K: int, omega_ji: float, omega: float, guard: float = DEFAULT_GUARD) -> float:
    """Rank-K propagator G(K) in 1/J for a signed transition frequency ``omega_ji``."""
    if K not in (0, 1, 2):
        raise ValueError(f"rank must be 0, 1 or 2, got {K}")
    if omega < 0:
        raise ValueError("drive frequency must be >= 0")
    if abs(abs(omega_ji) - omega) <= guard:
        raise ResonanceError(
            f"drive {omega:.6e} rad/s within guard band of line at {abs(omega_ji):.6e} rad/s")
    sign = -1.0 if K == 1 else 1.0
    return (1.0 / (omega_ji - omega) + sign / (omega_ji + omega)) / HBAR


def _parity(twice_sum: int) -> float:
    # (-1)^(F+F'), F+F' is always an integer here
    return -1.0 if (twice_sum // 2) % 2 else 1.0


@lru_cache(maxsize=None)
def _angular_weights(twice_j: int, twice_jp: int, twice_f: int, twice_i: int):
    """Per-F' angular factors (c0, c1, c2) for one partner, independent of frequency."""
    J, Jp, F, I = (HalfInt(t) for t in (twice_j, twice_jp, twice_f, twice_i))
    f = twice_f / 2
    pre1 = 2.0 * math.sqrt(3 * f * (2 * f + 1) / (2 * (f + 1)))
    pre2 = (math.sqrt(10 * f * (2 * f + 1) * (2 * f - 1) / (3 * (f + 1) * (2 * f + 3)))
            if twice_f >= 2 else 0.0)
    one, two = HalfInt(2), HalfInt(4)
    out = []
    for Fp in hyperfine_levels(Jp, I):
        recoup = (Fp.twice + 1) * wigner6j(J, Jp, one, Fp, F, I) ** 2
        if recoup == 0.0:
            continue
        par = _parity(twice_f + Fp.twice)
        c0 = recoup / 3.0
        c1 = par * pre1 * wigner6j(one, one, one, F, F, Fp) * recoup
        c2 = par * pre2 * wigner6j(one, one, two, F, F, Fp) * recoup
        out.append((c0, c1, c2))
    return tuple(out)


def alpha_triple(atom: AtomModel, m: Manifold, omega: float,
                 guard: float = DEFAULT_GUARD) -> PolarizabilityTriple:
    """(alpha0, alpha1, alpha2) of manifold ``m`` at drive frequency ``omega``.

    Units are C^2 m^2 / J (divide by ``AU_POLARIZABILITY`` for atomic units).
    """
    return _alpha_triple_cached(atom, m, float(omega), float(guard))


@lru_cache(maxsize=65536)
def _alpha_triple_cached(atom, m, omega, guard):
    couplings = atom.couplings(m.level)
    if not couplings:
        raise NanotrapError(f"no transitions touch level {m.level}")
    a0 = a1 = a2 = 0.0
    for partner, rec, sign in couplings:
        d2 = reduced_dipole_sq(rec)
        w_ji = sign * transition_omega(rec)
        g0 = propagator(0, w_ji, omega, guard)
        g1 = propagator(1, w_ji, omega, guard)
        g2 = propagator(2, w_ji, omega, guard)
        weights = _angular_weights(m.level.J.twice, partner.J.twice, m.F.twice,
                                   atom.nuclear_spin.twice)
        for c0, c1, c2 in weights:
            a0 += d2 * c0 * g0
            a1 += d2 * c1 * g1
            a2 += d2 * c2 * g2
    return PolarizabilityTriple(a0, a1, a2, omega)
