"""Magic-wavelength search for a linearly polarized plane wave."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .atomicdata import AtomModel
from .constants import intensity_to_field_sq, wavelength_to_omega
from .errors import MultipleRootsError, NoSignChangeError, ResonanceError
from .lightshift import FieldBilinear, adiabatic_levels, build_hamiltonian
from .polarizability import DEFAULT_GUARD, Manifold

#: plane-wave intensity used for the preset searches, W/m^2
DEFAULT_INTENSITY = 2.9e9

# weights(eigenvalues) -> normalized weights; None means uniform over mF
Weighting = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MagicSearchSpec:
    ground: Manifold
    excited: Manifold
    intensity: float = DEFAULT_INTENSITY
    bracket: tuple[float, float] = (930.0, 940.0)
    tolerance: float = 0.01

    def __post_init__(self):
        lo, hi = self.bracket
        if not lo < hi:
            raise ValueError("bracket must satisfy lambda_lo < lambda_hi")
        if not self.intensity > 0:
            raise ValueError("intensity must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


def averaged_shift(m: Manifold, omega: float, intensity: float, atom: AtomModel,
                   weights: Weighting | None = None, guard: float = DEFAULT_GUARD) -> float:
    """mF-averaged light shift (J) of an x-polarized plane wave."""
    e = np.array([np.sqrt(intensity_to_field_sq(intensity)), 0.0, 0.0])
    H = build_hamiltonian(m, FieldBilinear.from_field(omega, e), atom, guard)
    levels, _ = adiabatic_levels(H)
    if weights is None:
        return float(np.mean(levels))
    w = np.asarray(weights(levels), dtype=float)
    return float(np.dot(w, levels) / np.sum(w))


def differential_shift(spec: MagicSearchSpec, lambda_nm: float, atom: AtomModel,
                       weights: Weighting | None = None) -> float:
    """Excited minus ground averaged shift (J) at ``lambda_nm``."""
    w = wavelength_to_omega(lambda_nm * 1e-9)
    return (averaged_shift(spec.excited, w, spec.intensity, atom, weights)
            - averaged_shift(spec.ground, w, spec.intensity, atom, weights))


def find_magic_all(spec: MagicSearchSpec, atom: AtomModel, weights: Weighting | None = None,
                   scan_step: float = 0.05) -> list[float]:
    """All crossings of the differential shift inside ``spec.bracket`` (nm).

    Sign changes caused by an atomic pole are discarded: a genuine crossing
    shrinks |delta| under bisection, a pole makes it grow.
    """
    lo, hi = spec.bracket
    n = max(int(np.ceil((hi - lo) / scan_step)), 2) + 1
    grid = np.linspace(lo, hi, n)
    vals = []
    for lam in grid:
        try:
            vals.append(differential_shift(spec, lam, atom, weights))
        except ResonanceError:
            vals.append(np.nan)
    vals = np.array(vals)
    roots = []
    for i in range(n - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if not (np.isfinite(fa) and np.isfinite(fb)) or np.sign(fa) == np.sign(fb):
            continue
        root = _bisect(spec, atom, weights, a, b, fa, fb)
        if root is not None:
            roots.append(root)
    return roots


def _bisect(spec, atom, weights, a, b, fa, fb):
    start = max(abs(fa), abs(fb))
    while b - a > spec.tolerance / 4:
        mid = 0.5 * (a + b)
        try:
            fm = differential_shift(spec, mid, atom, weights)
        except ResonanceError:
            return None
        if np.sign(fm) == np.sign(fa):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    if max(abs(fa), abs(fb)) > start:
        return None  # pole, not a crossing
    return float(0.5 * (a + b))


def find_magic(spec: MagicSearchSpec, atom: AtomModel, weights: Weighting | None = None) -> float:
    """The single magic wavelength (nm) in the bracket."""
    roots = find_magic_all(spec, atom, weights)
    if not roots:
        raise NoSignChangeError(
            f"no crossing between {spec.bracket[0]} and {spec.bracket[1]} nm")
    if len(roots) > 1:
        raise MultipleRootsError(roots)
    return roots[0]


def shift_scan(m: Manifold, lambdas_nm: Sequence[float], intensity: float,
               atom: AtomModel) -> np.ndarray:
    """Sorted sublevel energies (J) vs wavelength, shape (len, 2F+1)."""
    e = np.array([np.sqrt(intensity_to_field_sq(intensity)), 0.0, 0.0])
    out = []
    for lam in lambdas_nm:
        H = build_hamiltonian(m, FieldBilinear.from_field(wavelength_to_omega(lam * 1e-9), e), atom)
        out.append(adiabatic_levels(H)[0])
    return np.array(out)
