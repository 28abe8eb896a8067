"""Two-color nanofiber trap potentials.

Beams sharing a coherence group are summed at the amplitude level (a
counter-propagating pair then forms a standing-wave lattice along z);
different groups are mutually incoherent and add at the Hamiltonian level.
The atom-surface interaction is the van der Waals term -C3/d^3, applied to
every manifold with the same coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import optimize

from .atomicdata import AtomModel, LevelId
from .constants import H, MHZ_PER_MK, joule_to_MHz, joule_to_mK
from .errors import NanotrapError, NoMinimumError
from .fibermode import FiberSpec, mode_field, solve_he11
from .lightshift import FieldBilinear, adiabatic_levels, hamiltonian_from_arrays
from .polarizability import DEFAULT_GUARD, Manifold, alpha_triple

#: C3 of ground-state Cs on silica, quoted as U/h = -C3/d^3, kHz um^3
C3_CS_SILICA = 1.16

AXES = ("radial", "azimuthal", "axial")


@dataclass(frozen=True)
class BeamSpec:
    lambda_m: float
    power: float
    phi0: float = 0.0
    direction: int = 1
    coherence_group: int = 0

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError("beam power must be positive")
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        if not self.lambda_m > 0:
            raise ValueError("wavelength must be positive")

    @property
    def omega(self) -> float:
        return 2 * math.pi * 299_792_458.0 / self.lambda_m


@dataclass(frozen=True)
class TrapConfig:
    fiber: FiberSpec
    beams: tuple[BeamSpec, ...]
    C3_over_hbar: float = C3_CS_SILICA
    manifolds: tuple[Manifold, ...] = ()
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "beams", tuple(self.beams))
        object.__setattr__(self, "manifolds", tuple(self.manifolds))
        if not self.beams:
            raise ValueError("trap needs at least one beam")
        if self.C3_over_hbar < 0:
            raise ValueError("C3 must be >= 0")
        for g, beams in self.groups().items():
            if len({b.lambda_m for b in beams}) != 1:
                raise ValueError(f"coherence group {g} mixes wavelengths")

    def groups(self) -> dict[int, list[BeamSpec]]:
        out: dict[int, list[BeamSpec]] = {}
        for b in self.beams:
            out.setdefault(b.coherence_group, []).append(b)
        return dict(sorted(out.items()))

    @property
    def ground(self) -> Manifold:
        """First ground-state manifold listed; the default target of minimum searches."""
        for m in self.manifolds:
            if m.level.L == 0:
                return m
        raise NanotrapError("config has no ground-state manifold")


def vdw_potential(d, C3_over_hbar: float = C3_CS_SILICA):
    """Surface potential -C3/d^3 in J at distance ``d`` (m) from the surface.

    The coefficient is a cyclic frequency times volume (kHz um^3), so at
    d = 100 nm and 1.16 kHz um^3 the shift is U/h = -1.16 MHz.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise NanotrapError("surface distance must be positive")
    c3 = H * C3_over_hbar * 1e3 * 1e-18   # J m^3
    u = -c3 / d**3
    return float(u) if u.ndim == 0 else u


def _group_fields(config: TrapConfig, r, phi, z):
    """[(omega, E)] per coherence group with E of shape (..., 3)."""
    out = []
    for _, beams in config.groups().items():
        E = 0
        for b in beams:
            mode = solve_he11(config.fiber, b.lambda_m)
            E = E + mode_field(mode, config.fiber, r, phi, z, b.direction, b.phi0, b.power)
        out.append((beams[0].omega, E))
    return out


def bilinear_arrays(config: TrapConfig, r, phi, z):
    """[(omega, M)] with M = E(-) (x) E(+) stacked over the broadcast grid."""
    return [(w, np.einsum("...m,...n->...mn", E.conj(), E))
            for w, E in _group_fields(config, r, phi, z)]


def field_bilinear_at(config: TrapConfig, r: float, phi: float, z: float) -> FieldBilinear:
    return FieldBilinear([(w, M) for w, M in bilinear_arrays(config, float(r), float(phi), float(z))])


def _triples(config: TrapConfig, m: Manifold, atom: AtomModel, guard: float):
    return [alpha_triple(atom, m, b[0].omega, guard) for b in config.groups().values()]


def total_potential(config: TrapConfig, m: Manifold, r, phi, z, atom: AtomModel,
                    guard: float = DEFAULT_GUARD) -> np.ndarray:
    """Ascending sublevel energies (J), shape ``broadcast_shape + (2F+1,)``."""
    r = np.asarray(r, dtype=float)
    a = config.fiber.a
    if np.any(r <= a):
        raise NanotrapError("potential requires r > a")
    bil = bilinear_arrays(config, r, phi, z)
    H_ls = hamiltonian_from_arrays(m.F, _triples(config, m, atom, guard), [M for _, M in bil])
    energies, _ = adiabatic_levels(H_ls)
    vdw = vdw_potential(r - a, config.C3_over_hbar)
    return energies + np.asarray(vdw)[..., None]


@dataclass(frozen=True)
class AxisSpec:
    """One-dimensional cut through the trap.

    radial: samples are r - a (m) at fixed ``phi``, ``z``; azimuthal: samples
    are phi (rad) at fixed ``r_minus_a``, ``z``; axial: samples are z (m) at
    fixed ``r_minus_a``, ``phi``.
    """

    axis: str
    start: float
    stop: float
    n: int
    r_minus_a: float | None = None
    phi: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}")
        if self.n < 2:
            raise ValueError("grid needs at least 2 samples")
        if self.axis != "radial" and self.r_minus_a is None:
            raise ValueError(f"{self.axis} cut needs r_minus_a")

    def samples(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.n)

    def coordinates(self, a: float):
        x = self.samples()
        if self.axis == "radial":
            return a + x, np.full_like(x, self.phi), np.full_like(x, self.z)
        r = a + self.r_minus_a
        if self.axis == "azimuthal":
            return np.full_like(x, r), x, np.full_like(x, self.z)
        return np.full_like(x, r), np.full_like(x, self.phi), x


@dataclass
class PotentialGrid:
    axis: str
    samples: np.ndarray
    manifolds: list[Manifold]
    mK: dict[Manifold, np.ndarray]
    MHz: dict[Manifold, np.ndarray]

    def lowest(self, m: Manifold) -> np.ndarray:
        return self.mK[m][:, 0]


def potential_grid(config: TrapConfig, manifolds: Manifold | Sequence[Manifold] | None,
                   axis: AxisSpec, atom: AtomModel) -> PotentialGrid:
    if manifolds is None:
        manifolds = list(config.manifolds)
    elif isinstance(manifolds, Manifold):
        manifolds = [manifolds]
    r, phi, z = axis.coordinates(config.fiber.a)
    mk, mhz = {}, {}
    for m in manifolds:
        u = total_potential(config, m, r, phi, z, atom)
        mk[m] = joule_to_mK(u)
        mhz[m] = joule_to_MHz(u)
    return PotentialGrid(axis.axis, axis.samples(), list(manifolds), mk, mhz)


@dataclass(frozen=True)
class TrapMinimum:
    r_minus_a: float
    depth_mK: float
    sublevels_mK: np.ndarray


def find_trap_minimum(config: TrapConfig, m: Manifold | None, window: tuple[float, float],
                      atom: AtomModel, n_scan: int = 181, phi: float = 0.0,
                      z: float = 0.0) -> TrapMinimum:
    """Radial minimum of the lowest sublevel of ``m`` inside ``window`` (r - a, m).

    Depth is reported as -U(r*) in mK, i.e. relative to the zero of energy
    far from the fiber.
    """
    m = config.ground if m is None else m
    lo, hi = window
    if not 0 < lo < hi:
        raise ValueError("window must satisfy 0 < lo < hi")
    a = config.fiber.a

    def lowest(d):
        return float(total_potential(config, m, a + d, phi, z, atom)[..., 0])

    d = np.linspace(lo, hi, n_scan)
    u = total_potential(config, m, a + d, phi, z, atom)[:, 0]
    i = int(np.argmin(u))
    if i == 0 or i == n_scan - 1:
        raise NoMinimumError(f"no interior radial minimum in {lo:.3g}-{hi:.3g} m")
    best = optimize.minimize_scalar(lowest, bracket=(d[i - 1], d[i], d[i + 1]),
                                    method="golden", tol=1e-8)
    d_star = float(best.x)
    levels = joule_to_mK(total_potential(config, m, a + d_star, phi, z, atom))
    return TrapMinimum(d_star, float(-levels[0]), levels)


# -- scenario presets ---------------------------------------------------------

def _lvl(s):
    return LevelId.parse(s)


def _pair(lambda_nm, power_mw, phi0, coherent, group):
    lam = lambda_nm * 1e-9
    p = power_mw * 1e-3
    g2 = group if coherent else group + 1
    return (BeamSpec(lam, p, phi0, +1, group), BeamSpec(lam, p, phi0, -1, g2))


def _two_ground_manifolds():
    return (Manifold(_lvl("6S1/2"), 4), Manifold(_lvl("6S1/2"), 3), Manifold(_lvl("6P3/2"), 4))


def _goban_manifolds():
    return (Manifold(_lvl("6S1/2"), 4), Manifold(_lvl("6P3/2"), 5))


def _preset_vetsch():
    beams = _pair(1064.0, 2.2, 0.0, True, 0) + (BeamSpec(780e-9, 25e-3, math.pi / 2, +1, 1),)
    return TrapConfig(FiberSpec(250e-9), beams, C3_CS_SILICA, _two_ground_manifolds(), "vetsch")


def _preset_magic_compensated():
    beams = _pair(935.3, 0.95, 0.0, True, 0) + _pair(684.9, 16.0, 0.0, False, 1)
    return TrapConfig(FiberSpec(250e-9), beams, C3_CS_SILICA, _two_ground_manifolds(),
                      "magic-compensated")


def _preset_goban(name, red_nm, blue_nm):
    beams = _pair(red_nm, 0.4, 0.0, True, 0) + _pair(blue_nm, 5.0, 0.0, False, 1)
    return TrapConfig(FiberSpec(215e-9), beams, C3_CS_SILICA, _goban_manifolds(), name)


_PRESETS = {
    "vetsch": _preset_vetsch,
    "magic-compensated": _preset_magic_compensated,
    "goban-magic": lambda: _preset_goban("goban-magic", 935.7, 684.8),
    "goban-actual": lambda: _preset_goban("goban-actual", 937.1, 686.1),
}

PRESET_NAMES = tuple(_PRESETS)


@lru_cache(maxsize=None)
def preset(name: str) -> TrapConfig:
    try:
        return _PRESETS[name]()
    except KeyError:
        raise NanotrapError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}") \
            from None


def check_units(grid: PotentialGrid) -> float:
    """Largest relative deviation of MHz/mK from the fixed conversion factor."""
    worst = 0.0
    for m in grid.manifolds:
        mk, mhz = grid.mK[m], grid.MHz[m]
        nz = mk != 0
        if np.any(nz):
            worst = max(worst, float(np.max(np.abs(mhz[nz] / mk[nz] / MHZ_PER_MK - 1))))
    return worst
