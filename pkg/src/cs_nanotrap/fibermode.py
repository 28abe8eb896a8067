"""HE11 mode of a vacuum-clad step-index cylinder.

Field conventions follow the usual hybrid-mode solution for a circular
waveguide: with u = h a, w = q a,

    h = sqrt(n1^2 k^2 - beta^2),   q = sqrt(beta^2 - n2^2 k^2),

the circular mode (l = +1, propagating along +z) has radial profiles

    inside   e_r = i beta/(2h) [(1-s) J0(hr) - (1+s) J2(hr)]
             e_phi = -beta/(2h) [(1-s) J0(hr) + (1+s) J2(hr)]
             e_z = J1(hr)
    outside  e_r = i beta/(2q) J1(u)/K1(w) [(1-s) K0(qr) + (1+s) K2(qr)]
             e_phi = -beta/(2q) J1(u)/K1(w) [(1-s) K0(qr) - (1+s) K2(qr)]
             e_z = J1(u)/K1(w) K1(qr)

    s = (1/u^2 + 1/w^2) / [J1'(u)/(u J1(u)) + K1'(w)/(w K1(w))]

and a general mode is (e_r r + l e_phi phi + f e_z z) exp(i(f beta z + l phi)).
Quasi-linear polarization is the equal superposition of l = +1 and l = -1
with principal axis at phi0.

All fields here are positive-frequency amplitudes E(+); the guided power is
P = 2 Re int (E(+) x H(+)*)_z dA.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, optimize, special

from .constants import C, MU0
from .errors import CutoffError, NanotrapError

SCAN_POINTS = 2000
BETA_RTOL = 1e-13
NORM_RTOL = 1e-8

# Malitson fused-silica Sellmeier coefficients (lambda in um)
_SELLMEIER_B = (0.6961663, 0.4079426, 0.8974794)
_SELLMEIER_L = (0.0684043, 0.1162414, 9.896161)
SELLMEIER_RANGE_UM = (0.21, 3.71)


def silica_index(lambda_m: float) -> float:
    """Refractive index of fused silica from the three-term Sellmeier formula."""
    lam_um = lambda_m * 1e6
    lo, hi = SELLMEIER_RANGE_UM
    if not lo < lam_um < hi:
        raise NanotrapError(f"wavelength {lam_um:.4g} um outside Sellmeier range {lo}-{hi} um")
    x2 = lam_um * lam_um
    n2 = 1.0 + sum(b * x2 / (x2 - l * l) for b, l in zip(_SELLMEIER_B, _SELLMEIER_L))
    return math.sqrt(n2)


@dataclass(frozen=True)
class FiberSpec:
    a: float
    index_model: Callable[[float], float] = silica_index
    n2: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("fiber radius must be positive")

    def n1(self, lambda_m: float) -> float:
        return float(self.index_model(lambda_m))

    def v_number(self, lambda_m: float) -> float:
        k0 = 2 * math.pi / lambda_m
        return k0 * self.a * math.sqrt(self.n1(lambda_m) ** 2 - self.n2**2)


def constant_index(n: float) -> Callable[[float], float]:
    """Wavelength-independent core index model (mainly for tests)."""
    def model(lambda_m):
        return n
    model.__name__ = f"constant_index_{n}"
    return model


@dataclass(frozen=True)
class GuidedMode:
    lambda_m: float
    a: float
    n1: float
    n2: float
    k0: float
    beta: float
    h: float
    q: float
    s: float
    norm: float = field(default=1.0)
    n_roots: int = 1

    @property
    def omega(self) -> float:
        return 2 * math.pi * C / self.lambda_m

    @property
    def neff(self) -> float:
        return self.beta / self.k0

    @property
    def v_number(self) -> float:
        return self.k0 * self.a * math.sqrt(self.n1**2 - self.n2**2)

    @property
    def lattice_period(self) -> float:
        """Standing-wave intensity period pi/beta of a counter-propagating pair."""
        return math.pi / self.beta


def _ratios(beta, k0, n1, n2, a):
    h = math.sqrt(max(n1 * n1 * k0 * k0 - beta * beta, 0.0))
    q = math.sqrt(max(beta * beta - n2 * n2 * k0 * k0, 0.0))
    return h * a, q * a, h, q


def he11_residual(beta: float, k0: float, n1: float, n2: float, a: float) -> float:
    """Relative residual LHS/RHS - 1 of the l = 1 hybrid-mode equation."""
    u, w, _, _ = _ratios(beta, k0, n1, n2, a)
    jr = special.jvp(1, u) / (u * special.jv(1, u))
    kr = special.kvp(1, w) / (w * special.kv(1, w))
    lhs = (jr + kr) * (n1 * n1 * jr + n2 * n2 * kr)
    rhs = (beta / k0) ** 2 * (1 / u**2 + 1 / w**2) ** 2
    return lhs / rhs - 1.0


def _pole_free(beta, k0, n1, n2, a):
    # characteristic function multiplied by J1(u)^2: same sign, no poles
    u, w, _, _ = _ratios(beta, k0, n1, n2, a)
    j1 = special.jv(1, u)
    j1p = special.jvp(1, u)
    kr = special.kvp(1, w) / (w * special.kv(1, w))
    rhs = (beta / k0) ** 2 * (1 / u**2 + 1 / w**2) ** 2
    return (j1p / u + kr * j1) * (n1 * n1 * j1p / u + n2 * n2 * kr * j1) - rhs * j1 * j1


def _s_param(u, w):
    jr = special.jvp(1, u) / (u * special.jv(1, u))
    kr = special.kvp(1, w) / (w * special.kv(1, w))
    return (1 / u**2 + 1 / w**2) / (jr + kr)


def solve_he11(spec: FiberSpec, lambda_m: float) -> GuidedMode:
    """Solve for the HE11 propagation constant and the 1 W field normalization."""
    return _solve_he11_cached(spec, float(lambda_m))


@lru_cache(maxsize=256)
def _solve_he11_cached(spec, lambda_m):
    n1, n2 = spec.n1(lambda_m), spec.n2
    if not n1 > n2:
        raise CutoffError(f"core index {n1} not above cladding index {n2}")
    k0 = 2 * math.pi / lambda_m
    a = spec.a
    lo, hi = n2 * k0, n1 * k0
    grid = np.linspace(lo, hi, SCAN_POINTS + 2)[1:-1]
    with np.errstate(all="ignore"):
        vals = np.array([_pole_free(b, k0, n1, n2, a) for b in grid])
    good = np.isfinite(vals)
    roots = []
    for i in range(len(grid) - 1):
        if good[i] and good[i + 1] and np.sign(vals[i]) != np.sign(vals[i + 1]):
            roots.append(optimize.bisect(_pole_free, grid[i], grid[i + 1],
                                         args=(k0, n1, n2, a), xtol=1e-300,
                                         rtol=BETA_RTOL, maxiter=500))
    if not roots:
        raise CutoffError(f"no guided HE11 solution for a={a:.4g} m at lambda={lambda_m:.4g} m")
    if len(roots) > 1:
        warnings.warn(f"{len(roots)} hybrid-mode roots in bracket; selecting the largest "
                      "beta as HE11", RuntimeWarning, stacklevel=3)
    beta = max(roots)
    u, w, h, q = _ratios(beta, k0, n1, n2, a)
    mode = GuidedMode(lambda_m, a, n1, n2, k0, beta, h, q, _s_param(u, w), 1.0, len(roots))
    power = circular_mode_power(mode)
    return GuidedMode(lambda_m, a, n1, n2, k0, beta, h, q, mode.s,
                      1.0 / math.sqrt(power), len(roots))


def radial_profiles(mode: GuidedMode, r):
    """(e_r, e_phi, e_z) of the l = +1, f = +1 circular mode, unnormalized.

    ``r`` may be an array; interior and exterior branches are selected per
    element.
    """
    r = np.asarray(r, dtype=float)
    beta, h, q, s, a = mode.beta, mode.h, mode.q, mode.s, mode.a
    inside = r < a
    er = np.empty(r.shape, dtype=complex)
    ep = np.empty(r.shape, dtype=complex)
    ez = np.empty(r.shape, dtype=complex)
    ri = r[inside]
    hr = h * ri
    j0, j1, j2 = special.jv(0, hr), special.jv(1, hr), special.jv(2, hr)
    er[inside] = 1j * beta / (2 * h) * ((1 - s) * j0 - (1 + s) * j2)
    ep[inside] = -beta / (2 * h) * ((1 - s) * j0 + (1 + s) * j2)
    ez[inside] = j1
    ro = r[~inside]
    qr = q * ro
    scale = special.jv(1, h * a) / special.kv(1, q * a)
    k0_, k1_, k2_ = special.kv(0, qr), special.kv(1, qr), special.kv(2, qr)
    er[~inside] = 1j * beta / (2 * q) * scale * ((1 - s) * k0_ + (1 + s) * k2_)
    ep[~inside] = -beta / (2 * q) * scale * ((1 - s) * k0_ - (1 + s) * k2_)
    ez[~inside] = scale * k1_
    return er, ep, ez


def _ez_derivative(mode: GuidedMode, r):
    r = np.asarray(r, dtype=float)
    out = np.empty(r.shape)
    inside = r < mode.a
    out[inside] = mode.h * special.jvp(1, mode.h * r[inside])
    scale = special.jv(1, mode.h * mode.a) / special.kv(1, mode.q * mode.a)
    out[~inside] = scale * mode.q * special.kvp(1, mode.q * r[~inside])
    return out


def _poynting_density(mode: GuidedMode, r):
    """2 Re(E x H*)_z of the unnormalized circular mode, W/m^2 per unit C^2."""
    er, ep, ez = radial_profiles(mode, r)
    dez = _ez_derivative(mode, r)
    iwmu = 1j * mode.omega * MU0
    hr = (1j / r * ez - 1j * mode.beta * ep) / iwmu
    hp = (1j * mode.beta * er - dez) / iwmu
    return 2.0 * np.real(er * np.conj(hp) - ep * np.conj(hr))


def circular_mode_power(mode: GuidedMode) -> float:
    """Guided power of the mode at amplitude scale ``mode.norm`` (W)."""
    def f(r):
        return 2 * math.pi * r * float(_poynting_density(mode, np.array([r]))[0])
    p_in, _ = integrate.quad(f, 0.0, mode.a, epsabs=0, epsrel=NORM_RTOL, limit=200)
    decay = 1.0 / mode.q
    p_out, _ = integrate.quad(f, mode.a, mode.a + 60 * decay, epsabs=0,
                              epsrel=NORM_RTOL, limit=400)
    return (p_in + p_out) * mode.norm**2


def mode_field(mode: GuidedMode, spec: FiberSpec | None, r, phi, z, direction: int = 1,
               phi0: float = 0.0, power: float = 1.0, interior_ok: bool = False):
    """Cartesian E(+) (V/m) of a quasi-linearly polarized HE11 mode.

    ``r``, ``phi`` and ``z`` broadcast against each other; the result has
    shape ``broadcast_shape + (3,)``. ``direction`` is +1 or -1 and
    ``phi0`` is the principal polarization axis measured from x.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if power < 0:
        raise ValueError("power must be >= 0")
    r, phi, z = np.broadcast_arrays(np.asarray(r, float), np.asarray(phi, float),
                                    np.asarray(z, float))
    a = spec.a if spec is not None else mode.a
    if not interior_ok and np.any(r <= a):
        raise NanotrapError("field evaluation requires r > a (outside the fiber)")
    er, ep, ez = radial_profiles(mode, r)
    amp = math.sqrt(2.0 * power) * mode.norm
    dphi = phi - phi0
    c, s = np.cos(dphi), np.sin(dphi)
    prop = np.exp(1j * direction * mode.beta * z)
    E_r = amp * er * c * prop
    E_p = amp * 1j * ep * s * prop
    E_z = amp * direction * ez * c * prop
    cp, sp = np.cos(phi), np.sin(phi)
    return np.stack([E_r * cp - E_p * sp, E_r * sp + E_p * cp, E_z], axis=-1)


def mode_info(spec: FiberSpec, lambda_m: float) -> dict:
    mode = solve_he11(spec, lambda_m)
    return {
        "lambda_nm": lambda_m * 1e9,
        "n1": mode.n1,
        "beta": mode.beta,
        "neff": mode.neff,
        "q": mode.q,
        "h": mode.h,
        "V": mode.v_number,
        "decay_length_nm": 1e9 / mode.q,
    }


def field_intensity(E) -> np.ndarray:
    """Sum |E(+)_i|^2 over Cartesian components (V^2/m^2)."""
    E = np.asarray(E)
    return np.sum(np.abs(E) ** 2, axis=-1)
