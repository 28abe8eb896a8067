"""Physical constants (CODATA 2018, SI) and unit helpers.

All internal quantities are SI. Wavelengths enter and leave the file
boundary in nm, lifetimes in microseconds.
"""

import math

C = 299_792_458.0                # speed of light, m/s (exact)
H = 6.626_070_15e-34             # Planck constant, J s (exact)
HBAR = H / (2.0 * math.pi)       # reduced Planck constant, J s
EPS0 = 8.854_187_8128e-12        # vacuum permittivity, F/m
MU0 = 1.256_637_062_12e-6        # vacuum permeability, N/A^2
KB = 1.380_649e-23               # Boltzmann constant, J/K (exact)
A0 = 5.291_772_109_03e-11        # Bohr radius, m

#: atomic unit of polarizability, C^2 m^2 / J
AU_POLARIZABILITY = 4.0 * math.pi * EPS0 * A0**3

#: 1 mK expressed as a cyclic frequency (U/h), MHz
MHZ_PER_MK = KB * 1e-3 / H / 1e6

CONSTANTS = {
    "c": C,
    "h": H,
    "hbar": HBAR,
    "eps0": EPS0,
    "mu0": MU0,
    "k_B": KB,
    "a0": A0,
}


def wavelength_to_omega(lambda_m: float) -> float:
    """Vacuum wavelength (m) to angular frequency (rad/s)."""
    return 2.0 * math.pi * C / lambda_m


def omega_to_wavelength(omega: float) -> float:
    return 2.0 * math.pi * C / omega


def joule_to_mK(u):
    return u / KB * 1e3


def joule_to_MHz(u):
    """Energy to cyclic frequency U/h in MHz."""
    return u / H / 1e6


def intensity_to_field_sq(intensity: float) -> float:
    """|E(+)|^2 (V^2/m^2) of a plane wave of the given intensity (W/m^2).

    Convention: E(t) = E(+) exp(-i w t) + c.c., so I = 2 eps0 c |E(+)|^2.
    """
    return intensity / (2.0 * EPS0 * C)
