"""Light shifts, magic wavelengths and two-color nanofiber trap potentials for Cs."""

__version__ = "0.1.0"

from .angular import HalfInt, spin_matrices, wigner6j
from .atomicdata import AtomModel, LevelId, TransitionRecord, load_atom, load_transition_table
from .fibermode import FiberSpec, mode_field, solve_he11
from .lightshift import FieldBilinear, adiabatic_levels, build_hamiltonian, light_shift
from .magic import MagicSearchSpec, averaged_shift, find_magic
from .polarizability import Manifold, alpha_triple, propagator
from .trap import TrapConfig, find_trap_minimum, potential_grid, preset, total_potential

__all__ = [
    "AtomModel", "FieldBilinear", "FiberSpec", "HalfInt", "LevelId", "MagicSearchSpec",
    "Manifold", "TransitionRecord", "TrapConfig", "adiabatic_levels", "alpha_triple",
    "averaged_shift", "build_hamiltonian", "find_magic", "find_trap_minimum", "light_shift",
    "load_atom", "load_transition_table", "mode_field", "potential_grid", "preset",
    "propagator", "solve_he11", "spin_matrices", "total_potential", "wigner6j",
]
