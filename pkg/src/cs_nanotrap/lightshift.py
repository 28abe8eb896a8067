"""Light-shift Hamiltonian of a hyperfine manifold and its adiabatic levels.

For each mutually coherent frequency group with field bilinear
M[mu, nu] = E(-)_mu E(+)_nu (Cartesian x, y, z; z is the quantization and
fiber axis) the manifold sees

    H = -a0 tr(M) - i a1 (E(-) x E(+)) . F / (2F)
        - a2 3/(F(2F-1)) sum_{mu nu} M[mu, nu] [(F_mu F_nu + F_nu F_mu)/2 - F^2 delta/3]

and incoherent groups add at the Hamiltonian level. The tensor term is
dropped for F = 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .angular import HalfInt, spin_matrices
from .atomicdata import AtomModel
from .errors import NanotrapError
from .polarizability import DEFAULT_GUARD, Manifold, PolarizabilityTriple, alpha_triple

_LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI_CIVITA[_i, _j, _k] = 1.0
    _LEVI_CIVITA[_i, _k, _j] = -1.0

HERMITIAN_RTOL = 1e-12


@dataclass
class FieldBilinear:
    """Coherent frequency groups ``(omega, M)`` at one point (M in V^2/m^2)."""

    groups: list[tuple[float, np.ndarray]] = field(default_factory=list)

    @classmethod
    def from_field(cls, omega: float, efield) -> "FieldBilinear":
        e = np.asarray(efield, dtype=complex)
        return cls([(float(omega), np.outer(e.conj(), e))])

    def add(self, omega: float, efield) -> None:
        e = np.asarray(efield, dtype=complex)
        self.groups.append((float(omega), np.outer(e.conj(), e)))

    def __add__(self, other: "FieldBilinear") -> "FieldBilinear":
        return FieldBilinear(list(self.groups) + list(other.groups))


@dataclass(frozen=True)
class LightShiftResult:
    F: HalfInt
    H: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def cross_from_bilinear(M: np.ndarray) -> np.ndarray:
    """(E(-) x E(+))_k = eps_kmn M_mn; works on (..., 3, 3) stacks."""
    return np.einsum("kmn,...mn->...k", _LEVI_CIVITA, M)


@lru_cache(maxsize=32)
def _operators(twice_f: int):
    """Vector operators F_k and the rank-2 operators T_mn of the tensor term."""
    s = spin_matrices(HalfInt(twice_f))
    comps = np.array(s.components())
    f = twice_f / 2
    eye = np.eye(twice_f + 1)
    T = np.empty((3, 3, twice_f + 1, twice_f + 1), dtype=complex)
    for mu in range(3):
        for nu in range(3):
            T[mu, nu] = 0.5 * (comps[mu] @ comps[nu] + comps[nu] @ comps[mu])
            if mu == nu:
                T[mu, nu] -= f * (f + 1) / 3 * eye
    return comps, T


def hamiltonian_from_arrays(F: HalfInt, triples: Sequence[PolarizabilityTriple],
                            bilinears: Sequence[np.ndarray]) -> np.ndarray:
    """Sum the per-group Hamiltonians.

    ``bilinears[g]`` has shape (..., 3, 3); the result has shape (..., d, d).
    """
    comps, T = _operators(F.twice)
    f = F.value
    dim = F.twice + 1
    H = None
    for tri, M in zip(triples, bilinears):
        M = np.asarray(M, dtype=complex)
        lead = M.shape[:-2]
        trace = np.einsum("...mm->...", M)
        h = (-tri.alpha0 * trace)[..., None, None] * np.eye(dim)
        if tri.alpha1 != 0.0:
            cross = cross_from_bilinear(M)
            h = h - 1j * tri.alpha1 / (2 * f) * np.einsum("...k,kab->...ab", cross, comps)
        if tri.alpha2 != 0.0 and F.twice >= 2:
            pre = 3.0 / (f * (2 * f - 1))
            h = h - tri.alpha2 * pre * np.einsum("...mn,mnab->...ab", M, T)
        h = np.broadcast_to(h, lead + (dim, dim))
        H = h if H is None else H + h
    if H is None:
        H = np.zeros((dim, dim), dtype=complex)
    return H


def build_hamiltonian(m: Manifold, bilinear: FieldBilinear, atom: AtomModel,
                      guard: float = DEFAULT_GUARD) -> np.ndarray:
    """Hermitian (2F+1)x(2F+1) light-shift Hamiltonian in J, basis mF = -F..F."""
    triples = [alpha_triple(atom, m, w, guard) for w, _ in bilinear.groups]
    return hamiltonian_from_arrays(m.F, triples, [M for _, M in bilinear.groups])


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude component of each column made real positive
    idx = np.argmax(np.abs(vecs), axis=-2)
    pivot = np.take_along_axis(vecs, idx[..., None, :], axis=-2)
    return vecs * (np.abs(pivot) / pivot)


def adiabatic_levels(H: np.ndarray, rtol: float = HERMITIAN_RTOL):
    """Ascending eigenvalues and phase-fixed unitary eigenvectors of ``H``.

    Accepts stacks (..., d, d). Raises if ``H`` deviates from Hermitian by
    more than ``rtol`` relative to its norm.
    """
    H = np.asarray(H)
    scale = np.max(np.abs(H)) if H.size else 0.0
    skew = np.max(np.abs(H - np.swapaxes(H.conj(), -1, -2))) if H.size else 0.0
    if skew > rtol * max(scale, np.finfo(float).tiny):
        raise NanotrapError(f"matrix not Hermitian (skew part {skew:.3e}, scale {scale:.3e})")
    w, v = np.linalg.eigh(H)
    return w, _fix_phases(v)


def light_shift(m: Manifold, bilinear: FieldBilinear, atom: AtomModel,
                guard: float = DEFAULT_GUARD) -> LightShiftResult:
    H = build_hamiltonian(m, bilinear, atom, guard)
    w, v = adiabatic_levels(H)
    return LightShiftResult(m.F, H, w, v)
