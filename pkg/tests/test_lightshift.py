import zlib

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from cs_nanotrap.angular import HalfInt, spin_matrices
from cs_nanotrap.constants import wavelength_to_omega
from cs_nanotrap.errors import NanotrapError
from cs_nanotrap.lightshift import (FieldBilinear, adiabatic_levels, build_hamiltonian,
                                    cross_from_bilinear, hamiltonian_from_arrays, light_shift)
from cs_nanotrap.polarizability import Manifold, PolarizabilityTriple, alpha_triple

import oracles

W935 = wavelength_to_omega(935.3e-9)
W1064 = wavelength_to_omega(1064e-9)
G4 = Manifold.parse("6S1/2:F=4")
P5 = Manifold.parse("6P3/2:F=5")


def rand_field(rng, scale=1e5):
    e = rng.normal(size=3) + 1j * rng.normal(size=3)
    return scale * e / np.linalg.norm(e)


def rotz(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def spectrum(H):
    return np.linalg.eigvalsh(H)


def test_scalar_only_limit():
    W = 3.7e9
    e = np.array([np.sqrt(W), 0, 0])
    H = hamiltonian_from_arrays(HalfInt(8), [PolarizabilityTriple(2e-39, 0.0, 0.0, W1064)],
                                [np.outer(e.conj(), e)])
    assert np.allclose(H, -2e-39 * W * np.eye(9), rtol=1e-14, atol=0)


def test_vector_term_zero_for_linear_polarization(atom):
    rng = np.random.default_rng(1)
    for m in (G4, P5):
        t = alpha_triple(atom, m, W935)
        for _ in range(10):
            e = rng.normal(size=3) * 1e5   # real, i.e. linear in any direction
            M = np.outer(e, e)
            assert np.max(np.abs(cross_from_bilinear(M))) == 0.0
            full = hamiltonian_from_arrays(m.F, [t], [M])
            novec = hamiltonian_from_arrays(
                m.F, [PolarizabilityTriple(t.alpha0, 0.0, t.alpha2, t.omega)], [M])
            assert np.max(np.abs(full - novec)) <= 1e-12 * np.max(np.abs(full))


def test_sigma_plus_ladder():
    # E = sqrt(W)(x + i y)/sqrt2, pure vector coupling: H = a1 W Fz / (2F)
    W, a1 = 1e9, 1.3e-39
    e = np.sqrt(W) * np.array([1, 1j, 0]) / np.sqrt(2)
    for twice in (2, 7, 8, 10):
        F = HalfInt(twice)
        H = hamiltonian_from_arrays(F, [PolarizabilityTriple(0.0, a1, 0.0, W935)],
                                    [np.outer(e.conj(), e)])
        assert np.allclose(H, np.diag(np.diag(H)), atol=1e-14 * a1 * W)
        m = spin_matrices(F).m_values()
        assert np.allclose(np.diag(H).real, a1 * W * m / (2 * F.value), rtol=1e-13, atol=0)
        # sigma- reverses the ladder
        Hm = hamiltonian_from_arrays(F, [PolarizabilityTriple(0.0, a1, 0.0, W935)],
                                     [np.outer(e, e.conj())])
        assert np.allclose(np.diag(Hm).real, -np.diag(H).real, rtol=1e-13)


@pytest.mark.parametrize("m", [G4, P5, Manifold.parse("6P3/2:F=3")])
def test_hermitian_and_trace_identity(atom, m):
    rng = np.random.default_rng(2)
    for _ in range(20):
        bil = FieldBilinear.from_field(W935, rand_field(rng))
        bil.add(W1064, rand_field(rng))
        H = build_hamiltonian(m, bil, atom)
        scale = np.max(np.abs(H))
        assert np.max(np.abs(H - H.conj().T)) <= 1e-12 * scale
        expect = -m.dim * sum(alpha_triple(atom, m, w).alpha0 * np.trace(M).real
                              for w, M in bil.groups)
        assert np.trace(H).real == pytest.approx(expect, rel=1e-10)


@pytest.mark.parametrize("m", [G4, P5])
def test_rotation_about_axis_preserves_spectrum(atom, m):
    rng = np.random.default_rng(3)
    e = rand_field(rng)
    ref = spectrum(build_hamiltonian(m, FieldBilinear.from_field(W935, e), atom))
    scale = np.max(np.abs(ref))
    for phi0 in np.linspace(0, 2 * np.pi, 13):
        H = build_hamiltonian(m, FieldBilinear.from_field(W935, rotz(phi0) @ e), atom)
        assert np.max(np.abs(spectrum(H) - ref)) <= 1e-10 * scale
    # linear polarization in the transverse plane at angle phi0
    lin = [spectrum(build_hamiltonian(
        m, FieldBilinear.from_field(W935, 1e5 * np.array([np.cos(p), np.sin(p), 0.0])), atom))
        for p in np.linspace(0, np.pi, 9)]
    assert np.max(np.abs(np.array(lin) - lin[0])) <= 1e-10 * np.max(np.abs(lin[0]))


def _time_reverse(H, F: HalfInt):
    m = spin_matrices(F).m_values()
    P = np.fliplr(np.diag((-1.0) ** (F.value - m)))
    return P @ H.conj() @ P.T


@pytest.mark.parametrize("m", [G4, P5])
def test_linear_polarization_time_reversal_pairing(atom, m):
    rng = np.random.default_rng(4)
    e = rng.normal(size=3) * 1e5
    H = build_hamiltonian(m, FieldBilinear.from_field(W935, e), atom)
    scale = np.max(np.abs(H))
    assert np.max(np.abs(_time_reverse(H, m.F) - H)) <= 1e-10 * scale
    assert np.max(np.abs(spectrum(H) - spectrum(H.conj()))) <= 1e-10 * scale
    # an elliptical field breaks the mF <-> -mF pairing via the vector term
    He = build_hamiltonian(m, FieldBilinear.from_field(W935, rand_field(rng)), atom)
    assert np.max(np.abs(_time_reverse(He, m.F) - He)) > 1e-6 * np.max(np.abs(He))


def test_incoherent_groups_add(atom):
    rng = np.random.default_rng(5)
    a = FieldBilinear.from_field(W935, rand_field(rng))
    b = FieldBilinear.from_field(W1064, rand_field(rng))
    Hsum = build_hamiltonian(P5, a + b, atom)
    assert np.allclose(Hsum, build_hamiltonian(P5, a, atom) + build_hamiltonian(P5, b, atom),
                       rtol=1e-13, atol=0)


def test_batched_matches_pointwise(atom):
    rng = np.random.default_rng(6)
    es = np.array([rand_field(rng) for _ in range(7)])
    M = np.einsum("pm,pn->pmn", es.conj(), es)
    t = alpha_triple(atom, P5, W935)
    Hb = hamiltonian_from_arrays(P5.F, [t], [M])
    for k in range(7):
        assert np.array_equal(Hb[k], hamiltonian_from_arrays(P5.F, [t], [M[k]]))


def test_spin_half_has_no_tensor_term():
    e = np.array([1.0, 0.0, 1.0]) * 1e5
    H = hamiltonian_from_arrays(HalfInt(1), [PolarizabilityTriple(1e-39, 0.0, 5e-39, W935)],
                                [np.outer(e, e)])
    assert np.allclose(H, -1e-39 * 2e10 * np.eye(2), rtol=1e-14)


# -- adiabatic_levels ---------------------------------------------------------

def test_diagonal_input():
    w, v = adiabatic_levels(np.diag([3.0, 1.0, 2.0]).astype(complex))
    assert np.allclose(w, [1, 2, 3])
    assert np.allclose(np.abs(v), np.eye(3)[:, [1, 2, 0]])
    w, v = adiabatic_levels(np.diag([1.0, 2.0, 3.0]))
    assert np.array_equal(w, [1.0, 2.0, 3.0]) and np.allclose(v, np.eye(3))


def test_rejects_non_hermitian():
    with pytest.raises(NanotrapError):
        adiabatic_levels(np.array([[1.0, 2.0], [0.0, 1.0]]))


def random_hermitian(rng, d=9):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (A + A.conj().T) / 2


def reference_eigenvalues(H):
    # real symmetric embedding [[Re, -Im], [Im, Re]] has each eigenvalue twice
    R = np.block([[H.real, -H.imag], [H.imag, H.real]])
    return scipy.linalg.eigvalsh(R, driver="ev")[::2]


def test_random_hermitian_against_reference():
    rng = np.random.default_rng(20240601)
    for _ in range(50):
        H = random_hermitian(rng)
        w, v = adiabatic_levels(H)
        assert np.max(np.abs(w - reference_eigenvalues(H))) <= 1e-10
        assert np.max(np.abs(H @ v - v * w)) <= 1e-10
        assert np.allclose(v.conj().T @ v, np.eye(9), atol=1e-12)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_similarity_invariance(seed):
    rng = np.random.default_rng(seed)
    H = random_hermitian(rng)
    U = scipy.linalg.expm(1j * random_hermitian(rng))
    w1, _ = adiabatic_levels(H)
    w2, _ = adiabatic_levels(U @ H @ U.conj().T)
    assert np.max(np.abs(w1 - w2)) <= 1e-10


def test_phase_convention_deterministic():
    rng = np.random.default_rng(8)
    H = random_hermitian(rng)
    _, v = adiabatic_levels(H)
    pivots = v[np.argmax(np.abs(v), axis=0), np.arange(9)]
    assert np.allclose(pivots.imag, 0, atol=1e-15) and np.all(pivots.real > 0)


def test_light_shift_bundle(atom):
    res = light_shift(G4, FieldBilinear.from_field(W1064, [1e5, 0, 0]), atom)
    assert res.F == HalfInt(8) and res.eigenvalues.shape == (9,)
    assert np.all(res.eigenvalues < 0)


# -- second-order perturbation theory oracle ----------------------------------

def _partners(atom, level):
    from cs_nanotrap.atomicdata import LevelId
    lvl = LevelId.parse(level)
    out = []
    for partner, rec, sign in atom.couplings(lvl):
        d2 = oracles.dipole_sq(rec.lambda_nm, rec.tau_us, rec.upper.J.twice)
        out.append((d2, sign * oracles.omega_of(rec.lambda_nm), partner.J.twice))
    return lvl, out


@pytest.mark.parametrize("manifold, lam", [
    ("6S1/2:F=4", 935.3), ("6S1/2:F=3", 684.9), ("6P3/2:F=5", 935.7),
    ("6P3/2:F=4", 1064.0), ("6P3/2:F=2", 684.8),
])
def test_matches_perturbation_theory(atom, manifold, lam):
    m = Manifold.parse(manifold)
    lvl, partners = _partners(atom, manifold.split(":")[0])
    rng = np.random.default_rng(zlib.crc32(manifold.encode()))
    w = oracles.omega_of(lam)
    for e in (rand_field(rng), np.array([1e5, 0, 0]), 1e5 * np.array([1, 1j, 0]) / np.sqrt(2)):
        ref = oracles.perturbative_hamiltonian(partners, lvl.J.twice, m.F.twice,
                                               atom.nuclear_spin.twice, e, w)
        H = build_hamiltonian(m, FieldBilinear.from_field(w, e), atom)
        assert np.max(np.abs(H - ref)) <= 1e-10 * np.max(np.abs(ref))
