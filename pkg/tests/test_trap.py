import math

import numpy as np
import pytest

from cs_nanotrap.constants import H, MHZ_PER_MK, joule_to_mK
from cs_nanotrap.errors import NanotrapError, NoMinimumError
from cs_nanotrap.fibermode import FiberSpec, mode_field, solve_he11
from cs_nanotrap.lightshift import build_hamiltonian, cross_from_bilinear
from cs_nanotrap.polarizability import Manifold
from cs_nanotrap.trap import (PRESET_NAMES, AxisSpec, BeamSpec, TrapConfig, bilinear_arrays,
                              check_units, field_bilinear_at, find_trap_minimum,
                              potential_grid, preset, total_potential, vdw_potential)

G3 = Manifold.parse("6S1/2:F=3")
G4 = Manifold.parse("6S1/2:F=4")
WINDOW = (120e-9, 600e-9)


def test_vdw_examples():
    assert vdw_potential(100e-9, 1.16) / H == pytest.approx(-1.16e6, rel=1e-12)
    d = np.array([50e-9, 123e-9, 400e-9])
    assert np.allclose(vdw_potential(2 * d), vdw_potential(d) / 8, rtol=1e-15)
    assert vdw_potential(100e-9, 0.0) == 0.0
    with pytest.raises(NanotrapError):
        vdw_potential(0.0)


def test_single_beam_bilinear_rank_one():
    cfg = TrapConfig(FiberSpec(250e-9), (BeamSpec(1064e-9, 1e-3),))
    bil = field_bilinear_at(cfg, 400e-9, 0.3, 1e-7)
    assert len(bil.groups) == 1
    M = bil.groups[0][1]
    assert np.linalg.matrix_rank(M, tol=1e-10 * np.max(np.abs(M))) == 1
    assert np.allclose(M, M.conj().T)


def test_coherent_pair_matches_amplitude_sum():
    cfg = preset("vetsch")
    red = cfg.groups()[0]
    mode = solve_he11(cfg.fiber, red[0].lambda_m)
    r, phi, z = 380e-9, 0.4, 0.17e-6
    E = sum(mode_field(mode, cfg.fiber, r, phi, z, b.direction, b.phi0, b.power) for b in red)
    w, M = bilinear_arrays(cfg, r, phi, z)[0]
    assert np.allclose(M, np.outer(E.conj(), E), rtol=1e-14)
    assert w == pytest.approx(red[0].omega)


def test_incoherent_pair_differs_from_coherent():
    base = preset("magic-compensated")
    blue = tuple(base.groups()[1] + base.groups()[2])
    coherent = TrapConfig(base.fiber, blue[:1] + (BeamSpec(blue[1].lambda_m, blue[1].power,
                                                           blue[1].phi0, -1, 1),))
    incoherent = TrapConfig(base.fiber, blue)
    r, phi, z = 450e-9, 0.0, 0.1e-6
    Mc = bilinear_arrays(coherent, r, phi, z)[0][1]
    Minc = sum(M for _, M in bilinear_arrays(incoherent, r, phi, z))
    assert not np.allclose(Mc, Minc)
    # traces agree where the cos(2 beta z) interference term vanishes
    lam = blue[0].lambda_m
    zq = math.pi / (4 * solve_he11(base.fiber, lam).beta)
    Mc = bilinear_arrays(coherent, r, phi, zq)[0][1]
    Minc = sum(M for _, M in bilinear_arrays(incoherent, r, phi, zq))
    assert np.trace(Mc).real == pytest.approx(np.trace(Minc).real, rel=1e-10)


def test_blue_pair_cancels_vector_term():
    cfg = preset("magic-compensated")
    r = np.linspace(260e-9, 700e-9, 17)
    for phi in (0.0, 0.9, 2.0):
        bil = bilinear_arrays(cfg, r, phi, 0.3e-6)
        blue = bil[1][1] + bil[2][1]
        c = cross_from_bilinear(blue)
        scale = np.einsum("...mm->...", blue).real
        assert np.max(np.abs(c) / scale[:, None]) <= 1e-10
        # each blue beam alone carries a finite local ellipticity
        single = cross_from_bilinear(bil[1][1])
        assert np.max(np.abs(single) / scale[:, None]) > 1e-3


def test_far_field_vanishes(atom):
    cfg = preset("vetsch")
    tm = find_trap_minimum(cfg, None, WINDOW, atom)
    far = total_potential(cfg, G4, cfg.fiber.a + 5e-6, 0.0, 0.0, atom)
    assert np.max(np.abs(joule_to_mK(far))) <= 1e-3 * tm.depth_mK


def test_inside_fiber_rejected(atom):
    cfg = preset("vetsch")
    with pytest.raises(NanotrapError):
        total_potential(cfg, G4, 200e-9, 0.0, 0.0, atom)


@pytest.mark.parametrize("name, expected", [("vetsch", 230e-9), ("magic-compensated", 200e-9),
                                            ("goban-actual", 215e-9)])
def test_radial_minima(atom, name, expected):
    tm = find_trap_minimum(preset(name), None, WINDOW, atom)
    assert tm.r_minus_a == pytest.approx(expected, abs=20e-9)
    assert tm.depth_mK > 0.1
    assert tm.sublevels_mK.shape == (9,)


def test_no_minimum_on_window_edge(atom):
    with pytest.raises(NoMinimumError):
        find_trap_minimum(preset("vetsch"), None, (400e-9, 600e-9), atom)


def test_vetsch_ground_manifolds_overlap(atom):
    cfg = preset("vetsch")
    grid = potential_grid(cfg, [G3, G4], AxisSpec("radial", 150e-9, 600e-9, 91), atom)
    g3, g4 = grid.lowest(G3), grid.lowest(G4)
    depth = -g4.min()
    assert np.max(np.abs(g3 - g4)) <= 0.05 * depth
    assert check_units(grid) <= 1e-12


def test_axial_lattice_period(atom):
    cfg = preset("vetsch")
    period = solve_he11(cfg.fiber, 1064e-9).lattice_period
    axis = AxisSpec("axial", 0.0, 2 * period, 81, r_minus_a=230e-9)
    grid = potential_grid(cfg, G4, axis, atom)
    u = grid.mK[G4]
    half = 40
    assert np.allclose(u[:half + 1], u[half:], rtol=1e-9, atol=1e-12)
    assert np.ptp(u[:, 0]) > 0.01


def test_axis_spec_validation():
    with pytest.raises(ValueError):
        AxisSpec("radial", 1e-7, 2e-7, 1)
    with pytest.raises(ValueError):
        AxisSpec("azimuthal", 0, 1, 10)
    with pytest.raises(ValueError):
        AxisSpec("diagonal", 0, 1, 10)


def test_presets_complete():
    assert set(PRESET_NAMES) == {"vetsch", "magic-compensated", "goban-magic", "goban-actual"}
    for name in PRESET_NAMES:
        cfg = preset(name)
        assert cfg.name == name and cfg.ground.level.L == 0
    with pytest.raises(NanotrapError):
        preset("nope")


def test_config_validation():
    with pytest.raises(ValueError):
        TrapConfig(FiberSpec(250e-9), ())
    with pytest.raises(ValueError):
        TrapConfig(FiberSpec(250e-9), (BeamSpec(1064e-9, 1e-3), BeamSpec(780e-9, 1e-3)))
    with pytest.raises(ValueError):
        BeamSpec(1064e-9, 0.0)
    with pytest.raises(ValueError):
        BeamSpec(1064e-9, 1e-3, direction=0)


def test_unit_factor():
    assert MHZ_PER_MK == pytest.approx(20.8366, abs=1e-4)


def test_excited_state_uses_same_pipeline(atom):
    cfg = preset("goban-magic")
    P5 = Manifold.parse("6P3/2:F=5")
    u = total_potential(cfg, P5, cfg.fiber.a + 200e-9, 0.0, 0.0, atom)
    assert u.shape == (11,)
    assert np.all(np.isfinite(u))
    # pointwise FieldBilinear route gives the same levels
    bil = field_bilinear_at(cfg, cfg.fiber.a + 200e-9, 0.0, 0.0)
    assert len(bil.groups) == 3
    levels = np.linalg.eigvalsh(build_hamiltonian(P5, bil, atom)) + vdw_potential(200e-9)
    assert np.allclose(u, levels, rtol=1e-12)
