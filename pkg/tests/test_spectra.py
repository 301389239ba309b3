import math

import numpy as np
import pytest

from ifps.spectra import (
    GaussianSpec,
    JointSpectralAmplitude,
    SpectralGrid,
    apply_delay_phase,
    build_cross_polarized_jsa,
    build_type1_jsa,
    make_grid,
    pump_fwhm_for_schmidt_number,
    schmidt_number,
)
from ifps.units import C_VACUUM, FWHM_TO_SIGMA

NM = 1e-9


def test_make_grid_extent_matches_sigma_span():
    photon = GaussianSpec(1550 * NM, 3 * NM)
    grid = make_grid(photon, photon, sigma_span=4.0, points_per_axis=64)
    center = 2 * math.pi * C_VACUUM / (1550 * NM)
    sigma = (2 * math.pi * C_VACUUM * 3 * NM / (1550 * NM) ** 2) * FWHM_TO_SIGMA
    assert grid.omega1_axis.size == 64
    assert grid.omega1_axis[0] == pytest.approx(center - 4 * sigma, rel=1e-12)
    assert grid.omega1_axis[-1] == pytest.approx(center + 4 * sigma, rel=1e-12)
    mid = 0.5 * (grid.omega1_axis[0] + grid.omega1_axis[-1])
    assert mid == pytest.approx(center, rel=1e-12)


def test_make_grid_identical_photons_share_axes():
    photon = GaussianSpec(1550 * NM, 3 * NM)
    grid = make_grid(photon, photon, sigma_span=4.0, points_per_axis=32)
    np.testing.assert_array_equal(grid.omega1_axis, grid.omega2_axis)


def test_center_omega_780nm():
    photon = GaussianSpec(780 * NM, 10 * NM)
    # 2 pi c / lambda with c = 299792458 m/s
    assert photon.center_omega == pytest.approx(2.4149379e15, rel=1e-6)


def test_make_grid_rejects_two_flat_photons():
    flat = GaussianSpec(780 * NM, 0.0)
    with pytest.raises(ValueError, match="extent"):
        make_grid(flat, flat, sigma_span=4.0, points_per_axis=32)


def test_make_grid_flat_photon_borrows_other_sigma():
    flat = GaussianSpec(780 * NM, 0.0)
    photon = GaussianSpec(780 * NM, 5 * NM)
    grid = make_grid(flat, photon, sigma_span=4.0, points_per_axis=32)
    assert grid.omega1_axis[-1] - grid.omega1_axis[0] == pytest.approx(
        grid.omega2_axis[-1] - grid.omega2_axis[0]
    )


def test_make_grid_minimum_points():
    photon = GaussianSpec(780 * NM, 5 * NM)
    with pytest.raises(ValueError, match="at least 16"):
        make_grid(photon, photon, sigma_span=4.0, points_per_axis=8)


def test_grid_rejects_nonuniform_axis():
    with pytest.raises(ValueError, match="uniform"):
        SpectralGrid(np.array([1.0, 2.0, 4.0]), np.array([1.0, 2.0, 3.0]))


def test_type1_exchange_symmetry_exact():
    pump = GaussianSpec(390 * NM, 0.2 * NM)
    p1 = GaussianSpec(770 * NM, 4 * NM)
    p2 = GaussianSpec(790 * NM, 6 * NM)
    grid = make_grid(p1, p2, 4.0, 64, shared_axes=True)
    jsa = build_type1_jsa(pump, p1, p2, "TE", grid, weight=1.0)
    amp = jsa.components[("TE", "TE")]
    np.testing.assert_array_equal(amp, amp.T)


def test_type1_flat_pump_is_separable():
    pump = GaussianSpec(390 * NM, 0.0)
    p1 = GaussianSpec(760 * NM, 5 * NM)
    p2 = GaussianSpec(800 * NM, 5 * NM)
    jsa = build_type1_jsa(pump, p1, p2, "TE", weight=1.0, points_per_axis=64)
    report = schmidt_number(jsa)
    assert report.schmidt_number == pytest.approx(1.0, abs=1e-6)


def test_type1_narrow_pump_is_entangled():
    pump = GaussianSpec(390 * NM, 0.1 * NM)
    photon = GaussianSpec(780 * NM, 0.25 * NM)
    jsa = build_type1_jsa(pump, photon, photon, "TE", weight=1.0, points_per_axis=128)
    assert schmidt_number(jsa).schmidt_number > 1.0 + 1e-3


def test_type1_normalized_to_weight():
    pump = GaussianSpec(390 * NM, 0.1 * NM)
    photon = GaussianSpec(780 * NM, 2 * NM)
    jsa = build_type1_jsa(pump, photon, photon, "TE", weight=0.5)
    assert jsa.norm() == pytest.approx(0.5, abs=1e-9)


def test_pump_inconsistency_warns():
    # About 9 pump sigma away from the 390 nm energy-conservation match.
    pump = GaussianSpec(389.8 * NM, 0.05 * NM)
    photon = GaussianSpec(780 * NM, 2 * NM)
    with pytest.warns(UserWarning, match="pump center"):
        build_type1_jsa(pump, photon, photon, "TE", weight=1.0, points_per_axis=32)


def test_cross_polarized_is_unsymmetrized():
    pump = GaussianSpec(390 * NM, 0.0)
    p1 = GaussianSpec(770 * NM, 4 * NM)
    p2 = GaussianSpec(790 * NM, 8 * NM)
    grid = make_grid(p1, p2, 4.0, 48, shared_axes=True)
    jsa = build_cross_polarized_jsa(pump, p1, p2, grid, weight=1.0)
    (pair, amp) = jsa.single_component()
    assert pair == ("TE", "TM")
    asymmetry = np.linalg.norm(amp - amp.T) / np.linalg.norm(amp)
    assert asymmetry > 0.1


def test_cross_polarized_identical_specs_accidentally_symmetric():
    pump = GaussianSpec(390 * NM, 0.0)
    photon = GaussianSpec(780 * NM, 5 * NM)
    jsa = build_cross_polarized_jsa(pump, photon, photon, weight=1.0, points_per_axis=32)
    _, amp = jsa.single_component()
    np.testing.assert_allclose(amp, amp.T, rtol=0, atol=1e-15)


def test_cross_polarized_norm_contract():
    pump = GaussianSpec(390 * NM, 0.15 * NM)
    p1 = GaussianSpec(775 * NM, 3 * NM)
    p2 = GaussianSpec(785 * NM, 3 * NM)
    jsa = build_cross_polarized_jsa(pump, p1, p2, weight=0.5, points_per_axis=48)
    assert jsa.norm() == pytest.approx(0.5, abs=1e-9)


def test_jsa_rejects_norm_mismatch():
    photon = GaussianSpec(780 * NM, 5 * NM)
    grid = make_grid(photon, photon, 4.0, 16)
    amp = np.ones(grid.shape, dtype=complex)
    with pytest.raises(ValueError, match="norm"):
        JointSpectralAmplitude(grid=grid, components={("TE", "TE"): amp}, weight=1.0)


def test_schmidt_separable_rank_one():
    photon = GaussianSpec(780 * NM, 5 * NM)
    grid = make_grid(photon, photon, 4.0, 64)
    f = np.exp(-np.linspace(-2, 2, 64) ** 2)
    g = np.exp(-np.linspace(-2, 2, 64) ** 4)
    amp = np.outer(f, g).astype(complex)
    amp /= math.sqrt(np.sum(np.abs(amp) ** 2) * grid.measure)
    jsa = JointSpectralAmplitude(grid=grid, components={("TE", "TE"): amp}, weight=1.0)
    assert schmidt_number(jsa).schmidt_number == pytest.approx(1.0, abs=1e-6)


def test_schmidt_two_equal_modes():
    photon = GaussianSpec(780 * NM, 5 * NM)
    grid = make_grid(photon, photon, 4.0, 64)
    x = np.linspace(-1, 1, 64)
    f1, f2 = np.ones_like(x), x  # orthogonal on a symmetric grid
    amp = (np.outer(f1, f1) / np.linalg.norm(f1) ** 2 + np.outer(f2, f2) / np.linalg.norm(f2) ** 2)
    amp = amp.astype(complex) / math.sqrt(np.sum(np.abs(amp) ** 2) * grid.measure)
    jsa = JointSpectralAmplitude(grid=grid, components={("TE", "TE"): amp}, weight=1.0)
    report = schmidt_number(jsa)
    assert report.schmidt_number == pytest.approx(2.0, abs=1e-9)
    assert report.coefficients[0] == pytest.approx(0.5, abs=1e-12)


def test_schmidt_rejects_zero_amplitude():
    photon = GaussianSpec(780 * NM, 5 * NM)
    grid = make_grid(photon, photon, 4.0, 16)
    amp = np.ones(grid.shape, dtype=complex)
    amp /= math.sqrt(np.sum(np.abs(amp) ** 2) * grid.measure)
    jsa = JointSpectralAmplitude(grid=grid, components={("TE", "TE"): amp}, weight=1.0)
    object.__setattr__(jsa, "components", {("TE", "TE"): np.zeros(grid.shape, dtype=complex)})
    with pytest.raises(ValueError, match="zero"):
        schmidt_number(jsa)


def test_schmidt_stable_under_grid_refinement():
    pump = GaussianSpec(390 * NM, 0.1 * NM)
    photon = GaussianSpec(780 * NM, 0.5 * NM)
    values = []
    for pts in (128, 256):
        jsa = build_type1_jsa(pump, photon, photon, "TE", weight=1.0, points_per_axis=pts)
        values.append(schmidt_number(jsa).schmidt_number)
    assert abs(values[0] - values[1]) < 1e-3


def test_delay_phase_identity_and_modulus():
    pump = GaussianSpec(390 * NM, 0.1 * NM)
    photon = GaussianSpec(780 * NM, 2 * NM)
    jsa = build_type1_jsa(pump, photon, photon, "TE", weight=1.0, points_per_axis=48)
    assert apply_delay_phase(jsa, 0.0) is jsa
    shifted = apply_delay_phase(jsa, 3.7e-15)
    ref = jsa.components[("TE", "TE")]
    np.testing.assert_allclose(
        np.abs(shifted.components[("TE", "TE")]), np.abs(ref), rtol=0, atol=1e-15
    )
    assert shifted.norm() == pytest.approx(jsa.norm(), rel=1e-12)


def test_delay_phase_global_for_anticorrelated_state():
    # Near-monochromatic pump: w1 + w2 is constant on the support, so the
    # delay phase reduces to a global phase (overlap magnitude stays 1).
    pump = GaussianSpec(390 * NM, 0.001 * NM)
    photon = GaussianSpec(780 * NM, 0.5 * NM)
    jsa = build_type1_jsa(pump, photon, photon, "TE", weight=1.0, points_per_axis=160)
    tau = 50e-15
    shifted = apply_delay_phase(jsa, tau)
    a = jsa.components[("TE", "TE")]
    b = shifted.components[("TE", "TE")]
    overlap = abs(np.sum(np.conj(a) * b)) * jsa.grid.measure
    assert overlap == pytest.approx(1.0, abs=1e-6)


def test_pump_fwhm_solver_hits_target():
    photon = GaussianSpec(780 * NM, 100 * NM)
    fwhm = pump_fwhm_for_schmidt_number(1.26, 390 * NM, photon, photon, points_per_axis=128)
    pump = GaussianSpec(390 * NM, fwhm)
    jsa = build_type1_jsa(pump, photon, photon, "TE", weight=1.0, points_per_axis=128)
    assert schmidt_number(jsa).schmidt_number == pytest.approx(1.26, abs=1e-3)


def test_pump_fwhm_solver_flat_for_unit_target():
    photon = GaussianSpec(780 * NM, 10 * NM)
    assert pump_fwhm_for_schmidt_number(1.0, 390 * NM, photon, photon) == 0.0


def test_pump_fwhm_solver_rejects_unreachable_target():
    photon = GaussianSpec(780 * NM, 10 * NM)
    grid = make_grid(photon, photon, 4.0, 32)
    with pytest.raises(ValueError, match="achievable maximum"):
        pump_fwhm_for_schmidt_number(500.0, 390 * NM, photon, photon, grid=grid)
