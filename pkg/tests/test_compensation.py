import math

import numpy as np
import pytest

from ifps.compensation import (
    CompensationResult,
    central_wavelengths,
    nondegeneracy_scan,
    optimize_5050_shift,
    two_color_state,
)
from ifps.coupler import CouplerModel, PolynomialKappa, from_dimensionless
from ifps.interference import TwoSourceState, outcome_probabilities
from ifps.spectra import GaussianSpec, build_type1_jsa, make_grid

NM = 1e-9
LAM_DEG = 780 * NM


def chirped_coupler(big_m: float, quad: float, lam_deg: float = LAM_DEG) -> CouplerModel:
    """xi(l) = pi/4 + M (l/ld - 1) + Q (l/ld - 1)^2 at unit length."""
    a2 = quad / lam_deg**2
    a1 = big_m / lam_deg - 2 * quad / lam_deg
    a0 = math.pi / 4 - big_m + quad
    model = PolynomialKappa((a0, a1, a2))
    return CouplerModel(length=1.0, kappa={"TE": model, "TM": model})


# ---------------------------------------------------------------------------
# central_wavelengths


def test_degenerate_target():
    point = central_wavelengths(390 * NM, 0.0)
    assert point.lambda1 == pytest.approx(780 * NM, rel=1e-12)
    assert point.lambda2 == pytest.approx(780 * NM, rel=1e-12)


def test_wavelength_asymmetry_at_large_separation():
    point = central_wavelengths(390 * NM, 200 * NM)
    assert point.lambda2 - point.lambda1 == pytest.approx(200 * NM, rel=1e-12)
    # Frequency symmetry forces the wavelength midpoint above 780 nm.
    assert (point.lambda1 + point.lambda2) / 2 > 780 * NM


def test_energy_conservation_exact():
    for target in (0.0, 25 * NM, 120 * NM, 333 * NM):
        point = central_wavelengths(390 * NM, target)
        lhs = 1 / point.lambda1 + 1 / point.lambda2
        assert lhs == pytest.approx(1 / (390 * NM), rel=1e-12)


def test_frequency_midpoint_is_half_pump():
    point = central_wavelengths(390 * NM, 150 * NM)
    omega_mid = 0.5 * (1 / point.lambda1 + 1 / point.lambda2)
    assert omega_mid == pytest.approx(0.5 / (390 * NM), rel=1e-12)


def test_invalid_inputs_rejected():
    with pytest.raises(ValueError):
        central_wavelengths(-1.0, 0.0)
    with pytest.raises(ValueError):
        central_wavelengths(390 * NM, -5 * NM)


# ---------------------------------------------------------------------------
# nondegeneracy_scan


def test_linear_coupler_small_nondegeneracy_holds():
    coupler = from_dimensionless(0.0, 4.072, LAM_DEG)
    scan = nondegeneracy_scan(coupler, 390 * NM, 2 * NM, [0.0, 5 * NM, 20 * NM])
    np.testing.assert_allclose(scan.p_s, 1.0, atol=2e-3)


def test_linear_coupler_degrades_at_large_nondegeneracy():
    coupler = from_dimensionless(0.0, 4.072, LAM_DEG)
    scan = nondegeneracy_scan(
        coupler, 390 * NM, 2 * NM, [0.0, 100 * NM, 250 * NM, 400 * NM]
    )
    assert scan.p_s[-1] < scan.p_s[0] - 1e-3
    assert np.all(np.diff(scan.p_s) <= 1e-6)


def test_quadratic_coupler_degrades_faster_than_linear():
    nondeg = [200 * NM]
    linear = nondegeneracy_scan(from_dimensionless(0.0, 4.072, LAM_DEG), 390 * NM, 2 * NM, nondeg)
    chirped = nondegeneracy_scan(chirped_coupler(4.072, 12.0), 390 * NM, 2 * NM, nondeg)
    assert chirped.p_s[0] < linear.p_s[0] - 1e-3


def test_dispersionless_control_stays_perfect():
    half = CouplerModel(
        length=1.0,
        kappa={"TE": PolynomialKappa((math.pi / 4,)), "TM": PolynomialKappa((math.pi / 4,))},
    )
    scan = nondegeneracy_scan(half, 390 * NM, 2 * NM, [0.0, 100 * NM, 300 * NM])
    np.testing.assert_allclose(scan.p_s, 1.0, atol=2e-3)


# ---------------------------------------------------------------------------
# optimize_5050_shift


def narrowband_degenerate_state():
    photon = GaussianSpec(LAM_DEG, 1e-5 * LAM_DEG)
    pump = GaussianSpec(LAM_DEG / 2, 0.0)
    grid = make_grid(photon, photon, 4.0, 48)
    jsa = build_type1_jsa(pump, photon, photon, "TE", grid, weight=0.5)
    return TwoSourceState.from_identical(jsa)


def test_optimizer_keeps_zero_shift_when_optimal():
    state = narrowband_degenerate_state()
    coupler = from_dimensionless(0.0, 4.072, LAM_DEG)
    halfwidth = 50 * NM
    result = optimize_5050_shift(state, coupler, halfwidth)
    assert abs(result.delta_lambda_star) <= max(1e-4 * halfwidth, 1e-12) * 2
    assert result.ps_after == pytest.approx(result.ps_before, abs=1e-9)


def test_optimizer_restores_chirped_two_color_case():
    coupler = chirped_coupler(4.072, 40.0)
    point = central_wavelengths(390 * NM, 200 * NM)
    eta1 = float(coupler.splitting_ratio("TE", point.lambda1))
    eta2 = float(coupler.splitting_ratio("TE", point.lambda2))
    # Same-quadrant precondition: both ratios on one side of 50:50.
    assert (eta1 - 0.5) * (eta2 - 0.5) > 0
    state = two_color_state(point, 2 * NM, points_per_axis=48)
    result = optimize_5050_shift(state, coupler, 150 * NM)
    assert result.ps_after > result.ps_before
    shifted = coupler.shifted_5050(result.delta_lambda_star)
    new1 = float(shifted.splitting_ratio("TE", point.lambda1))
    new2 = float(shifted.splitting_ratio("TE", point.lambda2))
    assert abs(new1 + new2 - 1.0) < abs(eta1 + eta2 - 1.0)


def test_optimizer_matches_brute_force_scan():
    coupler = chirped_coupler(4.072, 40.0)
    point = central_wavelengths(390 * NM, 200 * NM)
    state = two_color_state(point, 2 * NM, points_per_axis=48)
    halfwidth = 150 * NM
    result = optimize_5050_shift(state, coupler, halfwidth)
    shifts = np.linspace(-halfwidth, halfwidth, 101)
    scores = [
        outcome_probabilities(state, coupler.shifted_5050(float(s))).ps_total for s in shifts
    ]
    best = shifts[int(np.argmax(scores))]
    step = shifts[1] - shifts[0]
    assert abs(result.delta_lambda_star - best) <= 2 * step


def test_optimizer_never_degrades_random_cases():
    rng = np.random.default_rng(17)
    state = narrowband_degenerate_state()
    for _ in range(5):
        coupler = chirped_coupler(rng.uniform(-8, 8), rng.uniform(-30, 30))
        result = optimize_5050_shift(state, coupler, 100 * NM, prescan_points=17)
        assert result.ps_after >= result.ps_before - 1e-9
        assert result.evaluations > 0


def test_result_type_rejects_regression():
    with pytest.raises(ValueError, match="degrade"):
        CompensationResult(0.0, ps_before=0.9, ps_after=0.5, evaluations=3)


def test_optimizer_validates_halfwidth():
    state = narrowband_degenerate_state()
    coupler = from_dimensionless(0.0, 4.072, LAM_DEG)
    with pytest.raises(ValueError, match="halfwidth"):
        optimize_5050_shift(state, coupler, 0.0)
