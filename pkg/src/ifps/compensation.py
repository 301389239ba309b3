"""Far-from-degeneracy effects and 50:50-wavelength compensation.

At large non-degeneracy the photon central wavelengths follow the
energy-conservation tuning curve 1/l1 + 1/l2 = 1/lp, which is symmetric in
frequency but asymmetric in wavelength about twice the pump wavelength.
Combined with coupling-strength curvature this breaks the splitting-ratio
antisymmetry; translating the 50:50 wavelength restores part of the lost
separation probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupler import CouplerModel
from .interference import TwoSourceState, outcome_probabilities
from .spectra import GaussianSpec, build_type1_jsa, make_grid

__all__ = [
    "TuningCurvePoint",
    "CompensationResult",
    "NondegeneracyScan",
    "central_wavelengths",
    "nondegeneracy_scan",
    "optimize_5050_shift",
]

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class TuningCurvePoint:
    """Photon central wavelengths consistent with pair-generation energy
    conservation: 1/lambda1 + 1/lambda2 = 1/pump_lambda."""

    lambda1: float
    lambda2: float
    pump_lambda: float

    def __post_init__(self):
        lhs = 1.0 / self.lambda1 + 1.0 / self.lambda2
        rhs = 1.0 / self.pump_lambda
        if abs(lhs - rhs) > 1e-12 * rhs:
            raise ValueError("wavelengths violate energy conservation")


@dataclass(frozen=True)
class CompensationResult:
    """Outcome of the 50:50-wavelength optimization; never a regression."""

    delta_lambda_star: float
    ps_before: float
    ps_after: float
    evaluations: int

    def __post_init__(self):
        if self.ps_after < self.ps_before - 1e-9:
            raise ValueError("optimizer must not degrade the separation probability")


def central_wavelengths(pump_lambda: float, nondegeneracy_lambda: float) -> TuningCurvePoint:
    """Solve for photon centers with a given wavelength separation.

    Returns lambda1 < lambda2 with lambda2 - lambda1 equal to the target;
    the solution is exactly symmetric in frequency about half the pump
    frequency but asymmetric in wavelength about 2 * pump_lambda.
    """
    if pump_lambda <= 0.0:
        raise ValueError("pump wavelength must be positive")
    if nondegeneracy_lambda < 0.0:
        raise ValueError("non-degeneracy target must be nonnegative")
    delta = nondegeneracy_lambda
    # lambda2^2 - (delta + 2 lp) lambda2 + lp delta = 0, larger root.
    disc = delta**2 + 4.0 * pump_lambda**2
    lambda2 = 0.5 * (delta + 2.0 * pump_lambda + math.sqrt(disc))
    lambda1 = lambda2 - delta
    return TuningCurvePoint(lambda1=lambda1, lambda2=lambda2, pump_lambda=pump_lambda)


@dataclass(frozen=True)
class NondegeneracyScan:
    nondegeneracy: np.ndarray
    p_s: np.ndarray
    v_s: np.ndarray


def two_color_state(
    point: TuningCurvePoint,
    photon_fwhm: float,
    theta: float = 0.0,
    pump_fwhm: float = 0.0,
    polarization: str = "TE",
    points_per_axis: int = 64,
    sigma_span: float = 4.0,
) -> TwoSourceState:
    """Identical-source co-polarized state at a tuning-curve point."""
    photon1 = GaussianSpec(point.lambda1, photon_fwhm)
    photon2 = GaussianSpec(point.lambda2, photon_fwhm)
    pump = GaussianSpec(point.pump_lambda, pump_fwhm)
    grid = make_grid(photon1, photon2, sigma_span, points_per_axis)
    jsa = build_type1_jsa(pump, photon1, photon2, polarization, grid, weight=0.5)
    return TwoSourceState.from_identical(jsa, theta=theta)


def nondegeneracy_scan(
    coupler: CouplerModel,
    pump_lambda: float,
    photon_fwhm: float,
    nondeg_values,
    theta: float = 0.0,
    pump_fwhm: float = 0.0,
    polarization: str = "TE",
    points_per_axis: int = 64,
    sigma_span: float = 4.0,
) -> NondegeneracyScan:
    """Separation performance along the energy-conservation tuning curve."""
    nondeg = np.asarray(nondeg_values, dtype=float)
    p_s = np.empty_like(nondeg)
    v_s = np.empty_like(nondeg)
    for i, delta in enumerate(nondeg):
        point = central_wavelengths(pump_lambda, float(delta))
        state = two_color_state(
            point, photon_fwhm, theta, pump_fwhm, polarization, points_per_axis, sigma_span
        )
        report = outcome_probabilities(state, coupler)
        p_s[i] = report.ps_total
        v_s[i] = np.nan if report.vis_s is None else report.vis_s
    return NondegeneracyScan(nondegeneracy=nondeg, p_s=p_s, v_s=v_s)


def _golden_section_maximize(f, lo: float, hi: float, tol: float):
    """Golden-section maximization on [lo, hi]; returns (x, f(x))."""
    c = hi - (hi - lo) / GOLDEN_RATIO
    d = lo + (hi - lo) / GOLDEN_RATIO
    fc, fd = f(c), f(d)
    while abs(hi - lo) > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - (hi - lo) / GOLDEN_RATIO
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + (hi - lo) / GOLDEN_RATIO
            fd = f(d)
    x = (lo + hi) / 2.0
    return x, f(x)


def optimize_5050_shift(
    state: TwoSourceState, coupler: CouplerModel, search_halfwidth: float, prescan_points: int = 33
) -> CompensationResult:
    """Find the 50:50-wavelength translation maximizing P_S.

    A coarse pre-scan over [-halfwidth, +halfwidth] selects the best
    bracket (chirped couplers can be multi-modal over wide ranges), then
    golden-section search refines it until the bracket is below
    max(1e-4 * halfwidth, 1 pm). Falls back to zero shift whenever no
    candidate beats the unshifted coupler.
    """
    if search_halfwidth <= 0.0:
        raise ValueError("search_halfwidth must be positive")
    evals = 0

    def objective(delta: float) -> float:
        nonlocal evals
        evals += 1
        value = outcome_probabilities(state, coupler.shifted_5050(delta)).ps_total
        if not math.isfinite(value):
            raise ValueError(f"separation probability not finite at shift {delta:g}")
        return value

    shifts = np.linspace(-search_halfwidth, search_halfwidth, prescan_points)
    scores = np.array([objective(s) for s in shifts])
    ps_before = objective(0.0)
    best = int(np.argmax(scores))
    lo = shifts[max(best - 1, 0)]
    hi = shifts[min(best + 1, prescan_points - 1)]
    tol = max(1e-4 * search_halfwidth, 1e-12)
    x_star, f_star = _golden_section_maximize(objective, float(lo), float(hi), tol)

    if scores[best] > f_star:
        x_star, f_star = float(shifts[best]), float(scores[best])
    if f_star <= ps_before:
        return CompensationResult(0.0, ps_before, ps_before, evals)
    return CompensationResult(x_star, ps_before, f_star, evals)
