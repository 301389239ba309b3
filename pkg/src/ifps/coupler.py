"""Directional coupler models: coupling strength, splitting ratio, dispersion.

The splitting ratio of a symmetric evanescent coupler is
eta(lambda) = cos^2(L kappa(lambda)) per polarization; eta = 1 means zero
power transfer out of the input waveguide. Near a degeneracy wavelength the
response is summarized by the dimensionless offset ``delta_xi``, the
first-order dispersion ``big_m`` and the oscillation period ``T_lambda``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.interpolate import make_interp_spline

from .units import wavelength_from_omega

__all__ = [
    "LinearKappa",
    "PolynomialKappa",
    "TabulatedKappa",
    "PiecewiseConstantKappa",
    "CouplerModel",
    "DimensionlessParams",
    "from_dimensionless",
    "eta_pair_coupler",
]

QUARTER_PI = math.pi / 4.0


@dataclass(frozen=True)
class LinearKappa:
    """kappa(lambda) = slope * lambda + intercept (slope 1/m^2, intercept 1/m)."""

    slope: float
    intercept: float

    def __call__(self, wavelength):
        return self.slope * np.asarray(wavelength, dtype=float) + self.intercept

    def derivative(self, wavelength):
        return np.full_like(np.asarray(wavelength, dtype=float), self.slope)

    def shifted(self, delta_lambda: float) -> "LinearKappa":
        return LinearKappa(self.slope, self.intercept - self.slope * delta_lambda)


@dataclass(frozen=True)
class PolynomialKappa:
    """kappa(lambda) = sum_k c_k lambda^k with ascending coefficients in SI."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        if len(self.coefficients) == 0:
            raise ValueError("polynomial needs at least one coefficient")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))

    def __call__(self, wavelength):
        return npoly.polyval(np.asarray(wavelength, dtype=float), self.coefficients)

    def derivative(self, wavelength):
        der = npoly.polyder(self.coefficients)
        return npoly.polyval(np.asarray(wavelength, dtype=float), der)

    def shifted(self, delta_lambda: float) -> "PolynomialKappa":
        # Coefficients of p(lambda - d) via composition with (lambda - d).
        base = npoly.Polynomial(self.coefficients)
        composed = base(npoly.Polynomial([-delta_lambda, 1.0]))
        return PolynomialKappa(tuple(composed.coef))


@dataclass(frozen=True)
class TabulatedKappa:
    """Interpolated (lambda, kappa) samples; queries outside the table reject.

    Cubic spline for 4 or more samples, linear otherwise; derivatives come
    from the analytic interpolant derivative.
    """

    wavelengths: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.wavelengths, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if lam.ndim != 1 or lam.size < 2 or lam.shape != val.shape:
            raise ValueError("table needs matching 1D arrays with at least 2 samples")
        if np.any(np.diff(lam) <= 0.0):
            raise ValueError("table wavelengths must be strictly increasing")
        object.__setattr__(self, "wavelengths", lam)
        object.__setattr__(self, "values", val)

    def _spline(self):
        k = 3 if self.wavelengths.size >= 4 else 1
        return make_interp_spline(self.wavelengths, self.values, k=k)

    def _check_range(self, wavelength: np.ndarray) -> None:
        if np.min(wavelength) < self.wavelengths[0] or np.max(wavelength) > self.wavelengths[-1]:
            raise ValueError(
                f"wavelength query outside tabulated range "
                f"[{self.wavelengths[0]:.6g}, {self.wavelengths[-1]:.6g}] m"
            )

    def __call__(self, wavelength):
        lam = np.asarray(wavelength, dtype=float)
        self._check_range(lam)
        return self._spline()(lam)

    def derivative(self, wavelength):
        lam = np.asarray(wavelength, dtype=float)
        self._check_range(lam)
        return self._spline().derivative()(lam)

    def shifted(self, delta_lambda: float) -> "TabulatedKappa":
        return TabulatedKappa(self.wavelengths + delta_lambda, self.values.copy())


@dataclass(frozen=True)
class PiecewiseConstantKappa:
    """Step model: constant kappa per wavelength segment.

    ``boundaries`` are the ascending segment edges; ``values`` has one more
    entry than ``boundaries``. Used to assign independent splitting ratios
    to two photon colors without a wavelength parametrization.
    """

    boundaries: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.boundaries) + 1:
            raise ValueError("need len(values) == len(boundaries) + 1")
        if any(b2 <= b1 for b1, b2 in zip(self.boundaries, self.boundaries[1:])):
            raise ValueError("boundaries must be strictly increasing")

    def __call__(self, wavelength):
        lam = np.asarray(wavelength, dtype=float)
        idx = np.searchsorted(np.asarray(self.boundaries), lam, side="right")
        return np.asarray(self.values, dtype=float)[idx]

    def derivative(self, wavelength):
        return np.zeros_like(np.asarray(wavelength, dtype=float))

    def shifted(self, delta_lambda: float) -> "PiecewiseConstantKappa":
        return PiecewiseConstantKappa(
            tuple(b + delta_lambda for b in self.boundaries), self.values
        )


@dataclass(frozen=True)
class DimensionlessParams:
    """Near-degeneracy summary of a coupler for one polarization.

    ``delta_xi`` is the offset of the coupling phase from the ideal 50:50
    value pi/4 at the degeneracy wavelength, folded into (-pi/2, pi/2];
    ``big_m`` is lambda_deg * L * d(kappa)/d(lambda) and sets the splitting
    ratio oscillation period ``period_t_lambda`` = pi lambda_deg / |M|.
    """

    delta_xi: float
    big_m: float
    period_t_lambda: float
    eta_deg: float
    lambda_deg: float

    def __post_init__(self):
        if not (-math.pi / 2.0 < self.delta_xi <= math.pi / 2.0):
            raise ValueError("delta_xi must lie in (-pi/2, pi/2]")
        if self.big_m != 0.0:
            expected = math.pi * self.lambda_deg / abs(self.big_m)
            if abs(self.period_t_lambda - expected) > 1e-9 * expected:
                raise ValueError("period_t_lambda inconsistent with big_m")


def fold_delta_xi(x: float) -> float:
    """Fold a coupling-phase offset into (-pi/2, pi/2] modulo pi."""
    folded = math.fmod(x, math.pi)
    if folded > math.pi / 2.0:
        folded -= math.pi
    elif folded <= -math.pi / 2.0:
        folded += math.pi
    return folded


@dataclass(frozen=True)
class CouplerModel:
    """Interaction length plus a per-polarization coupling-strength model.

    A polarization missing from ``kappa`` rejects queries instead of
    aliasing to the other one; TE/TM birefringence is significant here.
    """

    length: float
    kappa: dict[str, object]

    def __post_init__(self):
        if self.length <= 0.0:
            raise ValueError("interaction length must be positive")
        if not self.kappa:
            raise ValueError("at least one polarization model is required")

    def _model(self, polarization: str):
        try:
            return self.kappa[polarization]
        except KeyError:
            raise ValueError(
                f"coupler has no kappa model for polarization {polarization!r}"
            ) from None

    def kappa_value(self, polarization: str, wavelength):
        """Coupling strength (1/m) at a wavelength (m)."""
        return self._model(polarization)(wavelength)

    def coupling_phase(self, polarization: str, wavelength):
        """Accumulated coupling phase xi = L kappa(lambda) (radians)."""
        return self.length * self.kappa_value(polarization, wavelength)

    def splitting_ratio(self, polarization: str, wavelength):
        """eta = cos^2(L kappa); eta = 1 means zero power transfer."""
        return np.cos(self.coupling_phase(polarization, wavelength)) ** 2

    def dimensionless_params(self, polarization: str, lambda_deg: float) -> DimensionlessParams:
        model = self._model(polarization)
        phase = float(self.length * model(lambda_deg))
        delta_xi = fold_delta_xi(phase - QUARTER_PI)
        if abs(delta_xi) > QUARTER_PI:
            warnings.warn(
                f"delta_xi = {delta_xi:.4g} lies outside [-pi/4, pi/4]; the "
                "coupler is far from a 50:50 split at the degeneracy wavelength",
                stacklevel=2,
            )
        big_m = float(lambda_deg * self.length * model.derivative(lambda_deg))
        period = math.inf if big_m == 0.0 else math.pi * lambda_deg / abs(big_m)
        eta_deg = float(self.splitting_ratio(polarization, lambda_deg))
        return DimensionlessParams(
            delta_xi=delta_xi,
            big_m=big_m,
            period_t_lambda=period,
            eta_deg=eta_deg,
            lambda_deg=lambda_deg,
        )

    def transfer_matrix(
        self,
        polarization: str,
        omega: float,
        dispersive: bool = True,
        reference_wavelength: float | None = None,
    ) -> np.ndarray:
        """2x2 unitary mode transformation at an angular frequency.

        Dispersive form: [[cos(kL), i sin(kL)], [i sin(kL), cos(kL)]] at the
        query wavelength, keeping the relative sign of the elements. The
        non-dispersive form is built from the splitting ratio at a declared
        reference wavelength and loses that sign information.
        """
        if dispersive:
            phase = float(self.coupling_phase(polarization, float(wavelength_from_omega(omega))))
            c, s = math.cos(phase), math.sin(phase)
            return np.array([[c, 1j * s], [1j * s, c]])
        if reference_wavelength is None:
            raise ValueError("non-dispersive transfer matrix needs a reference wavelength")
        eta = float(self.splitting_ratio(polarization, reference_wavelength))
        root_eta, root_rest = math.sqrt(eta), math.sqrt(1.0 - eta)
        return np.array([[root_eta, 1j * root_rest], [1j * root_rest, root_eta]])

    def g_factor(self, polarization: str, omega, source: str, output: str):
        """Real coupler response cos(kL) for source == output, sin(kL) otherwise.

        The imaginary units of the full transfer matrix are carried by the
        bunched/anti-bunched sign bookkeeping of the outcome assembly.
        """
        if source not in ("A", "B") or output not in ("A", "B"):
            raise ValueError("source and output must be 'A' or 'B'")
        wavelength = wavelength_from_omega(np.asarray(omega, dtype=float))
        phase = self.coupling_phase(polarization, wavelength)
        return np.cos(phase) if source == output else np.sin(phase)

    def shifted_5050(self, delta_lambda: float) -> "CouplerModel":
        """Translate the response in wavelength: eta'(lambda) = eta(lambda - d)."""
        return replace(
            self, kappa={pol: model.shifted(delta_lambda) for pol, model in self.kappa.items()}
        )

    def polarizations(self) -> tuple[str, ...]:
        return tuple(self.kappa.keys())


def from_dimensionless(
    delta_xi: float,
    big_m: float,
    lambda_deg: float,
    polarizations: tuple[str, ...] = ("TE", "TM"),
) -> CouplerModel:
    """Linear coupler realizing xi(lambda) = pi/4 + delta_xi + (lambda/lambda_deg - 1) M.

    The unit interaction length is absorbed into kappa, so
    ``dimensionless_params`` round-trips (delta_xi, big_m) exactly.
    """
    if lambda_deg <= 0.0:
        raise ValueError("lambda_deg must be positive")
    slope = big_m / lambda_deg
    intercept = QUARTER_PI + delta_xi - big_m
    model = LinearKappa(slope=slope, intercept=intercept)
    return CouplerModel(length=1.0, kappa={pol: model for pol in polarizations})


def eta_pair_coupler(
    eta1: float,
    eta2: float,
    boundary_wavelength: float,
    polarizations: tuple[str, ...] = ("TE", "TM"),
) -> CouplerModel:
    """Two-segment coupler giving splitting ratio eta1 below the boundary
    wavelength and eta2 above it (piecewise-constant coupling phase)."""
    for eta in (eta1, eta2):
        if not 0.0 <= eta <= 1.0:
            raise ValueError("splitting ratios must lie in [0, 1]")
    xi1 = math.acos(math.sqrt(eta1))
    xi2 = math.acos(math.sqrt(eta2))
    model = PiecewiseConstantKappa(boundaries=(boundary_wavelength,), values=(xi1, xi2))
    return CouplerModel(length=1.0, kappa={pol: model for pol in polarizations})
