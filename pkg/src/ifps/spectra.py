"""Joint spectral amplitudes: construction, normalization and Schmidt analysis.

A two-photon state is represented by complex amplitude matrices over a
uniform 2D angular-frequency grid, one matrix per polarization pair. The
co-polarized builder mimics a Type I down-conversion output: a product of
pump and photon Gaussians, exchange symmetrized. The cross-polarized
builder places the unsymmetrized product in the (TE, TM) slot.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .units import omega_from_wavelength, sigma_omega_from_fwhm

__all__ = [
    "GaussianSpec",
    "SpectralGrid",
    "JointSpectralAmplitude",
    "SchmidtReport",
    "make_grid",
    "build_type1_jsa",
    "build_cross_polarized_jsa",
    "schmidt_number",
    "apply_delay_phase",
    "pump_fwhm_for_schmidt_number",
]

POLARIZATIONS = ("TE", "TM")

#: Absolute tolerance on quadrature norms against the declared weight.
NORM_TOL = 1e-9


@dataclass(frozen=True)
class GaussianSpec:
    """Gaussian spectral line described by center wavelength and intensity FWHM.

    ``fwhm_bandwidth = 0`` is a sentinel for a flat (infinitely broad)
    envelope; it is accepted for pump specs, where it produces spectrally
    uncorrelated pairs, and rejected wherever a finite extent is required.
    Both fields are in meters.
    """

    center_wavelength: float
    fwhm_bandwidth: float

    def __post_init__(self):
        if self.center_wavelength <= 0.0:
            raise ValueError("center_wavelength must be positive")
        if self.fwhm_bandwidth < 0.0:
            raise ValueError("fwhm_bandwidth must be nonnegative")

    @property
    def center_omega(self) -> float:
        return float(omega_from_wavelength(self.center_wavelength))

    @property
    def sigma_omega(self) -> float:
        """Intensity standard deviation in rad/s (0 for the flat sentinel)."""
        if self.fwhm_bandwidth == 0.0:
            return 0.0
        return sigma_omega_from_fwhm(self.center_wavelength, self.fwhm_bandwidth)

    @property
    def is_flat(self) -> bool:
        return self.fwhm_bandwidth == 0.0

    def amplitude(self, omega):
        """Amplitude envelope exp(-(w - w0)^2 / (4 sigma^2)).

        The squared modulus then has the declared intensity FWHM. The flat
        sentinel returns 1 everywhere.
        """
        omega = np.asarray(omega, dtype=float)
        if self.is_flat:
            return np.ones_like(omega)
        return np.exp(-((omega - self.center_omega) ** 2) / (4.0 * self.sigma_omega**2))


def _check_axis(axis: np.ndarray, name: str) -> None:
    if axis.ndim != 1 or axis.size < 2:
        raise ValueError(f"{name} must be a 1D array with at least 2 points")
    steps = np.diff(axis)
    if np.any(steps <= 0.0):
        raise ValueError(f"{name} must be strictly increasing")
    mean = steps.mean()
    # Relative to the axis magnitude: rounding of the (large) frequency
    # values themselves dominates the step-to-step jitter.
    scale = max(abs(float(axis[0])), abs(float(axis[-1])))
    if np.max(np.abs(steps - mean)) > 1e-12 * scale:
        raise ValueError(f"{name} must be uniformly spaced")


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform rectangular discretization of (omega1, omega2) space.

    Axes are strictly increasing and uniformly spaced. Grids produced by
    :func:`make_grid` carry at least 16 points per axis; the constructor
    itself accepts down to 2 points so that tiny hand-built grids remain
    available to exhaustive cross-checks.
    """

    omega1_axis: np.ndarray
    omega2_axis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega1_axis", np.asarray(self.omega1_axis, dtype=float))
        object.__setattr__(self, "omega2_axis", np.asarray(self.omega2_axis, dtype=float))
        _check_axis(self.omega1_axis, "omega1_axis")
        _check_axis(self.omega2_axis, "omega2_axis")

    @property
    def d_omega1(self) -> float:
        return float(self.omega1_axis[1] - self.omega1_axis[0])

    @property
    def d_omega2(self) -> float:
        return float(self.omega2_axis[1] - self.omega2_axis[0])

    @property
    def measure(self) -> float:
        """Quadrature cell area d(omega1) d(omega2) of the midpoint rule."""
        return self.d_omega1 * self.d_omega2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.omega1_axis.size, self.omega2_axis.size)

    @property
    def shares_axes(self) -> bool:
        return self.omega1_axis.size == self.omega2_axis.size and bool(
            np.array_equal(self.omega1_axis, self.omega2_axis)
        )

    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        return self.omega1_axis[:, None], self.omega2_axis[None, :]

    def same_as(self, other: "SpectralGrid") -> bool:
        return np.array_equal(self.omega1_axis, other.omega1_axis) and np.array_equal(
            self.omega2_axis, other.omega2_axis
        )


def make_grid(
    photon1: GaussianSpec,
    photon2: GaussianSpec,
    sigma_span: float,
    points_per_axis: int = 128,
    shared_axes: bool = False,
) -> SpectralGrid:
    """Build a grid covering each photon's center +- sigma_span * sigma.

    A photon with the flat (zero-bandwidth) sentinel borrows the other
    photon's sigma for its extent; if both are flat no extent is derivable
    and the call is rejected. With ``shared_axes=True`` both axes span the
    union of the two photon windows, which keeps exchange-symmetrized
    amplitudes transpose-symmetric as matrices.
    """
    if sigma_span <= 0.0:
        raise ValueError("sigma_span must be positive")
    if points_per_axis < 16:
        raise ValueError("points_per_axis must be at least 16")
    s1, s2 = photon1.sigma_omega, photon2.sigma_omega
    if s1 == 0.0 and s2 == 0.0:
        raise ValueError("cannot derive a grid extent: both photons have zero bandwidth")
    s1 = s1 or s2
    s2 = s2 or s1
    c1, c2 = photon1.center_omega, photon2.center_omega
    if shared_axes:
        lo = min(c1 - sigma_span * s1, c2 - sigma_span * s2)
        hi = max(c1 + sigma_span * s1, c2 + sigma_span * s2)
        axis = np.linspace(lo, hi, points_per_axis)
        return SpectralGrid(axis, axis.copy())
    axis1 = np.linspace(c1 - sigma_span * s1, c1 + sigma_span * s1, points_per_axis)
    axis2 = np.linspace(c2 - sigma_span * s2, c2 + sigma_span * s2, points_per_axis)
    return SpectralGrid(axis1, axis2)


@dataclass(frozen=True)
class JointSpectralAmplitude:
    """Complex amplitude tensor over a grid, keyed by polarization pair.

    The quadrature norm sum |phi|^2 d(omega1) d(omega2), summed over all
    polarization components, equals the declared ``weight``: 1/2 for each
    member of a two-source state, 1 standalone.
    """

    grid: SpectralGrid
    components: dict[tuple[str, str], np.ndarray]
    weight: float = 1.0
    source_label: str = "A"

    def __post_init__(self):
        if not self.components:
            raise ValueError("JSA needs at least one polarization component")
        for pair, amp in self.components.items():
            if pair[0] not in POLARIZATIONS or pair[1] not in POLARIZATIONS:
                raise ValueError(f"unknown polarization pair {pair!r}")
            if amp.shape != self.grid.shape:
                raise ValueError(f"component {pair!r} shape {amp.shape} != grid {self.grid.shape}")
        if self.weight <= 0.0:
            raise ValueError("weight must be positive")
        if abs(self.norm() - self.weight) > NORM_TOL:
            raise ValueError(
                f"quadrature norm {self.norm():.12g} does not match declared weight {self.weight:.12g}"
            )

    def norm(self) -> float:
        total = 0.0
        for amp in self.components.values():
            total += float(np.sum(np.abs(amp) ** 2))
        return total * self.grid.measure

    def polarization_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(self.components.keys())

    def single_component(self) -> tuple[tuple[str, str], np.ndarray]:
        if len(self.components) != 1:
            raise ValueError("operation requires a single polarization component")
        return next(iter(self.components.items()))

    def relabeled(self, source_label: str) -> "JointSpectralAmplitude":
        return replace(self, source_label=source_label)


@dataclass(frozen=True)
class SchmidtReport:
    """Schmidt number and the descending mode coefficients (summing to 1)."""

    schmidt_number: float
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        lam = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", lam)
        if np.any(np.diff(lam) > 0.0):
            raise ValueError("coefficients must be sorted descending")
        if abs(lam.sum() - 1.0) > 1e-9:
            raise ValueError("coefficients must sum to 1")
        if abs(self.schmidt_number - 1.0 / np.sum(lam**2)) > 1e-9 * self.schmidt_number:
            raise ValueError("schmidt_number inconsistent with coefficients")
        if self.schmidt_number < 1.0 - 1e-9:
            raise ValueError("schmidt_number must be >= 1")


def _coverage_check(grid: SpectralGrid, photon1: GaussianSpec, photon2: GaussianSpec) -> None:
    # The builders need at least 3 sigma of each photon marginal on its axis.
    for axis, spec, name in (
        (grid.omega1_axis, photon1, "photon1"),
        (grid.omega2_axis, photon2, "photon2"),
    ):
        if spec.is_flat:
            raise ValueError(f"{name} must have a finite bandwidth")
        lo = spec.center_omega - 3.0 * spec.sigma_omega
        hi = spec.center_omega + 3.0 * spec.sigma_omega
        if axis[0] > lo or axis[-1] < hi:
            raise ValueError(f"grid does not cover 3 sigma of the {name} marginal")


def _pump_consistency_warning(pump: GaussianSpec, photon1: GaussianSpec, photon2: GaussianSpec) -> None:
    if pump.is_flat:
        return
    mismatch = abs(pump.center_omega - photon1.center_omega - photon2.center_omega)
    if mismatch > 6.0 * pump.sigma_omega:
        warnings.warn(
            "pump center frequency is more than 6 pump sigma away from the "
            "photon frequency sum; the state has negligible amplitude",
            stacklevel=3,
        )


def _normalized(amp: np.ndarray, grid: SpectralGrid, weight: float) -> np.ndarray:
    norm = float(np.sum(np.abs(amp) ** 2)) * grid.measure
    if norm == 0.0:
        raise ValueError("amplitude is identically zero; cannot normalize")
    return amp * math.sqrt(weight / norm)


def _product_amplitude(
    pump: GaussianSpec, photon1: GaussianSpec, photon2: GaussianSpec, grid: SpectralGrid
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pump envelope on the frequency sum plus the two photon envelopes."""
    w1, w2 = grid.meshes()
    return pump.amplitude(w1 + w2), photon1.amplitude(w1), photon2.amplitude(w2)


def build_type1_jsa(
    pump: GaussianSpec,
    photon1: GaussianSpec,
    photon2: GaussianSpec,
    polarization: str = "TE",
    grid: SpectralGrid | None = None,
    weight: float = 0.5,
    source_label: str = "A",
    sigma_span: float = 4.0,
    points_per_axis: int = 128,
) -> JointSpectralAmplitude:
    """Co-polarized (Type I style) JSA: symmetrized Gaussian product.

    The amplitude is [zeta(w1, w2) + zeta(w2, w1)] / sqrt(2) with
    zeta = pump(w1 + w2) photon1(w1) photon2(w2), normalized to ``weight``.
    A flat pump (fwhm 0) yields a separable, spectrally uncorrelated state.
    """
    if polarization not in POLARIZATIONS:
        raise ValueError(f"unknown polarization {polarization!r}")
    if grid is None:
        grid = make_grid(photon1, photon2, sigma_span, points_per_axis)
    _coverage_check(grid, photon1, photon2)
    _pump_consistency_warning(pump, photon1, photon2)

    pump_env, p1_w1, p2_w2 = _product_amplitude(pump, photon1, photon2, grid)
    w1, w2 = grid.meshes()
    swapped = photon1.amplitude(w2) * photon2.amplitude(w1)
    amp = pump_env * (p1_w1 * p2_w2 + swapped) / math.sqrt(2.0)
    amp = _normalized(amp, grid, weight).astype(complex)
    return JointSpectralAmplitude(
        grid=grid,
        components={(polarization, polarization): amp},
        weight=weight,
        source_label=source_label,
    )


def build_cross_polarized_jsa(
    pump: GaussianSpec,
    photon1: GaussianSpec,
    photon2: GaussianSpec,
    grid: SpectralGrid | None = None,
    weight: float = 0.5,
    source_label: str = "A",
    sigma_span: float = 4.0,
    points_per_axis: int = 128,
) -> JointSpectralAmplitude:
    """Cross-polarized JSA: unsymmetrized product in the (TE, TM) slot.

    Photon 1 is TE, photon 2 is TM; no exchange symmetrization applies
    because the polarization tag already distinguishes the photons.
    """
    if grid is None:
        grid = make_grid(photon1, photon2, sigma_span, points_per_axis)
    _coverage_check(grid, photon1, photon2)
    _pump_consistency_warning(pump, photon1, photon2)
    pump_env, p1_w1, p2_w2 = _product_amplitude(pump, photon1, photon2, grid)
    amp = _normalized(pump_env * p1_w1 * p2_w2, grid, weight).astype(complex)
    return JointSpectralAmplitude(
        grid=grid, components={("TE", "TM"): amp}, weight=weight, source_label=source_label
    )


def schmidt_number(jsa: JointSpectralAmplitude) -> SchmidtReport:
    """Schmidt analysis of a single-component JSA via singular values.

    Singular values s_k of the amplitude matrix scaled by sqrt(measure)
    give mode coefficients lambda_k = s_k^2 / sum s^2; the Schmidt number
    is 1 / sum lambda_k^2 (1 for separable states).
    """
    _, amp = jsa.single_component()
    scaled = amp * math.sqrt(jsa.grid.measure)
    if not np.any(scaled):
        raise ValueError("all-zero amplitude has no Schmidt decomposition")
    s = np.linalg.svd(scaled, compute_uv=False)
    lam = s**2
    lam = lam / lam.sum()
    sn = 1.0 / float(np.sum(lam**2))
    return SchmidtReport(schmidt_number=sn, coefficients=lam)


def apply_delay_phase(jsa: JointSpectralAmplitude, tau: float) -> JointSpectralAmplitude:
    """Multiply every amplitude by exp(-i (omega1 + omega2) tau).

    Unit modulus, so the quadrature norm is preserved.
    """
    if tau == 0.0:
        return jsa
    w1, w2 = jsa.grid.meshes()
    phase = np.exp(-1j * (w1 + w2) * tau)
    shifted = {pair: amp * phase for pair, amp in jsa.components.items()}
    return replace(jsa, components=shifted)


def pump_fwhm_for_schmidt_number(
    target_sn: float,
    pump_center_wavelength: float,
    photon1: GaussianSpec,
    photon2: GaussianSpec,
    polarization: str = "TE",
    grid: SpectralGrid | None = None,
    sigma_span: float = 4.0,
    points_per_axis: int = 128,
    tol: float = 1e-3,
) -> float:
    """Invert the Schmidt number to a pump bandwidth by bisection.

    The Schmidt number decreases monotonically with pump bandwidth, from a
    grid-limited maximum (near-monochromatic pump) down to 1 (flat pump).
    ``target_sn = 1`` maps to the exact flat-pump sentinel 0. Targets above
    the grid-limited maximum are rejected with the achievable value.
    """
    if target_sn < 1.0:
        raise ValueError("target Schmidt number must be >= 1")
    if target_sn == 1.0:
        return 0.0
    if grid is None:
        grid = make_grid(photon1, photon2, sigma_span, points_per_axis)

    def sn_at(fwhm: float) -> float:
        pump = GaussianSpec(pump_center_wavelength, fwhm)
        jsa = build_type1_jsa(pump, photon1, photon2, polarization, grid, weight=1.0)
        return schmidt_number(jsa).schmidt_number

    scale = max(photon1.fwhm_bandwidth, photon2.fwhm_bandwidth)
    lo, hi = 1e-4 * scale, 1e2 * scale
    sn_lo = sn_at(lo)
    if target_sn > sn_lo - tol:
        raise ValueError(
            f"Schmidt number {target_sn:g} unreachable on this grid; "
            f"achievable maximum is about {sn_lo:.4g}"
        )
    while sn_at(hi) > target_sn:  # pragma: no cover - generous initial bracket
        hi *= 10.0
        if hi > 1e8 * scale:
            raise ValueError("failed to bracket the requested Schmidt number")

    log_fwhm = brentq(
        lambda x: sn_at(math.exp(x)) - target_sn,
        math.log(lo),
        math.log(hi),
        xtol=1e-12,
        rtol=1e-12,
    )
    fwhm = math.exp(log_fwhm)
    achieved = sn_at(fwhm)
    if abs(achieved - target_sn) > tol:
        raise ValueError(
            f"bisection landed at SN={achieved:.6g}, outside tolerance of target {target_sn:g}"
        )
    return fwhm
