"""Deterministic photon-pair separation in dispersive integrated couplers.

Simulation library and CLI for two-photon anti-coalescence through a
directional coupler: outcome probabilities and interference visibilities
for arbitrary joint spectral amplitudes, dimensionless coupler
parametrization, parameter-space sweeps, and 50:50-wavelength
compensation.
"""

from .compensation import (
    CompensationResult,
    TuningCurvePoint,
    central_wavelengths,
    nondegeneracy_scan,
    optimize_5050_shift,
)
from .coupler import (
    CouplerModel,
    DimensionlessParams,
    LinearKappa,
    PiecewiseConstantKappa,
    PolynomialKappa,
    TabulatedKappa,
    eta_pair_coupler,
    from_dimensionless,
)
from .interference import (
    NarrowbandPoint,
    OutcomeReport,
    TauScanResult,
    TwoSourceState,
    constant_eta_vb,
    hom_interference_term,
    narrowband_oracle,
    outcome_probabilities,
    tau_scan,
    theta_scan,
)
from .spectra import (
    GaussianSpec,
    JointSpectralAmplitude,
    SchmidtReport,
    SpectralGrid,
    apply_delay_phase,
    build_cross_polarized_jsa,
    build_type1_jsa,
    make_grid,
    pump_fwhm_for_schmidt_number,
    schmidt_number,
)
from .sweeps import (
    SchmidtSeries,
    StateTemplate,
    SweepGrid,
    sweep_bandwidth_mlambda,
    sweep_dxi_mlambda,
    sweep_eta_pair,
    sweep_schmidt,
)

__version__ = "0.1.0"

__all__ = [
    "CompensationResult",
    "TuningCurvePoint",
    "central_wavelengths",
    "nondegeneracy_scan",
    "optimize_5050_shift",
    "CouplerModel",
    "DimensionlessParams",
    "LinearKappa",
    "PiecewiseConstantKappa",
    "PolynomialKappa",
    "TabulatedKappa",
    "eta_pair_coupler",
    "from_dimensionless",
    "NarrowbandPoint",
    "OutcomeReport",
    "TauScanResult",
    "TwoSourceState",
    "constant_eta_vb",
    "hom_interference_term",
    "narrowband_oracle",
    "outcome_probabilities",
    "tau_scan",
    "theta_scan",
    "GaussianSpec",
    "JointSpectralAmplitude",
    "SchmidtReport",
    "SpectralGrid",
    "apply_delay_phase",
    "build_cross_polarized_jsa",
    "build_type1_jsa",
    "make_grid",
    "pump_fwhm_for_schmidt_number",
    "schmidt_number",
    "SchmidtSeries",
    "StateTemplate",
    "SweepGrid",
    "sweep_bandwidth_mlambda",
    "sweep_dxi_mlambda",
    "sweep_eta_pair",
    "sweep_schmidt",
    "__version__",
]
