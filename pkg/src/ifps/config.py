"""Run configuration: JSON ingestion, validation and object assembly.

All physical quantities in the config carry unit-suffixed keys (_nm, _fs,
_per_m); internal objects are SI. Invalid configs raise ConfigError with a
path- or line-anchored message.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .coupler import (
    CouplerModel,
    LinearKappa,
    PolynomialKappa,
    TabulatedKappa,
    from_dimensionless,
)
from .interference import TwoSourceState
from .spectra import (
    GaussianSpec,
    build_cross_polarized_jsa,
    build_type1_jsa,
    make_grid,
    pump_fwhm_for_schmidt_number,
)
from .units import FS, NM

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class StateConfig:
    photon1: GaussianSpec
    photon2: GaussianSpec
    pump: GaussianSpec
    polarization: str  # "TE", "TM" or "cross"
    sn_target: float | None
    lambda_deg: float


@dataclass(frozen=True)
class NumericsConfig:
    points_per_axis: int = 128
    sigma_span: float = 4.0


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    format: str = "both"  # csv | json | both


@dataclass(frozen=True)
class RunConfig:
    state: StateConfig
    coupler: CouplerModel
    theta: float
    tau: float
    numerics: NumericsConfig
    output: OutputConfig

    def build_state(self) -> TwoSourceState:
        """Assemble the two-source interference state described by the config."""
        st = self.state
        pump = st.pump
        if st.sn_target is not None:
            grid = make_grid(
                st.photon1, st.photon2, self.numerics.sigma_span, self.numerics.points_per_axis
            )
            fwhm = pump_fwhm_for_schmidt_number(
                st.sn_target,
                st.pump.center_wavelength,
                st.photon1,
                st.photon2,
                st.polarization if st.polarization != "cross" else "TE",
                grid=grid,
            )
            pump = GaussianSpec(st.pump.center_wavelength, fwhm)
        build = build_cross_polarized_jsa if st.polarization == "cross" else build_type1_jsa
        kwargs = {} if st.polarization == "cross" else {"polarization": st.polarization}
        jsa = build(
            pump,
            st.photon1,
            st.photon2,
            weight=0.5,
            sigma_span=self.numerics.sigma_span,
            points_per_axis=self.numerics.points_per_axis,
            **kwargs,
        )
        self._check_coupler_covers(jsa)
        return TwoSourceState.from_identical(jsa, theta=self.theta, tau=self.tau)

    def _check_coupler_covers(self, jsa) -> None:
        needed = {pol for pair in jsa.polarization_pairs() for pol in pair}
        missing = needed - set(self.coupler.polarizations())
        if missing:
            raise ConfigError(
                f"coupler.kappa: missing polarization block(s) {sorted(missing)} "
                "required by the state"
            )


def _require(block: dict, key: str, path: str):
    if key not in block:
        raise ConfigError(f"{path}: missing required key {key!r}")
    return block[key]


def _number(block: dict, key: str, path: str) -> float:
    value = _require(block, key, path)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _gaussian(block: dict, path: str) -> GaussianSpec:
    center = _number(block, "center_nm", path)
    fwhm = _number(block, "fwhm_nm", path)
    if center <= 0.0:
        raise ConfigError(f"{path}.center_nm: must be positive")
    if fwhm < 0.0:
        raise ConfigError(f"{path}.fwhm_nm: must be nonnegative")
    return GaussianSpec(center * NM, fwhm * NM)


def _parse_state(block: dict) -> StateConfig:
    path = "state"
    has_centers = "photon1" in block and "photon2" in block
    has_nondeg = "lambda_deg_nm" in block
    if has_centers == has_nondeg:
        raise ConfigError(
            f"{path}: specify exactly one of photon1/photon2 or lambda_deg_nm + nondegeneracy_nm"
        )
    if has_centers:
        photon1 = _gaussian(_require(block, "photon1", path), f"{path}.photon1")
        photon2 = _gaussian(_require(block, "photon2", path), f"{path}.photon2")
        lambda_deg = 2.0 / (1.0 / photon1.center_wavelength + 1.0 / photon2.center_wavelength)
    else:
        lambda_deg = _number(block, "lambda_deg_nm", path) * NM
        nondeg = _number(block, "nondegeneracy_nm", path) * NM
        fwhm = _number(block, "photon_fwhm_nm", path) * NM
        if lambda_deg <= 0.0:
            raise ConfigError(f"{path}.lambda_deg_nm: must be positive")
        photon1 = GaussianSpec(lambda_deg - nondeg / 2.0, fwhm)
        photon2 = GaussianSpec(lambda_deg + nondeg / 2.0, fwhm)

    if "pump" in block:
        pump = _gaussian(block["pump"], f"{path}.pump")
    else:
        # Energy-conserving center, flat envelope.
        center = 1.0 / (1.0 / photon1.center_wavelength + 1.0 / photon2.center_wavelength)
        pump = GaussianSpec(center, 0.0)

    polarization = block.get("polarization", "TE")
    if polarization not in ("TE", "TM", "cross"):
        raise ConfigError(f"{path}.polarization: must be 'TE', 'TM' or 'cross'")

    sn_target = block.get("sn_target")
    if sn_target is not None:
        if not isinstance(sn_target, (int, float)) or isinstance(sn_target, bool):
            raise ConfigError(f"{path}.sn_target: expected a number")
        if sn_target < 1.0:
            raise ConfigError(f"{path}.sn_target: must be >= 1")
        sn_target = float(sn_target)

    return StateConfig(
        photon1=photon1,
        photon2=photon2,
        pump=pump,
        polarization=polarization,
        sn_target=sn_target,
        lambda_deg=lambda_deg,
    )


def _parse_kappa_model(block: dict, path: str):
    kind = _require(block, "type", path)
    if kind == "linear":
        return LinearKappa(
            slope=_number(block, "slope_per_m2", path),
            intercept=_number(block, "intercept_per_m", path),
        )
    if kind == "polynomial":
        coeffs = _require(block, "coefficients", path)
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError(f"{path}.coefficients: expected a nonempty list")
        return PolynomialKappa(tuple(float(c) for c in coeffs))
    if kind == "tabulated":
        lam = _require(block, "wavelengths_nm", path)
        val = _require(block, "kappa_per_m", path)
        if not isinstance(lam, list) or not isinstance(val, list) or len(lam) != len(val):
            raise ConfigError(f"{path}: wavelengths_nm and kappa_per_m must be equal-length lists")
        return TabulatedKappa(
            wavelengths=[v * NM for v in lam],
            values=[float(v) for v in val],
        )
    raise ConfigError(f"{path}.type: unknown kappa model {kind!r}")


def _parse_coupler(block: dict) -> CouplerModel:
    path = "coupler"
    if "dimensionless" in block:
        lambda_deg = _number(block, "lambda_deg_nm", path) * NM
        per_pol = _require(block, "dimensionless", path)
        if not isinstance(per_pol, dict) or not per_pol:
            raise ConfigError(f"{path}.dimensionless: expected per-polarization blocks")
        kappa = {}
        for pol, sub in per_pol.items():
            if pol not in ("TE", "TM"):
                raise ConfigError(f"{path}.dimensionless: unknown polarization {pol!r}")
            sub_path = f"{path}.dimensionless.{pol}"
            model = from_dimensionless(
                _number(sub, "delta_xi", sub_path),
                _number(sub, "M", sub_path),
                lambda_deg,
                polarizations=(pol,),
            )
            kappa[pol] = model.kappa[pol]
        return CouplerModel(length=1.0, kappa=kappa)

    length = _number(block, "L_m", path)
    if length <= 0.0:
        raise ConfigError(f"{path}.L_m: must be positive")
    kappa_block = _require(block, "kappa", path)
    if not isinstance(kappa_block, dict) or not kappa_block:
        raise ConfigError(f"{path}.kappa: expected per-polarization blocks")
    kappa = {}
    for pol, sub in kappa_block.items():
        if pol not in ("TE", "TM"):
            raise ConfigError(f"{path}.kappa: unknown polarization {pol!r}")
        kappa[pol] = _parse_kappa_model(sub, f"{path}.kappa.{pol}")
    return CouplerModel(length=length, kappa=kappa)


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    state = _parse_state(_require(data, "state", "config"))
    coupler = _parse_coupler(_require(data, "coupler", "config"))

    evolution = data.get("evolution", {})
    theta = float(evolution.get("theta", 0.0))
    tau = float(evolution.get("tau_fs", 0.0)) * FS

    numerics_block = data.get("numerics", {})
    points = int(numerics_block.get("points_per_axis", 128))
    span = float(numerics_block.get("sigma_span", 4.0))
    if points < 16:
        raise ConfigError("numerics.points_per_axis: must be at least 16")
    if span <= 0.0:
        raise ConfigError("numerics.sigma_span: must be positive")
    numerics = NumericsConfig(points_per_axis=points, sigma_span=span)

    output_block = data.get("output", {})
    fmt = output_block.get("format", "both")
    if fmt not in ("csv", "json", "both"):
        raise ConfigError("output.format: must be 'csv', 'json' or 'both'")
    output = OutputConfig(directory=output_block.get("dir", "out"), format=fmt)

    config = RunConfig(
        state=state, coupler=coupler, theta=theta, tau=tau, numerics=numerics, output=output
    )
    # Validate polarization coverage up front so errors name the block.
    needed = {"TE", "TM"} if state.polarization == "cross" else {state.polarization}
    missing = needed - set(coupler.polarizations())
    if missing:
        raise ConfigError(
            f"coupler: missing kappa block for polarization(s) {sorted(missing)} "
            f"required by state.polarization={state.polarization!r}"
        )
    return config


def load_config(path) -> RunConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from None
    try:
        return parse_config(data)
    except ConfigError as err:
        raise ConfigError(f"{path}: {err}") from None
