"""Parameter-space maps over coupler and state attributes.

Each sweep evaluates the interference engine on a rectangular grid of two
dimensionless parameters and collects the layers P_S, P_S0, P_SI, P_B,
V_S, V_B. Undefined visibilities (singular demultiplexer points) are
stored as NaN and serialized as NA / null.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coupler import CouplerModel, from_dimensionless, eta_pair_coupler
from .interference import OutcomeReport, TwoSourceState, outcome_probabilities
from .spectra import (
    GaussianSpec,
    build_type1_jsa,
    make_grid,
    pump_fwhm_for_schmidt_number,
    schmidt_number,
)

__all__ = [
    "SweepGrid",
    "StateTemplate",
    "SchmidtSeries",
    "LAYER_NAMES",
    "DEFAULT_BIG_M",
    "sweep_dxi_mlambda",
    "sweep_bandwidth_mlambda",
    "sweep_schmidt",
    "sweep_eta_pair",
    "save_layer_csv",
    "load_layer_csv",
    "sweep_to_json_dict",
    "save_sweep_json",
]

LAYER_NAMES = ("P_S", "P_S0", "P_SI", "P_B", "V_S", "V_B")

#: Reference first-order dispersion used to factor the dimensionless
#: products M*Lambda and M*dlambda/lambda into a concrete coupler; results
#: depend only on the products.
DEFAULT_BIG_M = 16.335

#: Rendering floor for visibility layers. A finite photon bandwidth keeps
#: the classical denominator at a demultiplexer singularity at order
#: (M sigma/omega)^2 instead of 0, so sweep maps mark cells whose classical
#: probability falls below this as undefined; pointwise reports keep the
#: strict 1e-9 contract.
SINGULAR_FLOOR = 1e-4

FLOAT_FMT = "{:.9g}"


@dataclass(frozen=True)
class SweepGrid:
    """Rectangular result grid over two named dimensionless parameters."""

    x_name: str
    x_values: np.ndarray
    y_name: str
    y_values: np.ndarray
    layers: dict[str, np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "x_values", np.asarray(self.x_values, dtype=float))
        object.__setattr__(self, "y_values", np.asarray(self.y_values, dtype=float))
        expected = (self.y_values.size, self.x_values.size)
        for name, matrix in self.layers.items():
            if matrix.shape != expected:
                raise ValueError(f"layer {name!r} shape {matrix.shape} != {expected}")


@dataclass(frozen=True)
class StateTemplate:
    """Photon and pump bandwidths as fractions of the degeneracy wavelength.

    ``pump_fwhm_ratio`` None or 0 selects the flat pump (spectrally
    uncorrelated pairs). Numerics defaults favor sweep throughput; single
    reports use finer grids.
    """

    photon_fwhm_ratio: float
    pump_fwhm_ratio: float | None = None
    polarization: str = "TE"
    points_per_axis: int = 64
    sigma_span: float = 4.0

    def __post_init__(self):
        if self.photon_fwhm_ratio <= 0.0:
            raise ValueError("photon_fwhm_ratio must be positive")


def _symmetric_state(
    template: StateTemplate, lambda_deg: float, big_lambda: float, theta: float
) -> TwoSourceState:
    """Identical-source state with photon colors symmetric about lambda_deg."""
    if big_lambda >= 2.0:
        raise ValueError(
            f"dimensionless non-degeneracy {big_lambda:g} >= 2 gives a nonpositive wavelength"
        )
    lam1 = lambda_deg * (1.0 - big_lambda / 2.0)
    lam2 = lambda_deg * (1.0 + big_lambda / 2.0)
    fwhm = template.photon_fwhm_ratio * lambda_deg
    photon1 = GaussianSpec(lam1, fwhm)
    photon2 = GaussianSpec(lam2, fwhm)
    pump_center = 1.0 / (1.0 / lam1 + 1.0 / lam2)
    pump_fwhm = (template.pump_fwhm_ratio or 0.0) * lambda_deg
    pump = GaussianSpec(pump_center, pump_fwhm)
    grid = make_grid(photon1, photon2, template.sigma_span, template.points_per_axis)
    jsa = build_type1_jsa(pump, photon1, photon2, template.polarization, grid, weight=0.5)
    return TwoSourceState.from_identical(jsa, theta=theta)


def _layer_values(report: OutcomeReport) -> tuple[float, ...]:
    def vis(value, classical):
        if value is None or classical < SINGULAR_FLOOR:
            return np.nan
        return value

    return (
        report.ps_total,
        report.ps_classical,
        report.ps_interference,
        report.pb_total,
        vis(report.vis_s, report.ps_classical),
        vis(report.vis_b, report.pb_classical),
    )


def _run_cells(cells, evaluate, shape, workers: int) -> dict[str, np.ndarray]:
    """Evaluate (iy, ix, payload) cells into layer matrices, order-independent."""
    layers = {name: np.full(shape, np.nan) for name in LAYER_NAMES}

    def fill(cell):
        iy, ix, payload = cell
        values = _layer_values(evaluate(payload))
        for name, value in zip(LAYER_NAMES, values):
            layers[name][iy, ix] = value

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, cells))
    else:
        for cell in cells:
            fill(cell)
    return layers


def sweep_dxi_mlambda(
    template: StateTemplate,
    lambda_deg: float,
    theta: float,
    delta_xi_values,
    m_lambda_values,
    big_m_reference: float = DEFAULT_BIG_M,
    workers: int = 1,
) -> SweepGrid:
    """Map over the coupling offset and the dispersion-nondegeneracy product.

    Each row fixes M*Lambda through Lambda = (M*Lambda) / M_ref with photon
    colors symmetric about lambda_deg; each column builds a linear coupler
    from (delta_xi, M_ref).
    """
    x = np.asarray(delta_xi_values, dtype=float)
    y = np.asarray(m_lambda_values, dtype=float)
    states = [
        _symmetric_state(template, lambda_deg, m_lambda / big_m_reference, theta)
        for m_lambda in y
    ]
    couplers = [from_dimensionless(dxi, big_m_reference, lambda_deg) for dxi in x]

    cells = [(iy, ix, (iy, ix)) for iy in range(y.size) for ix in range(x.size)]

    def evaluate(payload):
        iy, ix = payload
        return outcome_probabilities(states[iy], couplers[ix])

    layers = _run_cells(cells, evaluate, (y.size, x.size), workers)
    return SweepGrid("delta_xi", x, "m_lambda", y, layers)


def sweep_bandwidth_mlambda(
    lambda_deg: float,
    theta: float,
    bandwidth_products,
    m_lambda_values,
    sn_mode: str = "flat-pump",
    pump_fwhm_ratio: float | None = None,
    big_m_reference: float = DEFAULT_BIG_M,
    polarization: str = "TE",
    points_per_axis: int = 64,
    sigma_span: float = 4.0,
    workers: int = 1,
) -> SweepGrid:
    """Map over M*dlambda/lambda_deg and M*Lambda at zero coupling offset.

    Both photons share the bandwidth implied by each x value. sn_mode
    'flat-pump' gives spectrally uncorrelated pairs; 'pump-fwhm' applies
    the supplied pump bandwidth ratio instead.
    """
    if sn_mode not in ("flat-pump", "pump-fwhm"):
        raise ValueError("sn_mode must be 'flat-pump' or 'pump-fwhm'")
    if sn_mode == "pump-fwhm" and not pump_fwhm_ratio:
        raise ValueError("pump-fwhm mode requires pump_fwhm_ratio")
    x = np.asarray(bandwidth_products, dtype=float)
    y = np.asarray(m_lambda_values, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("bandwidth products must be positive")
    coupler = from_dimensionless(0.0, big_m_reference, lambda_deg)
    pump_ratio = pump_fwhm_ratio if sn_mode == "pump-fwhm" else None

    cells = [(iy, ix, (float(y[iy]), float(x[ix]))) for iy in range(y.size) for ix in range(x.size)]

    def evaluate(payload):
        m_lambda, product = payload
        template = StateTemplate(
            photon_fwhm_ratio=product / big_m_reference,
            pump_fwhm_ratio=pump_ratio,
            polarization=polarization,
            points_per_axis=points_per_axis,
            sigma_span=sigma_span,
        )
        state = _symmetric_state(template, lambda_deg, m_lambda / big_m_reference, theta)
        return outcome_probabilities(state, coupler)

    layers = _run_cells(cells, evaluate, (y.size, x.size), workers)
    return SweepGrid("m_dlambda_over_lambda", x, "m_lambda", y, layers)


@dataclass(frozen=True)
class SchmidtSeries:
    """Separation probability versus Schmidt number at fixed bandwidth."""

    sn_target: np.ndarray
    sn_achieved: np.ndarray
    p_s: np.ndarray
    pump_fwhm: np.ndarray


def sweep_schmidt(
    lambda_deg: float,
    m_dl_over_l: float,
    sn_values,
    big_m_reference: float = DEFAULT_BIG_M,
    polarization: str = "TE",
    points_per_axis: int = 128,
    sigma_span: float = 4.0,
) -> SchmidtSeries:
    """P_S against spectral entanglement for degenerate co-polarized photons.

    Entanglement is set by narrowing the pump bandwidth at fixed photon
    bandwidth; each target Schmidt number is inverted numerically to a pump
    FWHM (flat pump for exactly 1). Unreachable targets raise with the
    grid's achievable maximum.
    """
    sn = np.asarray(sn_values, dtype=float)
    fwhm = (m_dl_over_l / big_m_reference) * lambda_deg
    photon = GaussianSpec(lambda_deg, fwhm)
    grid = make_grid(photon, photon, sigma_span, points_per_axis)
    coupler = from_dimensionless(0.0, big_m_reference, lambda_deg)
    pump_center = lambda_deg / 2.0

    p_s = np.empty_like(sn)
    achieved = np.empty_like(sn)
    pump_fwhms = np.empty_like(sn)
    for i, target in enumerate(sn):
        pump_fwhm = pump_fwhm_for_schmidt_number(
            float(target), pump_center, photon, photon, polarization, grid=grid
        )
        pump = GaussianSpec(pump_center, pump_fwhm)
        jsa = build_type1_jsa(pump, photon, photon, polarization, grid, weight=0.5)
        achieved[i] = schmidt_number(jsa).schmidt_number
        state = TwoSourceState.from_identical(jsa, theta=0.0)
        p_s[i] = outcome_probabilities(state, coupler).ps_total
        pump_fwhms[i] = pump_fwhm
    return SchmidtSeries(sn_target=sn, sn_achieved=achieved, p_s=p_s, pump_fwhm=pump_fwhms)


def sweep_eta_pair(
    eta1_values,
    eta2_values,
    theta: float,
    lambda_deg: float = 1550e-9,
    nondegeneracy: float = 0.05,
    photon_fwhm_ratio: float = 1e-5,
    polarization: str = "TE",
    points_per_axis: int = 48,
    sigma_span: float = 4.0,
    workers: int = 1,
) -> SweepGrid:
    """Map over the two photon-color splitting ratios directly.

    A two-segment coupler assigns eta1 to the short-wavelength photon and
    eta2 to the long-wavelength photon, bypassing any smooth wavelength
    parametrization; the narrowband state is shared by all grid points.
    """
    x = np.asarray(eta1_values, dtype=float)
    y = np.asarray(eta2_values, dtype=float)
    template = StateTemplate(
        photon_fwhm_ratio=photon_fwhm_ratio,
        polarization=polarization,
        points_per_axis=points_per_axis,
        sigma_span=sigma_span,
    )
    state = _symmetric_state(template, lambda_deg, nondegeneracy, theta)

    cells = [(iy, ix, (float(y[iy]), float(x[ix]))) for iy in range(y.size) for ix in range(x.size)]

    def evaluate(payload):
        eta2, eta1 = payload
        coupler = eta_pair_coupler(eta1, eta2, lambda_deg)
        return outcome_probabilities(state, coupler)

    layers = _run_cells(cells, evaluate, (y.size, x.size), workers)
    return SweepGrid("eta1", x, "eta2", y, layers)


def _fmt(value: float) -> str:
    if np.isnan(value):
        return "NA"
    return FLOAT_FMT.format(value)


def save_layer_csv(grid: SweepGrid, layer: str, path) -> None:
    """One layer as CSV: header comments, x values as columns, y as rows."""
    matrix = grid.layers[layer]
    lines = [f"# x={grid.x_name} y={grid.y_name} layer={layer}"]
    lines.append("y," + ",".join(FLOAT_FMT.format(v) for v in grid.x_values))
    for iy, y in enumerate(grid.y_values):
        row = ",".join(_fmt(v) for v in matrix[iy])
        lines.append(FLOAT_FMT.format(y) + "," + row)
    Path(path).write_text("\n".join(lines) + "\n")


def load_layer_csv(path) -> SweepGrid:
    """Parse a single-layer CSV back into a one-layer SweepGrid."""
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0]
    if not header.startswith("# "):
        raise ValueError("missing header comment line")
    meta = dict(item.split("=", 1) for item in header[2:].split())
    columns = lines[1].split(",")
    if columns[0] != "y":
        raise ValueError("missing x-value column header")
    x = np.array([float(v) for v in columns[1:]])
    y, rows = [], []
    for line in lines[2:]:
        cells = line.split(",")
        y.append(float(cells[0]))
        rows.append([np.nan if c == "NA" else float(c) for c in cells[1:]])
    return SweepGrid(
        x_name=meta["x"],
        x_values=x,
        y_name=meta["y"],
        y_values=np.array(y),
        layers={meta["layer"]: np.array(rows)},
    )


def _jsonable(value: float):
    if np.isnan(value):
        return None
    return float(FLOAT_FMT.format(value))


def sweep_to_json_dict(grid: SweepGrid) -> dict:
    """JSON-ready bundle: axes plus row-major layer arrays, NaN as null."""
    return {
        "x_name": grid.x_name,
        "x_values": [_jsonable(v) for v in grid.x_values],
        "y_name": grid.y_name,
        "y_values": [_jsonable(v) for v in grid.y_values],
        "layers": {
            name: [[_jsonable(v) for v in row] for row in matrix]
            for name, matrix in grid.layers.items()
        },
    }


def save_sweep_json(grid: SweepGrid, path) -> None:
    Path(path).write_text(json.dumps(sweep_to_json_dict(grid), indent=1) + "\n")
