"""Two-source interference engine: outcome probabilities and visibilities.

Two coherently pumped pair sources A and B feed the two inputs of a
directional coupler. For each output assignment pq in {AA, AB, BA, BB} the
detection probability splits into a classical part R0_pq and an
interference part RI_pq:

    R_pq = R0_pq + cos(pi delta_pq) RI_pq

    R0_pq = sum_ab integral |Phi_A|^2 + |Phi_B|^2
    RI_pq = sum_ab integral 2 Re{ e^{-i theta} Phi_B conj(Phi_A)
                                   e^{-i (w1 + w2) tau} }
    Phi_j(w1, w2) = phi_j(w1, w2) G_j->p(w1) G_j->q(w2)

with the real coupler response G_j->q = cos(kL) for j == q and sin(kL)
otherwise. Anti-bunched (separated) outcomes sum AB + BA; bunched outcomes
sum AA + BB and carry the opposite interference sign.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .coupler import CouplerModel
from .spectra import JointSpectralAmplitude

__all__ = [
    "TwoSourceState",
    "OutcomeReport",
    "TauScanResult",
    "outcome_probabilities",
    "theta_scan",
    "tau_scan",
    "narrowband_oracle",
    "NarrowbandPoint",
    "constant_eta_vb",
    "hom_interference_term",
]

OUTCOMES = ("AA", "AB", "BA", "BB")
SEPARATED = ("AB", "BA")
BUNCHED = ("AA", "BB")

#: Classical probabilities below this are treated as the singular
#: wavelength-demultiplexer point, where the visibility is undefined.
VISIBILITY_FLOOR = 1e-9


@dataclass(frozen=True)
class TwoSourceState:
    """A pair of same-grid JSAs plus the relative phase theta and delay tau.

    The combined quadrature norm over both sources must be 1; builders
    normalize each source's JSA to weight 1/2 for this purpose.
    """

    jsa_a: JointSpectralAmplitude
    jsa_b: JointSpectralAmplitude
    theta: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        if not self.jsa_a.grid.same_as(self.jsa_b.grid):
            raise ValueError("source JSAs must share the same spectral grid")
        total = self.jsa_a.norm() + self.jsa_b.norm()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"combined state norm {total:.12g} != 1")

    @classmethod
    def from_identical(
        cls, jsa: JointSpectralAmplitude, theta: float = 0.0, tau: float = 0.0
    ) -> "TwoSourceState":
        """Indistinguishable sources: the same JSA (weight 1/2) on both inputs."""
        if abs(jsa.weight - 0.5) > 1e-12:
            raise ValueError("per-source JSA weight must be 1/2 for a two-source state")
        return cls(jsa_a=jsa.relabeled("A"), jsa_b=jsa.relabeled("B"), theta=theta, tau=tau)

    def polarization_pairs(self) -> tuple[tuple[str, str], ...]:
        pairs = dict.fromkeys(self.jsa_a.polarization_pairs())
        pairs.update(dict.fromkeys(self.jsa_b.polarization_pairs()))
        return tuple(pairs)


@dataclass(frozen=True)
class OutcomeReport:
    """All outcome probabilities with their classical/interference split.

    ``vis_s`` and ``vis_b`` are None at singular points where the
    corresponding classical probability vanishes. ``visibilities_ideal``
    is True only for tau = 0 reports; at nonzero delay the same ratios are
    reported but flagged as non-ideal.
    """

    r0: dict[str, float]
    ri: dict[str, float]
    r: dict[str, float]
    ps_total: float
    ps_classical: float
    ps_interference: float
    pb_total: float
    pb_classical: float
    pb_interference: float
    vis_s: float | None
    vis_b: float | None
    visibilities_ideal: bool = True
    theta: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        total = sum(self.r.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"outcome probabilities sum to {total:.12g}, not 1")
        if abs(self.ps_total + self.pb_total - 1.0) > 1e-9:
            raise ValueError("separated and bunched probabilities must sum to 1")
        if abs(abs(self.ps_interference) - abs(self.pb_interference)) > 1e-9:
            raise ValueError("|interference| must balance between outcomes")
        if abs(self.ps_classical + self.pb_classical - 1.0) > 1e-9:
            raise ValueError("classical probabilities must sum to 1")


@dataclass(frozen=True)
class TauScanResult:
    """Delay scan output: probability series plus interference envelope.

    In envelope-only mode the pointwise series are omitted (the coarse
    sampling would alias the carrier) and only the envelope is reported.
    ``envelope_fwhm`` is None when the envelope does not fall to half its
    maximum on both sides within the scanned range.
    """

    tau: np.ndarray
    p_s: np.ndarray | None
    p_si: np.ndarray | None
    envelope: np.ndarray
    p_s_classical: float
    envelope_fwhm: float | None
    envelope_only: bool = field(default=False)


def _pair_fields(state: TwoSourceState, coupler: CouplerModel):
    """Classical probabilities and complex interference fields per outcome.

    Returns (r0, fields) where fields[pq] is the polarization-summed
    product Phi_B conj(Phi_A) on the grid, before the theta and tau phase
    factors and before the quadrature measure.
    """
    grid = state.jsa_a.grid
    measure = grid.measure
    shape = grid.shape
    r0 = {pq: 0.0 for pq in OUTCOMES}
    fields = {pq: np.zeros(shape, dtype=complex) for pq in OUTCOMES}

    g_cache: dict[tuple[str, int], tuple[np.ndarray, np.ndarray]] = {}

    def g_vectors(pol: str, axis_index: int) -> tuple[np.ndarray, np.ndarray]:
        key = (pol, axis_index)
        if key not in g_cache:
            axis = grid.omega1_axis if axis_index == 0 else grid.omega2_axis
            cos_vec = np.asarray(coupler.g_factor(pol, axis, "A", "A"), dtype=float)
            sin_vec = np.asarray(coupler.g_factor(pol, axis, "A", "B"), dtype=float)
            g_cache[key] = (cos_vec, sin_vec)
        return g_cache[key]

    for alpha, beta in state.polarization_pairs():
        phi_a = state.jsa_a.components.get((alpha, beta))
        phi_b = state.jsa_b.components.get((alpha, beta))
        cos1, sin1 = g_vectors(alpha, 0)
        cos2, sin2 = g_vectors(beta, 1)
        for pq in OUTCOMES:
            p, q = pq
            # G_A->p is cos for p == A; G_B->p is the complementary case.
            ga1 = cos1 if p == "A" else sin1
            ga2 = cos2 if q == "A" else sin2
            gb1 = sin1 if p == "A" else cos1
            gb2 = sin2 if q == "A" else cos2
            big_a = phi_a * ga1[:, None] * ga2[None, :] if phi_a is not None else None
            big_b = phi_b * gb1[:, None] * gb2[None, :] if phi_b is not None else None
            if big_a is not None:
                r0[pq] += float(np.sum(np.abs(big_a) ** 2)) * measure
            if big_b is not None:
                r0[pq] += float(np.sum(np.abs(big_b) ** 2)) * measure
            if big_a is not None and big_b is not None:
                fields[pq] += big_b * np.conj(big_a)
    return r0, fields


def _interference_integrals(fields, grid, tau: float) -> dict[str, complex]:
    """Quadrature of each field against the delay phase exp(-i (w1 + w2) tau)."""
    u = np.exp(-1j * grid.omega1_axis * tau)
    v = np.exp(-1j * grid.omega2_axis * tau)
    return {pq: complex(u @ field @ v) * grid.measure for pq, field in fields.items()}


def _visibility(interference: float, classical: float) -> float | None:
    if classical < VISIBILITY_FLOOR:
        return None
    return abs(interference) / classical


def _assemble_report(r0, integrals, theta: float, tau: float) -> OutcomeReport:
    phase = cmath.exp(-1j * theta)
    ri = {pq: 2.0 * (phase * integrals[pq]).real for pq in OUTCOMES}
    r = {}
    for pq in OUTCOMES:
        sign = -1.0 if pq in BUNCHED else 1.0
        r[pq] = r0[pq] + sign * ri[pq]
    ps_classical = r0["AB"] + r0["BA"]
    pb_classical = r0["AA"] + r0["BB"]
    ps_interference = ri["AB"] + ri["BA"]
    pb_interference = -(ri["AA"] + ri["BB"])
    return OutcomeReport(
        r0=r0,
        ri=ri,
        r=r,
        ps_total=ps_classical + ps_interference,
        ps_classical=ps_classical,
        ps_interference=ps_interference,
        pb_total=pb_classical + pb_interference,
        pb_classical=pb_classical,
        pb_interference=pb_interference,
        vis_s=_visibility(ps_interference, ps_classical),
        vis_b=_visibility(pb_interference, pb_classical),
        visibilities_ideal=(tau == 0.0),
        theta=theta,
        tau=tau,
    )


def outcome_probabilities(state: TwoSourceState, coupler: CouplerModel) -> OutcomeReport:
    """Evaluate all outcome probabilities for a state evolving through a coupler.

    Every polarization present in either source JSA must have a kappa model
    in the coupler; the grids of both sources must agree.
    """
    r0, fields = _pair_fields(state, coupler)
    integrals = _interference_integrals(fields, state.jsa_a.grid, state.tau)
    return _assemble_report(r0, integrals, state.theta, state.tau)


def theta_scan(
    state: TwoSourceState, coupler: CouplerModel, theta_values
) -> list[OutcomeReport]:
    """Outcome reports over a sweep of the relative source phase.

    The classical parts are theta-independent and computed once; only the
    interference assembly varies along the scan.
    """
    r0, fields = _pair_fields(state, coupler)
    integrals = _interference_integrals(fields, state.jsa_a.grid, state.tau)
    return [_assemble_report(r0, integrals, float(t), state.tau) for t in theta_values]


def _envelope_fwhm(tau: np.ndarray, envelope: np.ndarray) -> float | None:
    peak_index = int(np.argmax(envelope))
    peak = envelope[peak_index]
    if peak <= 0.0:
        return None
    half = 0.5 * peak

    def crossing(indices) -> float | None:
        for i in indices:
            lo, hi = envelope[i], envelope[i + 1]
            if (lo - half) * (hi - half) <= 0.0 and lo != hi:
                frac = (half - lo) / (hi - lo)
                return float(tau[i] + frac * (tau[i + 1] - tau[i]))
        return None

    left = crossing(range(peak_index - 1, -1, -1))
    right = crossing(range(peak_index, tau.size - 1))
    if left is None or right is None:
        return None
    return right - left


def tau_scan(
    state: TwoSourceState,
    coupler: CouplerModel,
    tau_values,
    envelope_only: bool = False,
) -> TauScanResult:
    """Separation probability versus inter-source delay, with envelope.

    The interference oscillates at the summed optical frequency, so the
    pointwise series requires a step below pi / (2 max(w1 + w2)); coarser
    sampling is rejected unless ``envelope_only`` is set, in which case only
    the (slowly varying) interference envelope 2 |integral| is reported.
    """
    tau = np.asarray(tau_values, dtype=float)
    if tau.ndim != 1 or tau.size < 2:
        raise ValueError("tau_values must be a 1D array with at least 2 points")
    if np.any(np.diff(tau) <= 0.0):
        raise ValueError("tau_values must be strictly increasing")
    grid = state.jsa_a.grid
    if not envelope_only:
        omega_sum_max = float(grid.omega1_axis[-1] + grid.omega2_axis[-1])
        nyquist = math.pi / (2.0 * omega_sum_max)
        if float(np.max(np.diff(tau))) > nyquist:
            raise ValueError(
                f"tau step aliases the interference oscillation (limit "
                f"{nyquist:.3e} s); refine the step or set envelope_only"
            )

    r0, fields = _pair_fields(state, coupler)
    field_s = fields["AB"] + fields["BA"]
    ps_classical = r0["AB"] + r0["BA"]

    u = np.exp(-1j * np.outer(tau, grid.omega1_axis))
    v = np.exp(-1j * np.outer(tau, grid.omega2_axis))
    integral_s = np.einsum("ti,ij,tj->t", u, field_s, v) * grid.measure

    envelope = 2.0 * np.abs(integral_s)
    fwhm = _envelope_fwhm(tau, envelope)
    if envelope_only:
        return TauScanResult(
            tau=tau,
            p_s=None,
            p_si=None,
            envelope=envelope,
            p_s_classical=ps_classical,
            envelope_fwhm=fwhm,
            envelope_only=True,
        )
    p_si = 2.0 * (cmath.exp(-1j * state.theta) * integral_s).real
    return TauScanResult(
        tau=tau,
        p_s=ps_classical + p_si,
        p_si=p_si,
        envelope=envelope,
        p_s_classical=ps_classical,
        envelope_fwhm=fwhm,
        envelope_only=False,
    )


@dataclass(frozen=True)
class NarrowbandPoint:
    """Closed-form separation probabilities in the narrowband limit."""

    p_s: float
    p_s0: float
    p_si: float
    v_s: float | None
    v_b: float | None


def narrowband_oracle(delta_xi: float, m_lambda: float, theta: float) -> NarrowbandPoint:
    """Analytic limit for two monochromatic colors through a linear coupler.

    The two photon colors see coupling phases xi_{1,2} = pi/4 + delta_xi
    -+ m_lambda / 2, giving

        P_S0 = cos^2 xi1 sin^2 xi2 + sin^2 xi1 cos^2 xi2
        P_SI = cos(theta) sin(2 xi1) sin(2 xi2) / 2

    This serves as an independent reference for the quadrature engine.
    """
    xi1 = math.pi / 4.0 + delta_xi - m_lambda / 2.0
    xi2 = math.pi / 4.0 + delta_xi + m_lambda / 2.0
    p_s0 = (
        math.cos(xi1) ** 2 * math.sin(xi2) ** 2
        + math.sin(xi1) ** 2 * math.cos(xi2) ** 2
    )
    p_si = math.cos(theta) * 0.5 * math.sin(2.0 * xi1) * math.sin(2.0 * xi2)
    p_b0 = 1.0 - p_s0
    return NarrowbandPoint(
        p_s=p_s0 + p_si,
        p_s0=p_s0,
        p_si=p_si,
        v_s=_visibility(p_si, p_s0),
        v_b=_visibility(p_si, p_b0),
    )


def constant_eta_vb(eta: float) -> float:
    """Bunched-outcome visibility 2 eta (1 - eta) / [eta^2 + (1 - eta)^2]."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    return 2.0 * eta * (1.0 - eta) / (eta**2 + (1.0 - eta) ** 2)


def hom_interference_term(jsa: JointSpectralAmplitude, eta: float, tau: float) -> float:
    """Interference term of ordinary (time-forward) two-photon coalescence.

    Evaluates 2 eta (1 - eta) Re{ integral phi(w1, w2) conj(phi(w2, w1))
    e^{-i (w2 - w1) tau} } normalized by the JSA norm, so an
    exchange-symmetric state at tau = 0 returns the full classical
    cross-path weight 2 eta (1 - eta) (unit visibility). Exchange asymmetry
    or antisymmetry reduces or negates the term; the sign convention makes
    a positive term a coincidence dip.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    _, amp = jsa.single_component()
    if not jsa.grid.shares_axes:
        raise ValueError("exchange overlap requires a grid with shared frequency axes")
    w1, w2 = jsa.grid.meshes()
    integrand = amp * np.conj(amp.T) * np.exp(-1j * (w2 - w1) * tau)
    overlap = complex(np.sum(integrand)) * jsa.grid.measure / jsa.norm()
    return 2.0 * eta * (1.0 - eta) * overlap.real
