"""Figure rendering for reports, sweeps and scans.

All figures are written to files (Agg backend, no display). Undefined
visibility cells render as blanks in the sweep maps.
"""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .interference import OutcomeReport, TauScanResult  # noqa: E402
from .sweeps import SweepGrid  # noqa: E402

__all__ = [
    "save_report_png",
    "save_sweep_layer_png",
    "save_tau_scan_png",
    "save_objective_png",
]


def save_report_png(report: OutcomeReport, path) -> None:
    """Bar chart of the four outcome probabilities with their splits."""
    outcomes = ("AA", "AB", "BA", "BB")
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    x = np.arange(len(outcomes))
    ax.bar(x - 0.2, [report.r0[o] for o in outcomes], width=0.4, label="classical")
    ax.bar(x + 0.2, [report.r[o] for o in outcomes], width=0.4, label="total")
    ax.set_xticks(x, outcomes)
    ax.set_ylabel("probability")
    ax.set_title(f"P_S = {report.ps_total:.4f}, P_B = {report.pb_total:.4f}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_layer_png(grid: SweepGrid, layer: str, path) -> None:
    """Heat map of one sweep layer; NaN (undefined) cells stay blank."""
    matrix = np.ma.masked_invalid(grid.layers[layer])
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    mesh = ax.pcolormesh(grid.x_values, grid.y_values, matrix, shading="nearest")
    fig.colorbar(mesh, ax=ax, label=layer)
    ax.set_xlabel(grid.x_name)
    ax.set_ylabel(grid.y_name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_tau_scan_png(result: TauScanResult, path) -> None:
    """Delay scan: envelope, classical baseline, and the series if present."""
    fig, ax = plt.subplots(figsize=(5.6, 3.6))
    tau_fs = result.tau / 1e-15
    if result.p_s is not None:
        ax.plot(tau_fs, result.p_s, lw=0.8, label="P_S")
    ax.plot(tau_fs, result.p_s_classical + result.envelope, "k--", lw=1.0, label="envelope")
    ax.plot(tau_fs, result.p_s_classical - result.envelope, "k--", lw=1.0)
    ax.axhline(result.p_s_classical, color="gray", lw=0.8, label="classical")
    ax.set_xlabel("tau (fs)")
    ax.set_ylabel("separation probability")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_objective_png(shifts, scores, best_shift: float, path) -> None:
    """Compensation objective P_S versus 50:50-wavelength shift."""
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.plot(np.asarray(shifts) / 1e-9, scores, "o-", ms=3)
    ax.axvline(best_shift / 1e-9, color="C3", lw=1.0, label="optimum")
    ax.set_xlabel("50:50 wavelength shift (nm)")
    ax.set_ylabel("P_S")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
