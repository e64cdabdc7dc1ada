"""Static figures rendered from simulation traces.

All functions take a SimTrace (or two) and write a PNG. Traces are
decimated to a plot-friendly sample count first; at a 4 ms step a
10-minute run holds 150k samples, far beyond screen resolution.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .lq import SWITCH_HIGH_WIND, SWITCH_LOW_WIND
from .sim import SimTrace

_MAX_POINTS = 6000


def _decimate(trace: SimTrace) -> SimTrace:
    stride = max(1, trace.n // _MAX_POINTS)
    if stride == 1:
        return trace
    sliced = {
        name: getattr(trace, name)[::stride]
        for name in (
            "t_s",
            "wind_mps",
            "p_demand_w",
            "omega_radps",
            "pitch_deg",
            "torque_nm",
            "p_e_w",
            "omega_ref_radps",
            "pitch_ref_deg",
            "torque_ref_nm",
            "gain_idx",
        )
    }
    return SimTrace(**sliced)


def plot_power_tracking(trace: SimTrace, path) -> None:
    """Wind, electrical power against demand, and speed against its
    reference, stacked on a shared time axis."""
    tr = _decimate(trace)
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(9, 7))
    axes[0].plot(tr.t_s, tr.wind_mps, color="tab:gray", lw=0.8)
    axes[0].set_ylabel("wind [m/s]")
    axes[1].plot(tr.t_s, tr.p_demand_w / 1e6, "k--", lw=1.0, label="demand")
    axes[1].plot(tr.t_s, tr.p_e_w / 1e6, color="tab:blue", lw=0.8, label="electrical")
    axes[1].set_ylabel("power [MW]")
    axes[1].legend(loc="best", fontsize=8)
    axes[2].plot(tr.t_s, tr.omega_ref_radps, "k--", lw=1.0, label="reference")
    axes[2].plot(tr.t_s, tr.omega_radps, color="tab:orange", lw=0.8, label="generator")
    axes[2].set_ylabel("speed [rad/s]")
    axes[2].set_xlabel("time [s]")
    axes[2].legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_reference_tracking(trace: SimTrace, path) -> None:
    """Pitch and torque commands against their references."""
    tr = _decimate(trace)
    fig, axes = plt.subplots(2, 1, sharex=True, figsize=(9, 5.5))
    axes[0].plot(tr.t_s, tr.pitch_ref_deg, "k--", lw=1.0, label="reference")
    axes[0].plot(tr.t_s, tr.pitch_deg, color="tab:green", lw=0.8, label="command")
    axes[0].set_ylabel("pitch [deg]")
    axes[0].legend(loc="best", fontsize=8)
    axes[1].plot(tr.t_s, tr.torque_ref_nm / 1e3, "k--", lw=1.0, label="reference")
    axes[1].plot(tr.t_s, tr.torque_nm / 1e3, color="tab:red", lw=0.8, label="command")
    axes[1].set_ylabel("torque [kN m]")
    axes[1].set_xlabel("time [s]")
    axes[1].legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_switching(trace: SimTrace, path) -> None:
    """Wind against the hysteresis thresholds and the active design."""
    tr = _decimate(trace)
    fig, axes = plt.subplots(2, 1, sharex=True, figsize=(9, 5))
    axes[0].plot(tr.t_s, tr.wind_mps, color="tab:gray", lw=0.8)
    axes[0].axhline(SWITCH_LOW_WIND, color="tab:blue", ls=":", lw=1.0, label="low threshold")
    axes[0].axhline(SWITCH_HIGH_WIND, color="tab:red", ls=":", lw=1.0, label="high threshold")
    axes[0].set_ylabel("wind [m/s]")
    axes[0].legend(loc="best", fontsize=8)
    axes[1].step(tr.t_s, tr.gain_idx, where="post", color="tab:purple", lw=1.0)
    axes[1].set_ylabel("active design")
    axes[1].set_yticks([0, 1])
    axes[1].set_ylim(-0.2, 1.2)
    axes[1].set_xlabel("time [s]")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_comparison(baseline: SimTrace, lq: SimTrace, path) -> None:
    """Overlay both controllers on the same wind and demand."""
    tb = _decimate(baseline)
    tl = _decimate(lq)
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(9, 7))
    axes[0].plot(tb.t_s, tb.p_demand_w / 1e6, "k--", lw=1.0, label="demand")
    axes[0].plot(tb.t_s, tb.p_e_w / 1e6, color="tab:blue", lw=0.8, label="baseline")
    axes[0].plot(tl.t_s, tl.p_e_w / 1e6, color="tab:orange", lw=0.8, label="lq")
    axes[0].set_ylabel("power [MW]")
    axes[0].legend(loc="best", fontsize=8)
    axes[1].plot(tb.t_s, tb.pitch_deg, color="tab:blue", lw=0.8, label="baseline")
    axes[1].plot(tl.t_s, tl.pitch_deg, color="tab:orange", lw=0.8, label="lq")
    axes[1].set_ylabel("pitch [deg]")
    axes[1].legend(loc="best", fontsize=8)
    axes[2].plot(tb.t_s, tb.torque_nm / 1e3, color="tab:blue", lw=0.8, label="baseline")
    axes[2].plot(tl.t_s, tl.torque_nm / 1e3, color="tab:orange", lw=0.8, label="lq")
    axes[2].set_ylabel("torque [kN m]")
    axes[2].set_xlabel("time [s]")
    axes[2].legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def error_histogram(trace: SimTrace, trim_s: float, path) -> None:
    """Distribution of the post-warmup power tracking error."""
    i0 = int(round(trim_s / trace.ts))
    err = (trace.p_e_w[i0:] - trace.p_demand_w[i0:]) / 1e3
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(err, bins=80, color="tab:blue", alpha=0.85)
    ax.set_xlabel("tracking error [kW]")
    ax.set_ylabel("samples")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
