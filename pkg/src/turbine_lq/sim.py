"""Closed-loop simulation of the turbine under either controller.

The plant integrates with a fourth-order Runge-Kutta step while the
controllers update at the same sample rate from their own forward-Euler
design model, so the loop exercises genuine model mismatch.  The whole
run executes inside a jit kernel built from the same per-step kernels the
unit-level APIs expose.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ._numba import njit
from .aero import CpModel, argmax_lambda_kernel
from .baseline import STATE_SIZE, BaselineConfig, baseline_step_kernel, pack_baseline
from .common import make_alpha
from .dynamics import TurbineParameters, integrate_step_kernel, pack_turbine
from .loads import count_cycles, damage_equivalent_load
from .lq import GainSchedule, build_gain_schedule, lq_step_kernel
from .refgen import (
    DEFAULT_PITCH_FILTER_S,
    DEFAULT_SPEED_FILTER_S,
    SteadyStateTables,
    build_tables,
    reference_step_kernel,
    region2_constant,
    steady_operating_point,
)
from .wind import DemandSpec, WindRecord, demand_series

TRACE_COLUMNS = (
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


@dataclass(frozen=True)
class SimTrace:
    """Per-sample record of one closed-loop run."""

    t_s: np.ndarray
    wind_mps: np.ndarray
    p_demand_w: np.ndarray
    omega_radps: np.ndarray
    pitch_deg: np.ndarray
    torque_nm: np.ndarray
    p_e_w: np.ndarray
    omega_ref_radps: np.ndarray
    pitch_ref_deg: np.ndarray
    torque_ref_nm: np.ndarray
    gain_idx: np.ndarray

    def __post_init__(self):
        n = self.t_s.size
        for f in fields(self):
            arr = getattr(self, f.name)
            if arr.ndim != 1 or arr.size != n:
                raise ValueError("trace columns must be 1-d arrays of equal length")

    @property
    def n(self) -> int:
        return int(self.t_s.size)

    @property
    def ts(self) -> float:
        return float(self.t_s[1] - self.t_s[0])

    def to_csv(self, path) -> None:
        """Write the trace with full float precision.

        Floats are written with repr so a round trip is lossless and the
        byte stream is a pure function of the values.
        """
        cols = [getattr(self, name) for name in TRACE_COLUMNS[:-1]]
        gain = self.gain_idx
        with open(path, "w") as fh:
            fh.write(", ".join(TRACE_COLUMNS) + "\n")
            for i in range(self.n):
                row = ", ".join(repr(float(c[i])) for c in cols)
                fh.write(f"{row}, {int(gain[i])}\n")

    @classmethod
    def from_csv(cls, path) -> "SimTrace":
        data = np.genfromtxt(path, delimiter=",", names=True)
        names = data.dtype.names or ()
        missing = [c for c in TRACE_COLUMNS if c not in names]
        if missing:
            raise ValueError(f"trace CSV missing columns {missing}")
        kwargs = {name: np.atleast_1d(np.asarray(data[name], dtype=float)) for name in TRACE_COLUMNS[:-1]}
        kwargs["gain_idx"] = np.atleast_1d(np.asarray(data["gain_idx"])).astype(np.int64)
        return cls(**kwargs)


@dataclass(frozen=True)
class Metrics:
    """Summary numbers of one run, computed after discarding the warmup."""

    rms_tracking_error_w: float
    mean_abs_error_w: float
    pitch_travel_deg: float
    torque_travel_nm: float
    switch_count: int

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def compute_metrics(trace: SimTrace, trim_s: float = 0.0) -> Metrics:
    """Tracking and actuator-activity metrics.

    The first trim_s seconds are excluded from the error and travel
    statistics; design switches are counted over the whole run.
    """
    if trim_s < 0:
        raise ValueError("trim must be nonnegative")
    i0 = int(round(trim_s / trace.ts))
    if i0 >= trace.n - 1:
        raise ValueError("trim leaves no samples")
    err = trace.p_e_w[i0:] - trace.p_demand_w[i0:]
    gain = trace.gain_idx
    scheduled = gain >= 0
    switches = int(np.count_nonzero(np.diff(gain[scheduled]) != 0)) if scheduled.any() else 0
    return Metrics(
        rms_tracking_error_w=float(np.sqrt(np.mean(err**2))),
        mean_abs_error_w=float(np.mean(np.abs(err))),
        pitch_travel_deg=float(np.sum(np.abs(np.diff(trace.pitch_deg[i0:])))),
        torque_travel_nm=float(np.sum(np.abs(np.diff(trace.torque_nm[i0:])))),
        switch_count=switches,
    )


def rms_error(trace: SimTrace, trim_s: float = 0.0) -> float:
    return compute_metrics(trace, trim_s).rms_tracking_error_w


@njit(cache=True)
def _run_baseline_kernel(
    pvec,
    coeffs,
    lam_star,
    gb_over_r,
    k_m,
    sp_xs,
    sp_ys,
    pt_xs,
    pt_ys,
    pt_vals,
    alpha_speed,
    alpha_pitch,
    cfg,
    state,
    wind_arr,
    demand_arr,
    omega0,
    speed_filt0,
    pitch_filt0,
    omega_out,
    pitch_out,
    torque_out,
    pe_out,
    wref_out,
    pref_out,
    mref_out,
):
    n = wind_arr.size
    ts = pvec[5]
    eta = pvec[4]
    rated = pvec[7]
    omega = omega0
    speed_filt = speed_filt0
    pitch_filt = pitch_filt0
    for k in range(n):
        v = wind_arr[k]
        pdem = demand_arr[k]
        wd, thd, md = reference_step_kernel(
            lam_star,
            gb_over_r,
            k_m,
            sp_xs,
            sp_ys,
            pt_xs,
            pt_ys,
            pt_vals,
            eta,
            alpha_speed,
            alpha_pitch,
            pdem,
            v,
            speed_filt,
            pitch_filt,
        )
        speed_filt = wd
        pitch_filt = thd
        pitch, torque = baseline_step_kernel(cfg, state, omega, pdem)
        omega_out[k] = omega
        pitch_out[k] = pitch
        torque_out[k] = torque
        pe_out[k] = eta * omega * torque
        wref_out[k] = wd
        pref_out[k] = thd
        mref_out[k] = md
        omega = integrate_step_kernel(pvec, coeffs, omega, pitch, torque, v, ts)
        if not (0.0 < omega <= 3.0 * rated):
            return k
    return -1


@njit(cache=True)
def _run_lq_kernel(
    pvec,
    coeffs,
    lam_star,
    gb_over_r,
    k_m,
    sp_xs,
    sp_ys,
    pt_xs,
    pt_ys,
    pt_vals,
    alpha_speed,
    alpha_pitch,
    gains,
    eqs,
    switch_lo,
    switch_hi,
    active0,
    pitch_min,
    pitch_max,
    torque_min,
    torque_max,
    pitch_slew,
    torque_slew,
    wind_arr,
    demand_arr,
    omega0,
    pitch0,
    torque0,
    speed_filt0,
    pitch_filt0,
    omega_out,
    pitch_out,
    torque_out,
    pe_out,
    wref_out,
    pref_out,
    mref_out,
    gain_out,
):
    n = wind_arr.size
    ts = pvec[5]
    eta = pvec[4]
    rated = pvec[7]
    omega = omega0
    z = 0.0
    prev_pitch = pitch0
    prev_torque = torque0
    speed_filt = speed_filt0
    pitch_filt = pitch_filt0
    active = active0
    for k in range(n):
        v = wind_arr[k]
        pdem = demand_arr[k]
        if v < switch_lo:
            active = 0
        elif v > switch_hi:
            active = 1
        wd, thd, md = reference_step_kernel(
            lam_star,
            gb_over_r,
            k_m,
            sp_xs,
            sp_ys,
            pt_xs,
            pt_ys,
            pt_vals,
            eta,
            alpha_speed,
            alpha_pitch,
            pdem,
            v,
            speed_filt,
            pitch_filt,
        )
        speed_filt = wd
        pitch_filt = thd
        pitch, torque, z = lq_step_kernel(
            gains[active],
            omega,
            z,
            prev_pitch,
            prev_torque,
            eqs[active, 0],
            eqs[active, 1],
            eqs[active, 2],
            wd,
            thd,
            md,
            ts,
            pitch_min,
            pitch_max,
            torque_min,
            torque_max,
            pitch_slew,
            torque_slew,
        )
        omega_out[k] = omega
        pitch_out[k] = pitch
        torque_out[k] = torque
        pe_out[k] = eta * omega * torque
        wref_out[k] = wd
        pref_out[k] = thd
        mref_out[k] = md
        gain_out[k] = active
        prev_pitch = pitch
        prev_torque = torque
        omega = integrate_step_kernel(pvec, coeffs, omega, pitch, torque, v, ts)
        if not (0.0 < omega <= 3.0 * rated):
            return k
    return -1


@dataclass(frozen=True)
class SimResult:
    controller: str
    trace: SimTrace
    metrics: Metrics


def run_closed_loop(
    params: TurbineParameters,
    cp_model: CpModel,
    controller: str,
    wind: WindRecord,
    demand: DemandSpec,
    trim_s: float = 0.0,
    baseline_cfg: BaselineConfig | None = None,
    schedule: GainSchedule | None = None,
    tables: SteadyStateTables | None = None,
    speed_filter_s: float = DEFAULT_SPEED_FILTER_S,
    pitch_filter_s: float = DEFAULT_PITCH_FILTER_S,
) -> SimResult:
    """Simulate one run and return its trace and metrics.

    The wind record sets the time grid, which must match the controller
    sample time.  Demands above rated power are rejected.  Both
    controllers start from the steady operating point of the initial
    demand and wind so the warmup transient is mild.
    """
    if controller not in ("baseline", "lq"):
        raise ValueError(f"unknown controller {controller!r}")
    if abs(wind.ts - params.ts) > 1e-9:
        raise ValueError(
            f"wind record sample time {wind.ts!r} does not match controller {params.ts!r}"
        )
    if demand.max_power() > params.rated_power * (1 + 1e-12):
        raise ValueError("demand schedule exceeds rated power")
    n = wind.speed.size
    if n < 2:
        raise ValueError("wind record too short")

    if tables is None:
        tables = build_tables(params, cp_model)
    demand_arr = demand_series(demand, wind.time)
    omega0, pitch0, torque0 = steady_operating_point(
        params, cp_model, demand_arr[0], wind.speed[0]
    )
    alpha_speed = make_alpha(params.ts, speed_filter_s, convention="plus")
    alpha_pitch = make_alpha(params.ts, pitch_filter_s, convention="plus")

    pvec = pack_turbine(params)
    coeffs = np.ascontiguousarray(cp_model.coeffs)
    wind_arr = np.ascontiguousarray(wind.speed)
    demand_arr = np.ascontiguousarray(demand_arr)
    out = {name: np.empty(n) for name in ("omega", "pitch", "torque", "pe", "wref", "pref", "mref")}
    gain_out = np.full(n, -1, dtype=np.int64)

    lam_star = float(
        argmax_lambda_kernel(
            coeffs,
            params.pitch_min_deg,
            cp_model.lambda_range[0],
            cp_model.lambda_range[1],
        )
    )
    common_args = (
        pvec,
        coeffs,
        lam_star,
        params.gearbox_ratio / params.radius,
        region2_constant(params, cp_model),
        np.ascontiguousarray(tables.speed.xs),
        np.ascontiguousarray(tables.speed.ys),
        np.ascontiguousarray(tables.pitch.xs),
        np.ascontiguousarray(tables.pitch.ys),
        np.ascontiguousarray(tables.pitch.values),
        alpha_speed,
        alpha_pitch,
    )

    if controller == "baseline":
        cfg = pack_baseline(baseline_cfg if baseline_cfg is not None else BaselineConfig(), params)
        state = np.zeros(STATE_SIZE)
        state[4] = pitch0
        state[5] = torque0
        status = _run_baseline_kernel(
            *common_args,
            cfg,
            state,
            wind_arr,
            demand_arr,
            omega0,
            omega0,
            pitch0,
            out["omega"],
            out["pitch"],
            out["torque"],
            out["pe"],
            out["wref"],
            out["pref"],
            out["mref"],
        )
    else:
        if schedule is None:
            schedule = build_gain_schedule(params, cp_model, initial_wind=wind.speed[0])
        status = _run_lq_kernel(
            *common_args,
            schedule.gain_stack(),
            schedule.anchor_stack(),
            schedule.switch_low,
            schedule.switch_high,
            schedule.active,
            params.pitch_min_deg,
            params.pitch_max_deg,
            params.torque_min,
            params.torque_max,
            params.pitch_slew_deg_per_step,
            params.torque_slew_per_step,
            wind_arr,
            demand_arr,
            omega0,
            pitch0,
            torque0,
            omega0,
            pitch0,
            out["omega"],
            out["pitch"],
            out["torque"],
            out["pe"],
            out["wref"],
            out["pref"],
            out["mref"],
            gain_out,
        )

    if status >= 0:
        t_fail = wind.time[status]
        raise RuntimeError(
            f"simulation diverged at step {status} (t = {t_fail:.3f} s): "
            "shaft speed left the valid range"
        )

    trace = SimTrace(
        t_s=wind.time.copy(),
        wind_mps=wind_arr.copy(),
        p_demand_w=demand_arr.copy(),
        omega_radps=out["omega"],
        pitch_deg=out["pitch"],
        torque_nm=out["torque"],
        p_e_w=out["pe"],
        omega_ref_radps=out["wref"],
        pitch_ref_deg=out["pref"],
        torque_ref_nm=out["mref"],
        gain_idx=gain_out,
    )
    return SimResult(controller=controller, trace=trace, metrics=compute_metrics(trace, trim_s))


@dataclass(frozen=True)
class LoadsSummary:
    """Damage-equivalent loads of the two actuator commands."""

    torque_del_nm: float
    pitch_del_deg: float


def actuator_loads(
    trace: SimTrace,
    trim_s: float = 0.0,
    torque_exponent: float = 4.0,
    pitch_exponent: float = 10.0,
) -> LoadsSummary:
    """Damage-equivalent loads of the post-warmup actuator histories.

    The reference cycle count is the analyzed duration in seconds, which
    normalizes the loads to a one-hertz equivalent cycle rate.
    """
    i0 = int(round(trim_s / trace.ts))
    if i0 >= trace.n - 1:
        raise ValueError("trim leaves no samples")
    seconds = (trace.n - i0) * trace.ts
    torque_del = damage_equivalent_load(
        count_cycles(trace.torque_nm[i0:]), torque_exponent, seconds
    )
    pitch_del = damage_equivalent_load(
        count_cycles(trace.pitch_deg[i0:]), pitch_exponent, seconds
    )
    return LoadsSummary(torque_del_nm=torque_del, pitch_del_deg=pitch_del)


@dataclass(frozen=True)
class ComparisonReport:
    baseline: SimResult
    lq: SimResult
    baseline_loads: LoadsSummary
    lq_loads: LoadsSummary

    def to_text(self) -> str:
        lines = ["controller comparison", "====================="]
        for result, loads in ((self.baseline, self.baseline_loads), (self.lq, self.lq_loads)):
            m = result.metrics
            lines.append(f"[{result.controller}]")
            lines.append(f"  rms tracking error   : {m.rms_tracking_error_w:.1f} W")
            lines.append(f"  mean absolute error  : {m.mean_abs_error_w:.1f} W")
            lines.append(f"  pitch travel         : {m.pitch_travel_deg:.2f} deg")
            lines.append(f"  torque travel        : {m.torque_travel_nm:.1f} N*m")
            lines.append(f"  design switches      : {m.switch_count}")
            lines.append(f"  torque DEL (m=4)     : {loads.torque_del_nm:.1f} N*m")
            lines.append(f"  pitch DEL (m=10)     : {loads.pitch_del_deg:.4f} deg")
        return "\n".join(lines) + "\n"


def compare_controllers(
    params: TurbineParameters,
    cp_model: CpModel,
    wind: WindRecord,
    demand: DemandSpec,
    trim_s: float = 0.0,
    baseline_cfg: BaselineConfig | None = None,
    schedule: GainSchedule | None = None,
    tables: SteadyStateTables | None = None,
) -> ComparisonReport:
    """Run both controllers on the same wind and demand."""
    if tables is None:
        tables = build_tables(params, cp_model)
    if schedule is None:
        schedule = build_gain_schedule(params, cp_model, initial_wind=wind.speed[0])
    base = run_closed_loop(
        params,
        cp_model,
        "baseline",
        wind,
        demand,
        trim_s=trim_s,
        baseline_cfg=baseline_cfg,
        tables=tables,
    )
    lq = run_closed_loop(
        params,
        cp_model,
        "lq",
        wind,
        demand,
        trim_s=trim_s,
        schedule=schedule,
        tables=tables,
    )
    return ComparisonReport(
        baseline=base,
        lq=lq,
        baseline_loads=actuator_loads(base.trace, trim_s),
        lq_loads=actuator_loads(lq.trace, trim_s),
    )
