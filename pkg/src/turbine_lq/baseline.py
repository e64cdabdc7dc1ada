"""Gain-scheduled baseline controller: torque case logic plus pitch PI.

The torque channel picks one of four laws from the filtered shaft speed
(power-tracking law above the scheduled speed, zero torque below cut-in,
linear startup ramp, quadratic locus otherwise).  A pitch-and-torque
driven correction term lifts the measured speed so the case selection
locks into the power-tracking law near rated conditions.  The pitch
channel is a PI loop with a gain knee that softens the response at high
pitch angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numba import njit
from .common import make_alpha, saturate, slew_limited
from .dynamics import TurbineParameters


@dataclass(frozen=True)
class BaselineConfig:
    """Tuning constants of the baseline controller.

    Pitch quantities are in degrees, speeds in rad/s (generator side),
    torques in N*m.  Slew limits apply per controller step.
    """

    region12_gain: float = 82.47
    cut_in_speed: float = 10.47
    quad_gain: float = 1.75
    region2_end_speed: float = 15.71
    torque_filter_s: float = 1.0
    pitch_filter_s: float = 0.133
    boost_filter_s: float = 10.0
    boost_pitch_gain: float = math.radians(30.0)
    boost_torque_gain: float = 1e-4
    gain_knee_deg: float = math.degrees(0.174)
    kp_deg: float = math.degrees(0.133)
    ki_deg: float = math.degrees(0.004)

    def __post_init__(self):
        if min(self.torque_filter_s, self.pitch_filter_s, self.boost_filter_s) <= 0:
            raise ValueError("filter time constants must be positive")
        if self.gain_knee_deg <= 0 or self.ki_deg <= 0:
            raise ValueError("pitch loop constants must be positive")


#: layout of the packed state vector used by the step kernel
STATE_SIZE = 7
_IDX_BOOST_FILT = 0
_IDX_OMEGA_FILT_TORQUE = 1
_IDX_OMEGA_FILT_PITCH = 2
_IDX_PI_INTEGRAL = 3
_IDX_PREV_PITCH = 4
_IDX_PREV_TORQUE = 5
_IDX_INITIALIZED = 6


def pack_baseline(cfg: BaselineConfig, params: TurbineParameters) -> np.ndarray:
    """Flatten controller and turbine constants for the step kernel."""
    return np.array(
        [
            params.efficiency,
            params.rated_speed,
            params.pitch_min_deg,
            params.pitch_max_deg,
            params.torque_min,
            params.torque_max,
            params.ts,
            cfg.region12_gain,
            cfg.cut_in_speed,
            cfg.quad_gain,
            cfg.region2_end_speed,
            make_alpha(params.ts, cfg.torque_filter_s, convention="minus"),
            make_alpha(params.ts, cfg.pitch_filter_s, convention="minus"),
            make_alpha(params.ts, cfg.boost_filter_s, convention="minus"),
            cfg.boost_pitch_gain,
            cfg.boost_torque_gain,
            params.rated_torque,
            cfg.gain_knee_deg,
            cfg.kp_deg,
            cfg.ki_deg,
            params.pitch_slew_deg_per_step,
            params.torque_slew_per_step,
        ],
        dtype=np.float64,
    )


@njit(cache=True)
def desired_speed_kernel(power, eta, quad_gain, rated_speed):
    wd = (power / (eta * quad_gain)) ** (1.0 / 3.0)
    return wd if wd < rated_speed else rated_speed


@njit(cache=True)
def boost_kernel(
    alpha, gain_pitch, gain_torque, pitch_prev, torque_prev, pitch_min, torque_rated, filt_prev
):
    """Speed correction from actuator loading, filtered and clipped at zero."""
    raw = gain_pitch * (pitch_prev - pitch_min) + gain_torque * (torque_prev - torque_rated)
    filt = (1.0 - alpha) * filt_prev + alpha * raw
    boost = filt if filt > 0.0 else 0.0
    return boost, filt


@njit(cache=True)
def torque_case_kernel(eta, c12, w_cut_in, c_quad, w_region2_end, omega_filt, boost, omega_des, power):
    """Four-way torque law on the filtered speed.

    The boosted speed only enters the case conditions; the torque values
    themselves use the unboosted filtered speed.
    """
    boosted = omega_filt + boost
    if boosted >= omega_des:
        return power / (eta * omega_filt)
    if omega_filt <= w_cut_in:
        return 0.0
    if boosted < w_region2_end:
        return c12 * (omega_filt - w_cut_in)
    return c_quad * omega_filt * omega_filt


@njit(cache=True)
def pitch_pi_kernel(ts, knee_deg, kp, ki, pitch_min, pitch_max, pitch_prev, integral, err):
    """PI pitch law with gain knee and integrator clamping.

    Returns the unsaturated pitch target and the updated integral.  The
    integral is clamped so the integral part alone stays inside the pitch
    range, which prevents windup at the limits.
    """
    gk = 1.0 / (1.0 + pitch_prev / knee_deg)
    acc = integral + ts * err
    lo = pitch_min / (gk * ki)
    hi = pitch_max / (gk * ki)
    acc = saturate(acc, lo, hi)
    target = gk * (kp * err + ki * acc)
    return target, acc


@njit(cache=True)
def baseline_step_kernel(cfg, state, omega_meas, power_demand):
    """Advance the controller one sample and return (pitch_deg, torque)."""
    if state[6] == 0.0:
        state[1] = omega_meas
        state[2] = omega_meas
        gk0 = 1.0 / (1.0 + state[4] / cfg[17])
        state[3] = state[4] / (cfg[19] * gk0)
        state[0] = cfg[14] * (state[4] - cfg[2]) + cfg[15] * (state[5] - cfg[16])
        state[6] = 1.0

    omega_des = desired_speed_kernel(power_demand, cfg[0], cfg[9], cfg[1])

    boost, state[0] = boost_kernel(
        cfg[13], cfg[14], cfg[15], state[4], state[5], cfg[2], cfg[16], state[0]
    )

    state[1] = (1.0 - cfg[11]) * state[1] + cfg[11] * omega_meas
    torque_target = torque_case_kernel(
        cfg[0], cfg[7], cfg[8], cfg[9], cfg[10], state[1], boost, omega_des, power_demand
    )
    torque_cmd = slew_limited(state[5], torque_target, cfg[4], cfg[5], -cfg[21], cfg[21])

    state[2] = (1.0 - cfg[12]) * state[2] + cfg[12] * omega_meas
    err = state[2] - omega_des
    pitch_target, state[3] = pitch_pi_kernel(
        cfg[6], cfg[17], cfg[18], cfg[19], cfg[2], cfg[3], state[4], state[3], err
    )
    pitch_cmd = slew_limited(state[4], pitch_target, cfg[2], cfg[3], -cfg[20], cfg[20])

    state[4] = pitch_cmd
    state[5] = torque_cmd
    return pitch_cmd, torque_cmd


def desired_speed(cfg: BaselineConfig, params: TurbineParameters, power: float) -> float:
    """Scheduled shaft speed for a power demand, capped at rated."""
    if power <= 0:
        raise ValueError("power demand must be positive")
    return float(desired_speed_kernel(power, params.efficiency, cfg.quad_gain, params.rated_speed))


def correction_term(
    cfg: BaselineConfig,
    params: TurbineParameters,
    pitch_prev_deg: float,
    torque_prev: float,
    filt_prev: float,
) -> tuple:
    """One update of the speed correction: (clipped boost, new filter state)."""
    alpha = make_alpha(params.ts, cfg.boost_filter_s, convention="minus")
    boost, filt = boost_kernel(
        alpha,
        cfg.boost_pitch_gain,
        cfg.boost_torque_gain,
        pitch_prev_deg,
        torque_prev,
        params.pitch_min_deg,
        params.rated_torque,
        filt_prev,
    )
    return float(boost), float(filt)


def torque_command(
    cfg: BaselineConfig,
    params: TurbineParameters,
    omega_filt: float,
    boost: float,
    omega_des: float,
    power: float,
) -> float:
    """Torque case logic before saturation and slew limiting."""
    return float(
        torque_case_kernel(
            params.efficiency,
            cfg.region12_gain,
            cfg.cut_in_speed,
            cfg.quad_gain,
            cfg.region2_end_speed,
            omega_filt,
            boost,
            omega_des,
            power,
        )
    )


def pitch_command(
    cfg: BaselineConfig,
    params: TurbineParameters,
    omega_filt: float,
    omega_des: float,
    pitch_prev_deg: float,
    integral: float,
) -> tuple:
    """PI pitch law before saturation: (pitch target deg, new integral)."""
    return tuple(
        float(v)
        for v in pitch_pi_kernel(
            params.ts,
            cfg.gain_knee_deg,
            cfg.kp_deg,
            cfg.ki_deg,
            params.pitch_min_deg,
            params.pitch_max_deg,
            pitch_prev_deg,
            integral,
            omega_filt - omega_des,
        )
    )


class BaselineController:
    """Stateful wrapper around the step kernel."""

    def __init__(self, cfg: BaselineConfig, params: TurbineParameters):
        self.cfg = cfg
        self.params = params
        self.packed = pack_baseline(cfg, params)
        self.state = np.zeros(STATE_SIZE)
        self.state[_IDX_PREV_PITCH] = params.pitch_min_deg

    def reset(self, pitch_deg: float, torque: float) -> None:
        """Arm the controller at a known actuator state.

        The speed filters and the integral seed themselves from the first
        measurement, so only the actuator values are needed here.
        """
        self.state[:] = 0.0
        self.state[_IDX_PREV_PITCH] = pitch_deg
        self.state[_IDX_PREV_TORQUE] = torque

    def step(self, omega: float, power_demand: float) -> tuple:
        pitch, torque = baseline_step_kernel(self.packed, self.state, omega, power_demand)
        return float(pitch), float(torque)
