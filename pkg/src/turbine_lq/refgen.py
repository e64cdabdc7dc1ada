"""Reference trajectories for power-tracking operation.

Maps a power demand and the current wind estimate to speed, pitch and
torque references.  The speed reference follows the quadratic-locus
schedule below rated speed and is capped by the Cp-optimal speed for the
present wind; the pitch reference comes from a precomputed steady-state
table.  Both pass through first-order lowpass filters so the controller
sees smooth targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._numba import njit
from .aero import CpModel, argmax_lambda_kernel, cp_eval, wind_power
from .common import Table1D, Table2D, lut1_kernel, lut2_kernel, make_alpha
from .dynamics import TurbineParameters

DEFAULT_SPEED_FILTER_S = 20.0
DEFAULT_PITCH_FILTER_S = 40.0


def region2_constant(params: TurbineParameters, cp_model: CpModel) -> float:
    """Quadratic torque-locus constant of the model at minimum pitch.

    k such that aerodynamic power equals k * omega^3 on the optimal
    tip-speed-ratio locus (generator-side speed).
    """
    lam_star = argmax_lambda_kernel(
        cp_model.coeffs,
        params.pitch_min_deg,
        cp_model.lambda_range[0],
        cp_model.lambda_range[1],
    )
    cp_star = cp_eval(cp_model, lam_star, params.pitch_min_deg)
    return (
        0.5
        * params.air_density
        * math.pi
        * params.radius**5
        * cp_star
        / (lam_star**3 * params.gearbox_ratio**3)
    )


def locus_speed(params: TurbineParameters, k_m: float, power: float) -> float:
    """Speed on the quadratic locus delivering the demanded power, capped
    at rated speed."""
    if power <= 0:
        raise ValueError("power demand must be positive")
    return min((power / (params.efficiency * k_m)) ** (1.0 / 3.0), params.rated_speed)


def _pitch_for_power(
    params: TurbineParameters,
    cp_model: CpModel,
    omega_sp: float,
    power: float,
    wind: float,
) -> float:
    """Smallest pitch at which the rotor produces exactly the demanded power.

    Evaluated at the scheduled speed for this demand.  If even minimum
    pitch cannot reach the demand the minimum is returned (closest
    approach from below); if maximum pitch still overshoots, the maximum
    is returned.
    """
    lam_cell = params.radius / params.gearbox_ratio * omega_sp / wind
    needed = power / params.efficiency / wind_power(params.geometry, wind)
    lo = params.pitch_min_deg
    hi = params.pitch_max_deg

    def g(theta):
        return cp_eval(cp_model, lam_cell, theta) - needed

    if g(lo) < 0.0:
        return lo
    grid = np.linspace(lo, hi, 200)
    prev = g(lo)
    for i in range(1, len(grid)):
        cur = g(grid[i])
        if prev >= 0.0 > cur:
            return float(brentq(g, grid[i - 1], grid[i], xtol=1e-10))
        prev = cur
    return hi


@dataclass(frozen=True)
class SteadyStateTables:
    """Precomputed steady references over a power x wind grid."""

    speed: Table1D
    pitch: Table2D


def build_tables(
    params: TurbineParameters,
    cp_model: CpModel,
    power_grid: np.ndarray | None = None,
    wind_grid: np.ndarray | None = None,
) -> SteadyStateTables:
    if power_grid is None:
        power_grid = np.linspace(0.1, 1.0, 10) * params.rated_power
    if wind_grid is None:
        wind_grid = np.arange(3.0, 26.0)
    power_grid = np.asarray(power_grid, dtype=float)
    wind_grid = np.asarray(wind_grid, dtype=float)
    k_m = region2_constant(params, cp_model)
    speeds = np.array([locus_speed(params, k_m, p) for p in power_grid])
    pitch = np.empty((power_grid.size, wind_grid.size))
    for i, p in enumerate(power_grid):
        for j, v in enumerate(wind_grid):
            pitch[i, j] = _pitch_for_power(params, cp_model, speeds[i], p, v)
    return SteadyStateTables(
        speed=Table1D(xs=power_grid, ys=speeds),
        pitch=Table2D(xs=power_grid, ys=wind_grid, values=pitch),
    )


def save_tables(tables: SteadyStateTables, params: TurbineParameters, path) -> None:
    """Write the steady-state grid as CSV rows of operating points."""
    with open(path, "w") as fh:
        fh.write("power_w, wind_mps, omega_sp, pitch_deg, torque_nm\n")
        for i, p in enumerate(tables.speed.xs):
            omega = float(tables.speed.ys[i])
            torque = float(p) / (params.efficiency * omega)
            for j, v in enumerate(tables.pitch.ys):
                fh.write(
                    f"{float(p)!r}, {float(v)!r}, {omega!r}, "
                    f"{float(tables.pitch.values[i, j])!r}, {torque!r}\n"
                )


def load_tables(path) -> SteadyStateTables:
    """Rebuild tables from the CSV produced by save_tables."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names or ()
    for col in ("power_w", "wind_mps", "omega_sp", "pitch_deg"):
        if col not in names:
            raise ValueError(f"table CSV missing column {col!r}")
    powers = np.unique(data["power_w"])
    winds = np.unique(data["wind_mps"])
    if powers.size * winds.size != data["power_w"].size:
        raise ValueError("table CSV does not cover a full power x wind grid")
    speeds = np.empty(powers.size)
    pitch = np.empty((powers.size, winds.size))
    for row in data:
        i = int(np.searchsorted(powers, row["power_w"]))
        j = int(np.searchsorted(winds, row["wind_mps"]))
        speeds[i] = row["omega_sp"]
        pitch[i, j] = row["pitch_deg"]
    return SteadyStateTables(
        speed=Table1D(xs=powers, ys=speeds),
        pitch=Table2D(xs=powers, ys=winds, values=pitch),
    )


@njit(cache=True)
def reference_step_kernel(
    lam_star,
    gearbox_over_radius,
    k_m,
    speed_xs,
    speed_ys,
    pitch_xs,
    pitch_ys,
    pitch_vals,
    eta,
    alpha_speed,
    alpha_pitch,
    power,
    wind,
    speed_filt,
    pitch_filt,
):
    """One reference update.

    The raw speed reference is the scheduled speed for the demand, capped
    by the optimal tip-speed-ratio locus at minimum pitch (a function of
    wind only), so low winds fall back to maximum-efficiency tracking.
    When the locus binds, the demand is not reachable at this wind and
    the torque reference becomes the aerodynamic balance torque on the
    locus instead of the demand-derived torque, which would otherwise be
    unreachable and wind the controller up.  Returns the filtered speed
    and pitch references and the torque reference derived from the
    filtered speed.
    """
    omega_track = lam_star * gearbox_over_radius * wind
    omega_table = lut1_kernel(speed_xs, speed_ys, power)
    locus_bound = omega_track < omega_table
    omega_raw = omega_track if locus_bound else omega_table
    speed_next = (1.0 - alpha_speed) * speed_filt + alpha_speed * omega_raw
    pitch_raw = lut2_kernel(pitch_xs, pitch_ys, pitch_vals, power, wind)
    pitch_next = (1.0 - alpha_pitch) * pitch_filt + alpha_pitch * pitch_raw
    if locus_bound:
        torque_d = k_m * speed_next * speed_next
    else:
        torque_d = power / (eta * speed_next)
    return speed_next, pitch_next, torque_d


class ReferenceGenerator:
    """Stateful wrapper holding the tables and the two reference filters."""

    def __init__(
        self,
        params: TurbineParameters,
        cp_model: CpModel,
        tables: SteadyStateTables | None = None,
        speed_filter_s: float = DEFAULT_SPEED_FILTER_S,
        pitch_filter_s: float = DEFAULT_PITCH_FILTER_S,
    ):
        self.params = params
        self.cp_model = cp_model
        self.tables = tables if tables is not None else build_tables(params, cp_model)
        self.lam_star = float(
            argmax_lambda_kernel(
                cp_model.coeffs,
                params.pitch_min_deg,
                cp_model.lambda_range[0],
                cp_model.lambda_range[1],
            )
        )
        self.k_m = region2_constant(params, cp_model)
        self.alpha_speed = make_alpha(params.ts, speed_filter_s, convention="plus")
        self.alpha_pitch = make_alpha(params.ts, pitch_filter_s, convention="plus")
        self.speed_state = params.rated_speed
        self.pitch_state = params.pitch_min_deg

    def reset(self, omega: float, pitch_deg: float) -> None:
        """Seed the filters at a known operating point."""
        self.speed_state = float(omega)
        self.pitch_state = float(pitch_deg)

    def step(self, power: float, wind: float) -> tuple:
        omega_d, pitch_d, torque_d = reference_step_kernel(
            self.lam_star,
            self.params.gearbox_ratio / self.params.radius,
            self.k_m,
            self.tables.speed.xs,
            self.tables.speed.ys,
            self.tables.pitch.xs,
            self.tables.pitch.ys,
            self.tables.pitch.values,
            self.params.efficiency,
            self.alpha_speed,
            self.alpha_pitch,
            power,
            wind,
            self.speed_state,
            self.pitch_state,
        )
        self.speed_state = float(omega_d)
        self.pitch_state = float(pitch_d)
        return float(omega_d), float(pitch_d), float(torque_d)


def steady_operating_point(
    params: TurbineParameters, cp_model: CpModel, power: float, wind: float
) -> tuple:
    """Consistent (speed, pitch, torque) starting point for a demand/wind pair.

    The starting torque never exceeds the aerodynamic balance torque at
    the starting speed and pitch, so the rotor does not begin a run
    decelerating when the demand is not reachable at the given wind.
    """
    k_m = region2_constant(params, cp_model)
    omega_sp = locus_speed(params, k_m, power)
    pitch0 = _pitch_for_power(params, cp_model, omega_sp, power, wind)
    lam_star = argmax_lambda_kernel(
        cp_model.coeffs,
        params.pitch_min_deg,
        cp_model.lambda_range[0],
        cp_model.lambda_range[1],
    )
    omega_track = lam_star * params.gearbox_ratio * wind / params.radius
    omega0 = min(omega_sp, omega_track)
    lam0 = params.radius / params.gearbox_ratio * omega0 / wind
    balance = wind_power(params.geometry, wind) * cp_eval(cp_model, lam0, pitch0) / omega0
    torque0 = min(power / (params.efficiency * omega0), balance, params.torque_max)
    torque0 = max(torque0, params.torque_min)
    return omega0, pitch0, torque0
