"""Single-state drivetrain model of the turbine and its linearization.

The state is the generator-side shaft speed.  Aerodynamic torque enters
through the Cp surface; the generator torque is a direct input.  All
angles handled as degrees at the interface; the linearized pitch channel
is expressed per radian because the controllers integrate pitch commands
in radians internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._numba import njit
from .aero import CpModel, RotorGeometry, cp_dlam_kernel, cp_dpitch_kernel, cp_kernel, cp_raw_kernel


@dataclass(frozen=True)
class TurbineParameters:
    """Physical constants of the drivetrain and actuator limits."""

    inertia: float = 39825631.0
    radius: float = 65.0
    air_density: float = 1.225
    efficiency: float = 0.936
    gearbox_ratio: float = 97.0
    rated_power: float = 3.35e6
    rated_speed: float = 119.31
    rated_torque: float = 30150.0
    pitch_min_deg: float = 1.09
    pitch_max_deg: float = 22.0
    torque_min: float = 0.0
    torque_max: float = 33170.0
    pitch_slew_deg_per_step: float = math.degrees(0.000488)
    torque_slew_per_step: float = 6000.0
    ts: float = 0.004

    def __post_init__(self):
        if min(self.inertia, self.radius, self.air_density, self.gearbox_ratio) <= 0:
            raise ValueError("inertia, radius, density and gearbox ratio must be positive")
        if not 0 < self.efficiency <= 1:
            raise ValueError("efficiency must lie in (0, 1]")
        if self.ts <= 0:
            raise ValueError("sample time must be positive")
        if self.pitch_min_deg >= self.pitch_max_deg:
            raise ValueError("pitch limits out of order")
        if self.torque_min >= self.torque_max:
            raise ValueError("torque limits out of order")
        if self.pitch_slew_deg_per_step <= 0 or self.torque_slew_per_step <= 0:
            raise ValueError("actuator slew limits must be positive")

    @property
    def geometry(self) -> RotorGeometry:
        return RotorGeometry(radius=self.radius, air_density=self.air_density)

    @property
    def accel_gain(self) -> float:
        """C in omega_dot = C * V^3 / omega * Cp - D * torque."""
        return (
            0.5
            * self.air_density
            * math.pi
            * self.radius**2
            * self.gearbox_ratio**2
            / self.inertia
        )

    @property
    def torque_gain(self) -> float:
        """D in omega_dot = C * V^3 / omega * Cp - D * torque."""
        return self.gearbox_ratio**2 / self.inertia


#: layout of the packed parameter vector consumed by the jit kernels
_PACK_SIZE = 8


def pack_turbine(params: TurbineParameters) -> np.ndarray:
    """Flatten the constants needed by the jit kernels into a vector.

    Layout: [C, D, radius, gearbox_ratio, efficiency, ts,
             lambda from r/gearbox, rated_speed].
    """
    return np.array(
        [
            params.accel_gain,
            params.torque_gain,
            params.radius,
            params.gearbox_ratio,
            params.efficiency,
            params.ts,
            params.radius / params.gearbox_ratio,
            params.rated_speed,
        ],
        dtype=np.float64,
    )


@njit(cache=True)
def plant_rhs_kernel(pvec, coeffs, omega, pitch_deg, torque, wind):
    lam = pvec[6] * omega / wind
    cp = cp_kernel(coeffs, lam, pitch_deg)
    return pvec[0] * wind**3 / omega * cp - pvec[1] * torque


@njit(cache=True)
def integrate_step_kernel(pvec, coeffs, omega, pitch_deg, torque, wind, ts):
    """One RK4 step of the shaft speed with inputs held over the step."""
    k1 = plant_rhs_kernel(pvec, coeffs, omega, pitch_deg, torque, wind)
    k2 = plant_rhs_kernel(pvec, coeffs, omega + 0.5 * ts * k1, pitch_deg, torque, wind)
    k3 = plant_rhs_kernel(pvec, coeffs, omega + 0.5 * ts * k2, pitch_deg, torque, wind)
    k4 = plant_rhs_kernel(pvec, coeffs, omega + ts * k3, pitch_deg, torque, wind)
    return omega + ts / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def plant_rhs(
    params: TurbineParameters,
    model: CpModel,
    omega: float,
    pitch_deg: float,
    torque: float,
    wind: float,
) -> float:
    """Shaft acceleration at the given operating point, rad/s^2."""
    if omega <= 0:
        raise ValueError("shaft speed must be positive")
    if wind <= 0:
        raise ValueError("wind speed must be positive")
    return float(plant_rhs_kernel(pack_turbine(params), model.coeffs, omega, pitch_deg, torque, wind))


def integrate_step(
    params: TurbineParameters,
    model: CpModel,
    omega: float,
    pitch_deg: float,
    torque: float,
    wind: float,
) -> float:
    """Advance the shaft speed by one sample period."""
    return float(
        integrate_step_kernel(
            pack_turbine(params), model.coeffs, omega, pitch_deg, torque, wind, params.ts
        )
    )


def electrical_power(params: TurbineParameters, omega: float, torque: float) -> float:
    """Generated electrical power, W."""
    return params.efficiency * omega * torque


@dataclass(frozen=True)
class LinearPlantModel:
    """First-order linearization of the shaft dynamics.

    Continuous form:
        d(domega)/dt = a * domega + b_pitch * dpitch_rad
                       + b_torque * dtorque + f_wind * dwind
    Discrete form (forward Euler at the stored sample time):
        ad = 1 + ts * a,  bd_* = ts * b_*,  fd_wind = ts * f_wind.
    The pitch channel is per radian.
    """

    a: float
    b_pitch: float
    b_torque: float
    f_wind: float
    ts: float

    @property
    def ad(self) -> float:
        return 1.0 + self.ts * self.a

    @property
    def bd_pitch(self) -> float:
        return self.ts * self.b_pitch

    @property
    def bd_torque(self) -> float:
        return self.ts * self.b_torque

    @property
    def fd_wind(self) -> float:
        return self.ts * self.f_wind


def linearize(
    params: TurbineParameters,
    model: CpModel,
    omega: float,
    pitch_deg: float,
    wind: float,
) -> LinearPlantModel:
    """Analytic Jacobian of the shaft dynamics at an operating point."""
    if omega <= 0 or wind <= 0:
        raise ValueError("linearization needs positive speed and wind")
    c = params.accel_gain
    scale = params.radius / params.gearbox_ratio
    lam = scale * omega / wind
    cp = cp_kernel(model.coeffs, lam, pitch_deg)
    if cp_raw_kernel(model.coeffs, lam, pitch_deg) <= 0.0:
        # flat clipped region: aerodynamic partials vanish
        dcp_dlam = 0.0
        dcp_dpitch = 0.0
        cp = 0.0
    else:
        dcp_dlam = cp_dlam_kernel(model.coeffs, lam, pitch_deg)
        dcp_dpitch = cp_dpitch_kernel(model.coeffs, lam, pitch_deg)
    v3 = wind**3
    a = c * v3 * (dcp_dlam * (scale / wind) / omega - cp / omega**2)
    b_pitch_deg = c * v3 / omega * dcp_dpitch
    b_pitch = b_pitch_deg * 180.0 / math.pi
    b_torque = -params.torque_gain
    # d(lam)/dV = -lam / V, so d(V^3 Cp)/dV = 3 V^2 Cp - V^2 lam dCp/dlam
    f_wind = c * wind**2 * (3.0 * cp - lam * dcp_dlam) / omega
    return LinearPlantModel(a=a, b_pitch=b_pitch, b_torque=b_torque, f_wind=f_wind, ts=params.ts)


@dataclass(frozen=True)
class Equilibrium:
    """Steady operating point of the shaft dynamics."""

    omega: float
    pitch_deg: float
    torque: float
    wind: float
    f_slope: float

    @property
    def stable(self) -> bool:
        return self.f_slope < 0.0


def find_equilibrium(
    params: TurbineParameters,
    model: CpModel,
    pitch_deg: float,
    torque: float,
    wind: float,
) -> Equilibrium:
    """Stable steady shaft speed for fixed pitch, torque and wind.

    The residual can have several roots; the stable one with the largest
    speed is returned.  Roots where the Cp surface is clipped to zero are
    rejected because the model is degenerate there.
    """
    if wind <= 0:
        raise ValueError("wind speed must be positive")
    pvec = pack_turbine(params)
    coeffs = model.coeffs
    lo = 0.05 * params.rated_speed
    hi = 2.0 * params.rated_speed

    def resid(omega):
        return plant_rhs_kernel(pvec, coeffs, omega, pitch_deg, torque, wind)

    grid = np.linspace(lo, hi, 400)
    vals = np.array([resid(w) for w in grid])
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(brentq(resid, grid[i], grid[i + 1], xtol=1e-12, rtol=1e-15))
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    if not roots:
        raise ValueError(
            f"no steady speed in [{lo:.1f}, {hi:.1f}] rad/s for "
            f"pitch={pitch_deg} deg, torque={torque} N*m, wind={wind} m/s"
        )
    scale = params.radius / params.gearbox_ratio
    best = None
    for root in roots:
        lam = scale * root / wind
        if cp_raw_kernel(coeffs, lam, pitch_deg) <= 0.0:
            continue
        lin = linearize(params, model, root, pitch_deg, wind)
        if lin.a < 0.0 and (best is None or root > best[0]):
            best = (root, lin.a)
    if best is None:
        raise ValueError(
            "no stable steady speed found for "
            f"pitch={pitch_deg} deg, torque={torque} N*m, wind={wind} m/s"
        )
    return Equilibrium(
        omega=float(best[0]), pitch_deg=pitch_deg, torque=torque, wind=wind, f_slope=float(best[1])
    )
