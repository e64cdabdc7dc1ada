"""Rotor aerodynamics: power coefficient surfaces and aerodynamic torque.

The working Cp model is a bivariate quartic polynomial in tip-speed ratio
and pitch angle (degrees), clipped below at zero.  An exponential Cp
variant is provided for cross-checks against published curves.  All
evaluation kernels are scalar so the simulation loop can call them
directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numba import njit

BETZ_LIMIT = 16.0 / 27.0

#: polynomial coefficients, basis order
#: [1, L, t, L^2, L*t, t^2, L^3, L^2*t, L*t^2, t^3,
#:  L^4, L^3*t, L^2*t^2, L*t^3, t^4]  (L = tip-speed ratio, t = pitch in deg)
DEFAULT_CP_COEFFS = np.array(
    [
        0.098,
        -0.150,
        -0.011,
        0.061,
        0.0125,
        0.000053,
        -0.00615,
        -0.00184,
        -0.000338,
        0.0000407,
        0.000184,
        0.000106,
        -0.0000515,
        0.0000143,
        -0.00000197,
    ]
)

DEFAULT_LAMBDA_RANGE = (1.0, 16.0)
DEFAULT_PITCH_RANGE_DEG = (1.09, 22.0)


@njit(cache=True)
def cp_raw_kernel(coeffs, lam, pitch_deg):
    L = lam
    t = pitch_deg
    L2 = L * L
    t2 = t * t
    return (
        coeffs[0]
        + coeffs[1] * L
        + coeffs[2] * t
        + coeffs[3] * L2
        + coeffs[4] * L * t
        + coeffs[5] * t2
        + coeffs[6] * L2 * L
        + coeffs[7] * L2 * t
        + coeffs[8] * L * t2
        + coeffs[9] * t2 * t
        + coeffs[10] * L2 * L2
        + coeffs[11] * L2 * L * t
        + coeffs[12] * L2 * t2
        + coeffs[13] * L * t2 * t
        + coeffs[14] * t2 * t2
    )


@njit(cache=True)
def cp_kernel(coeffs, lam, pitch_deg):
    v = cp_raw_kernel(coeffs, lam, pitch_deg)
    return v if v > 0.0 else 0.0


@njit(cache=True)
def cp_dlam_kernel(coeffs, lam, pitch_deg):
    # partial of the raw polynomial wrt tip-speed ratio
    L = lam
    t = pitch_deg
    return (
        coeffs[1]
        + 2.0 * coeffs[3] * L
        + coeffs[4] * t
        + 3.0 * coeffs[6] * L * L
        + 2.0 * coeffs[7] * L * t
        + coeffs[8] * t * t
        + 4.0 * coeffs[10] * L * L * L
        + 3.0 * coeffs[11] * L * L * t
        + 2.0 * coeffs[12] * L * t * t
        + coeffs[13] * t * t * t
    )


@njit(cache=True)
def cp_dpitch_kernel(coeffs, lam, pitch_deg):
    # partial of the raw polynomial wrt pitch (per degree)
    L = lam
    t = pitch_deg
    return (
        coeffs[2]
        + coeffs[4] * L
        + 2.0 * coeffs[5] * t
        + coeffs[7] * L * L
        + 2.0 * coeffs[8] * L * t
        + 3.0 * coeffs[9] * t * t
        + coeffs[11] * L * L * L
        + 2.0 * coeffs[12] * L * L * t
        + 3.0 * coeffs[13] * L * t * t
        + 4.0 * coeffs[14] * t * t * t
    )


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@njit(cache=True)
def argmax_lambda_kernel(coeffs, pitch_deg, lam_lo, lam_hi):
    """Tip-speed ratio maximizing the clipped Cp at fixed pitch.

    Coarse grid scan (64 cells) to bracket the best cell, then
    golden-section refinement.  Deterministic for identical inputs.
    """
    n = 64
    step = (lam_hi - lam_lo) / n
    best = lam_lo
    best_v = cp_kernel(coeffs, lam_lo, pitch_deg)
    for i in range(1, n + 1):
        x = lam_lo + step * i
        v = cp_kernel(coeffs, x, pitch_deg)
        if v > best_v:
            best_v = v
            best = x
    a = best - step if best - step > lam_lo else lam_lo
    b = best + step if best + step < lam_hi else lam_hi
    # golden-section shrink to ~1e-9 of the bracket
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc = cp_kernel(coeffs, c, pitch_deg)
    fd = cp_kernel(coeffs, d, pitch_deg)
    for _ in range(60):
        if b - a < 1e-9:
            break
        if fc > fd:
            b = d
            d = c
            fd = fc
            c = b - _INV_GOLDEN * (b - a)
            fc = cp_kernel(coeffs, c, pitch_deg)
        else:
            a = c
            c = d
            fc = fd
            d = a + _INV_GOLDEN * (b - a)
            fd = cp_kernel(coeffs, d, pitch_deg)
    mid = 0.5 * (a + b)
    # the scan endpoints may dominate the interior optimum
    if cp_kernel(coeffs, mid, pitch_deg) >= best_v:
        return mid
    return best


def cp_basis(lam, pitch_deg) -> np.ndarray:
    """Design-matrix columns of the polynomial basis (vectorized)."""
    L = np.asarray(lam, dtype=float)
    t = np.asarray(pitch_deg, dtype=float)
    cols = [
        np.ones_like(L),
        L,
        t,
        L**2,
        L * t,
        t**2,
        L**3,
        L**2 * t,
        L * t**2,
        t**3,
        L**4,
        L**3 * t,
        L**2 * t**2,
        L * t**3,
        t**4,
    ]
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class CpModel:
    """Clipped polynomial power-coefficient surface over a bounded domain.

    Construction fails if the surface reaches the Betz limit anywhere on a
    200 x 200 grid over the domain; the clipped surface is nonnegative by
    definition.
    """

    coeffs: np.ndarray = field(default_factory=lambda: DEFAULT_CP_COEFFS.copy())
    lambda_range: tuple = DEFAULT_LAMBDA_RANGE
    pitch_range_deg: tuple = DEFAULT_PITCH_RANGE_DEG

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (15,):
            raise ValueError("CpModel needs exactly 15 polynomial coefficients")
        object.__setattr__(self, "coeffs", coeffs)
        lo, hi = self.lambda_range
        plo, phi = self.pitch_range_deg
        if not (lo < hi and plo < phi):
            raise ValueError("invalid Cp domain")
        lam = np.linspace(lo, hi, 200)
        pit = np.linspace(plo, phi, 200)
        L, T = np.meshgrid(lam, pit, indexing="ij")
        surface = np.maximum(cp_basis(L, T) @ coeffs, 0.0)
        worst = float(surface.max())
        if worst >= BETZ_LIMIT:
            raise ValueError(
                f"Cp surface reaches {worst:.4f} >= 16/27 inside the domain; "
                "refusing to build the model"
            )


def cp_eval(model: CpModel, lam: float, pitch_deg: float) -> float:
    """Clipped power coefficient at one operating point."""
    return float(cp_kernel(model.coeffs, lam, pitch_deg))


def cp_eval_exponential(params, lam: float, pitch_deg: float) -> float:
    """Exponential-family Cp variant used for cross-checks.

    cp = (a1/li + a2*pitch + a3) * exp(a4/li) with
    1/li = 1/(lam + a5) + a6/(pitch^3 + 1).
    ``params`` is the sequence (a1..a6).  Singular denominators are
    guarded; the result is clipped below at zero.
    """
    a1, a2, a3, a4, a5, a6 = (float(p) for p in params)
    den1 = lam + a5
    if den1 == 0.0:
        return 0.0
    den2 = pitch_deg**3 + 1.0
    if den2 == 0.0:
        return 0.0
    inv_li = 1.0 / den1 + a6 / den2
    v = (a1 * inv_li + a2 * pitch_deg + a3) * math.exp(a4 * inv_li)
    return max(v, 0.0)


@dataclass(frozen=True)
class RotorGeometry:
    radius: float
    air_density: float

    def __post_init__(self):
        if self.radius <= 0 or self.air_density <= 0:
            raise ValueError("radius and air density must be positive")


def wind_power(geom: RotorGeometry, wind: float) -> float:
    """Kinetic power of the free stream through the rotor disc, W."""
    if wind < 0:
        raise ValueError("wind speed must be nonnegative")
    return 0.5 * geom.air_density * math.pi * geom.radius**2 * wind**3


def tip_speed_ratio(radius: float, omega: float, gearbox_ratio: float, wind: float) -> float:
    """lambda = r * omega_rotor / V with generator-side omega input."""
    if wind <= 0:
        raise ValueError("wind speed must be positive")
    return radius * omega / (gearbox_ratio * wind)


def rotor_torque(
    geom: RotorGeometry, model: CpModel, omega_rotor: float, wind: float, pitch_deg: float
) -> float:
    """Aerodynamic torque on the rotor shaft (rotor side), N*m."""
    if omega_rotor <= 0:
        raise ValueError("rotor speed must be positive for torque evaluation")
    lam = geom.radius * omega_rotor / wind
    p_aero = wind_power(geom, wind) * cp_eval(model, lam, pitch_deg)
    return p_aero / omega_rotor


def cp_argmax_speed(
    model: CpModel, geom: RotorGeometry, gearbox_ratio: float, wind: float, pitch_deg: float
) -> float:
    """Generator speed maximizing Cp at the given wind and pitch.

    The optimal tip-speed ratio is independent of wind speed for a fixed
    pitch, so the result scales exactly linearly in wind.
    """
    if wind <= 0:
        raise ValueError("wind speed must be positive")
    lam_star = argmax_lambda_kernel(
        model.coeffs, pitch_deg, model.lambda_range[0], model.lambda_range[1]
    )
    return float(lam_star) * (gearbox_ratio * wind / geom.radius)


def fit_cp_model(
    lam: np.ndarray,
    pitch_deg: np.ndarray,
    cp: np.ndarray,
    lambda_range: tuple = DEFAULT_LAMBDA_RANGE,
    pitch_range_deg: tuple = DEFAULT_PITCH_RANGE_DEG,
) -> CpModel:
    """Least-squares fit of the polynomial surface to sample points."""
    lam = np.asarray(lam, dtype=float).ravel()
    pitch_deg = np.asarray(pitch_deg, dtype=float).ravel()
    cp = np.asarray(cp, dtype=float).ravel()
    if not (lam.size == pitch_deg.size == cp.size):
        raise ValueError("sample arrays must have equal lengths")
    if lam.size < 15:
        raise ValueError("need at least 15 samples to fit 15 coefficients")
    basis = cp_basis(lam, pitch_deg)
    coeffs, *_ = np.linalg.lstsq(basis, cp, rcond=None)
    return CpModel(coeffs=coeffs, lambda_range=lambda_range, pitch_range_deg=pitch_range_deg)


def load_cp_samples(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read Cp sample points from CSV with columns lambda, pitch_deg, cp."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    for col in ("lambda", "pitch_deg", "cp"):
        if col not in (data.dtype.names or ()):
            raise ValueError(f"Cp sample CSV missing column {col!r}")
    return (
        np.atleast_1d(data["lambda"]),
        np.atleast_1d(data["pitch_deg"]),
        np.atleast_1d(data["cp"]),
    )
