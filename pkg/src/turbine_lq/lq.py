"""Multivariable LQ tracking controller with gain scheduling.

The controller acts on an augmented state built from the linearized shaft
dynamics: speed deviation, integrated speed tracking error, and the two
actuator deviations (pitch in radians, torque in N*m).  The inputs are
actuator rates, so integral action on both channels is inherent.  Two
designs at different operating points are scheduled over wind speed with
a hysteresis band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numba import JIT_ENABLED, njit
from .aero import CpModel
from .common import slew_limited
from .dynamics import LinearPlantModel, TurbineParameters, linearize

_DEG2RAD = math.pi / 180.0
_RAD2DEG = 180.0 / math.pi

#: state order of the augmented model
STATE_LABELS = ("speed_dev_radps", "speed_err_integral_rad", "pitch_dev_rad", "torque_dev_nm")
INPUT_LABELS = ("pitch_rate_radps", "torque_rate_nmps")


@dataclass(frozen=True)
class AugmentedModel:
    """Discrete-time tracking model x(k+1) = a x(k) + b u(k) + f w(k).

    The disturbance vector w stacks the wind-speed deviation and the
    desired-speed deviation; it is not used by the regulator itself but
    documents how external signals enter.
    """

    a: np.ndarray
    b: np.ndarray
    f: np.ndarray
    ts: float


def build_augmented(lin: LinearPlantModel) -> AugmentedModel:
    """Assemble the augmented tracking model from a plant linearization.

    Raises ValueError if the pair (a, b) is not controllable, which would
    make the regulator design meaningless.
    """
    ts = lin.ts
    a = np.array(
        [
            [lin.ad, 0.0, lin.bd_pitch, lin.bd_torque],
            [-ts, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    b = np.array(
        [
            [0.0, 0.0],
            [0.0, 0.0],
            [ts, 0.0],
            [0.0, ts],
        ]
    )
    f = np.array(
        [
            [lin.fd_wind, 0.0],
            [0.0, ts],
            [0.0, 0.0],
            [0.0, 0.0],
        ]
    )
    n = a.shape[0]
    blocks = [b]
    for _ in range(n - 1):
        blocks.append(a @ blocks[-1])
    ctrb = np.hstack(blocks)
    if np.linalg.matrix_rank(ctrb) < n:
        raise ValueError("augmented model is not controllable")
    return AugmentedModel(a=a, b=b, f=f, ts=ts)


@njit(cache=True)
def dare_iteration_kernel(a, b, q, r, tol, max_iter):
    """Fixed-point iteration for the discrete algebraic Riccati equation.

    Starts from q and repeats the Riccati map until the largest element
    change falls below tol relative to the largest element.  The matrix
    products are written out elementwise because the matrices are tiny
    (at most 4 x 4) and the iteration count can reach millions for slow
    closed-loop modes.  Returns the matrix and the iteration count, or
    -1 as the count when the cap is reached without convergence.
    """
    n = a.shape[0]
    m = b.shape[1]
    p = q.copy()
    pa = np.empty((n, n))
    pb = np.empty((n, m))
    apb = np.empty((n, m))
    s = np.empty((m, m))
    sinv = np.empty((m, m))
    bpa = np.empty((m, n))
    sbpa = np.empty((m, n))
    pn = np.empty((n, n))
    for it in range(max_iter):
        for i in range(n):
            for j in range(n):
                acc = 0.0
                for k in range(n):
                    acc += p[i, k] * a[k, j]
                pa[i, j] = acc
            for j in range(m):
                acc = 0.0
                for k in range(n):
                    acc += p[i, k] * b[k, j]
                pb[i, j] = acc
        for i in range(m):
            for j in range(m):
                acc = r[i, j]
                for k in range(n):
                    acc += b[k, i] * pb[k, j]
                s[i, j] = acc
        if m == 1:
            sinv[0, 0] = 1.0 / s[0, 0]
        else:
            det = s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]
            sinv[0, 0] = s[1, 1] / det
            sinv[1, 1] = s[0, 0] / det
            sinv[0, 1] = -s[0, 1] / det
            sinv[1, 0] = -s[1, 0] / det
        for i in range(m):
            for j in range(n):
                acc = 0.0
                for k in range(n):
                    acc += b[k, i] * pa[k, j]
                bpa[i, j] = acc
        for i in range(m):
            for j in range(n):
                acc = 0.0
                for k in range(m):
                    acc += sinv[i, k] * bpa[k, j]
                sbpa[i, j] = acc
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in range(n):
                    acc += a[k, i] * pb[k, j]
                apb[i, j] = acc
        for i in range(n):
            for j in range(n):
                acc = q[i, j]
                for k in range(n):
                    acc += a[k, i] * pa[k, j]
                for k in range(m):
                    acc -= apb[i, k] * sbpa[k, j]
                pn[i, j] = acc
        diff = 0.0
        scale = 0.0
        for i in range(n):
            for j in range(n):
                v = 0.5 * (pn[i, j] + pn[j, i])
                d = abs(v - p[i, j])
                if d > diff:
                    diff = d
                av = abs(v)
                if av > scale:
                    scale = av
                pa[i, j] = v
        for i in range(n):
            for j in range(n):
                p[i, j] = pa[i, j]
        if diff <= tol * scale:
            return p, it + 1
    return p, -1


def _dare_iteration_numpy(a, b, q, r, tol, max_iter):
    """Matrix-form fallback of the same fixed-point map (no jit)."""
    at = a.T
    bt = b.T
    p = q.copy()
    for it in range(max_iter):
        pa = p @ a
        pb = p @ b
        s = r + bt @ pb
        pn = q + at @ pa - (at @ pb) @ np.linalg.solve(s, bt @ pa)
        pn = 0.5 * (pn + pn.T)
        diff = np.abs(pn - p).max()
        scale = np.abs(pn).max()
        p = pn
        if diff <= tol * scale:
            return p, it + 1
    return p, -1


def solve_dare(
    a: np.ndarray,
    b: np.ndarray,
    q: np.ndarray,
    r: np.ndarray,
    tol: float = 1e-12,
    max_iter: int = 20_000_000,
) -> np.ndarray:
    """Stabilizing solution of the discrete algebraic Riccati equation."""
    a = np.ascontiguousarray(np.atleast_2d(np.asarray(a, dtype=float)))
    b = np.ascontiguousarray(np.atleast_2d(np.asarray(b, dtype=float)))
    q = np.ascontiguousarray(np.atleast_2d(np.asarray(q, dtype=float)))
    r = np.ascontiguousarray(np.atleast_2d(np.asarray(r, dtype=float)))
    n = a.shape[0]
    m = b.shape[1]
    if a.shape != (n, n) or b.shape != (n, m) or q.shape != (n, n) or r.shape != (m, m):
        raise ValueError("inconsistent matrix dimensions")
    if m > 2:
        raise ValueError("the solver handles at most two inputs")
    if np.any(np.diag(r) <= 0):
        raise ValueError("input weight must be positive definite")
    if np.any(np.diag(q) < 0):
        raise ValueError("state weight must be positive semidefinite")
    if JIT_ENABLED:
        p, iters = dare_iteration_kernel(a, b, q, r, tol, max_iter)
    else:
        p, iters = _dare_iteration_numpy(a, b, q, r, tol, max_iter)
    if iters < 0:
        raise RuntimeError(f"Riccati iteration did not converge within {max_iter} steps")
    return p


def compute_gain(a: np.ndarray, b: np.ndarray, r: np.ndarray, p: np.ndarray) -> np.ndarray:
    """State-feedback gain k = (r + b' p b)^-1 b' p a."""
    s = r + b.T @ p @ b
    return np.linalg.solve(s, b.T @ p @ a)


def dare_residual(a, b, q, r, p) -> float:
    """Largest element of the Riccati defect, scaled by the largest of p."""
    s = r + b.T @ p @ b
    back = a.T @ p @ a - (a.T @ p @ b) @ np.linalg.solve(s, b.T @ p @ a) + q
    return float(np.abs(p - back).max() / np.abs(p).max())


@dataclass(frozen=True)
class RegionTarget:
    """Operating point anchoring one regulator design.

    The speed is the scheduling anchor shared by both designs; the pitch,
    torque, and wind entries select where the plant is linearized.  The
    point does not need to be an exact equilibrium of the fitted rotor
    model, the integral state absorbs any residual drift.
    """

    omega: float
    pitch_deg: float
    torque: float
    wind: float


DEGREE = math.pi / 180.0  # one degree, in radians
KILONEWTON_METRE = 1e3  # one kilonewton-metre, in newton-metres


@dataclass(frozen=True)
class LqWeights:
    """Diagonal state and input weights for one regulator design.

    The diagonal entries follow the state order (speed deviation in
    rad/s, integrated speed error in rad, pitch deviation, torque
    deviation) and the input order (pitch rate, torque rate).  Each
    table carries the units its pitch and torque entries are expressed
    against: pitch_unit is the size of one pitch weight unit in radians
    and torque_unit the size of one torque weight unit in newton-metres.
    The weights are rescaled to the internal radian and newton-metre
    coordinates when a design is computed, which is what makes the two
    stock tables allocate authority so differently: the low-wind table
    prices pitch per degree and torque per kilonewton-metre, so speed
    regulation lands on the generator torque and the pitch stays glued
    to its reference, while the high-wind table prices pitch per radian,
    handing speed regulation to the pitch and keeping the torque locked
    to the power demand.
    """

    q_diag: tuple
    r_diag: tuple
    pitch_unit: float = 1.0
    torque_unit: float = 1.0

    def __post_init__(self):
        if len(self.q_diag) != 4 or len(self.r_diag) != 2:
            raise ValueError("weights must have 4 state and 2 input entries")
        if any(q < 0 for q in self.q_diag):
            raise ValueError("state weights must be nonnegative")
        if any(r <= 0 for r in self.r_diag):
            raise ValueError("input weights must be positive")
        if self.pitch_unit <= 0 or self.torque_unit <= 0:
            raise ValueError("unit scales must be positive")

    def internal_matrices(self) -> tuple:
        """Weight matrices rescaled to rad and N·m state coordinates."""
        state_units = np.array([1.0, 1.0, self.pitch_unit, self.torque_unit])
        input_units = np.array([self.pitch_unit, self.torque_unit])
        q = np.diag(np.asarray(self.q_diag, dtype=float) / state_units**2)
        r = np.diag(np.asarray(self.r_diag, dtype=float) / input_units**2)
        return q, r


LOW_WIND_TARGET = RegionTarget(omega=119.31, pitch_deg=2.65, torque=16850.0, wind=8.0)
HIGH_WIND_TARGET = RegionTarget(omega=119.31, pitch_deg=6.98, torque=25720.0, wind=10.5)
LOW_WIND_WEIGHTS = LqWeights(
    q_diag=(1e-2, 1e3, 1e3, 1e-2),
    r_diag=(5e4, 5e4),
    pitch_unit=DEGREE,
    torque_unit=KILONEWTON_METRE,
)
HIGH_WIND_WEIGHTS = LqWeights(
    q_diag=(1e-4, 10.0, 1e4, 1e6),
    r_diag=(1e6, 1e4),
    pitch_unit=1.0,
    torque_unit=KILONEWTON_METRE,
)
SWITCH_LOW_WIND = 10.0
SWITCH_HIGH_WIND = 12.0


@dataclass(frozen=True)
class LqDesign:
    """One designed regulator with its operating point and diagnostics."""

    target: RegionTarget
    lin: LinearPlantModel
    model: AugmentedModel
    q: np.ndarray
    r: np.ndarray
    p: np.ndarray
    k: np.ndarray
    closed_loop_radius: float


def design_controller(
    params: TurbineParameters,
    cp_model: CpModel,
    target: RegionTarget,
    weights: LqWeights,
) -> LqDesign:
    """Design one LQ regulator around an operating point."""
    lin = linearize(params, cp_model, target.omega, target.pitch_deg, target.wind)
    model = build_augmented(lin)
    q, r = weights.internal_matrices()
    p = solve_dare(model.a, model.b, q, r)
    k = compute_gain(model.a, model.b, r, p)
    radius = float(np.max(np.abs(np.linalg.eigvals(model.a - model.b @ k))))
    if radius >= 1.0:
        raise RuntimeError(f"closed loop is not stable (spectral radius {radius:.6f})")
    return LqDesign(
        target=target, lin=lin, model=model, q=q, r=r, p=p, k=k, closed_loop_radius=radius
    )


@dataclass
class GainSchedule:
    """Two designs scheduled over wind speed with hysteresis.

    Below switch_low the low-wind design is active, above switch_high the
    high-wind design; inside the band the previous selection is held.
    """

    low: LqDesign
    high: LqDesign
    switch_low: float = SWITCH_LOW_WIND
    switch_high: float = SWITCH_HIGH_WIND
    active: int = 0

    def __post_init__(self):
        if self.switch_low >= self.switch_high:
            raise ValueError("hysteresis thresholds out of order")
        if self.active not in (0, 1):
            raise ValueError("active design index must be 0 or 1")

    @property
    def designs(self) -> tuple:
        return (self.low, self.high)

    def select(self, wind: float) -> LqDesign:
        """Update the active design for the current wind and return it."""
        if wind < self.switch_low:
            self.active = 0
        elif wind > self.switch_high:
            self.active = 1
        return self.designs[self.active]

    def gain_stack(self) -> np.ndarray:
        """Both gain matrices stacked (2, 2, 4) for the simulation kernels."""
        return np.ascontiguousarray(np.stack([self.low.k, self.high.k]))

    def anchor_stack(self) -> np.ndarray:
        """Per design: [omega_s, pitch_s_deg, torque_s], stacked (2, 3)."""
        rows = []
        for d in self.designs:
            rows.append([d.target.omega, d.target.pitch_deg, d.target.torque])
        return np.array(rows)


def initial_design_index(wind: float, switch_high: float = SWITCH_HIGH_WIND) -> int:
    """Design selection before any hysteresis history exists."""
    return 0 if wind <= switch_high else 1


def build_gain_schedule(
    params: TurbineParameters,
    cp_model: CpModel,
    initial_wind: float,
    low_target: RegionTarget = LOW_WIND_TARGET,
    high_target: RegionTarget = HIGH_WIND_TARGET,
    low_weights: LqWeights = LOW_WIND_WEIGHTS,
    high_weights: LqWeights = HIGH_WIND_WEIGHTS,
) -> GainSchedule:
    low = design_controller(params, cp_model, low_target, low_weights)
    high = design_controller(params, cp_model, high_target, high_weights)
    return GainSchedule(low=low, high=high, active=initial_design_index(initial_wind))


@njit(cache=True)
def lq_step_kernel(
    k_mat,
    omega,
    z,
    prev_pitch_deg,
    prev_torque,
    omega_s,
    pitch_s_deg,
    torque_s,
    omega_d,
    pitch_d_deg,
    torque_d,
    ts,
    pitch_min_deg,
    pitch_max_deg,
    torque_min,
    torque_max,
    pitch_slew_deg,
    torque_slew,
):
    """One controller update: actuator commands and the new error integral.

    The actuator deviations are rebuilt from the previously applied
    commands, so saturation and design switches are absorbed without
    windup or command jumps.
    """
    x0 = omega - omega_s
    x1 = z
    x2 = (prev_pitch_deg - pitch_s_deg) * _DEG2RAD
    x3 = prev_torque - torque_s
    e0 = (omega_d - omega_s) - x0
    e1 = -x1
    e2 = (pitch_d_deg - pitch_s_deg) * _DEG2RAD - x2
    e3 = (torque_d - torque_s) - x3
    pitch_rate = k_mat[0, 0] * e0 + k_mat[0, 1] * e1 + k_mat[0, 2] * e2 + k_mat[0, 3] * e3
    torque_rate = k_mat[1, 0] * e0 + k_mat[1, 1] * e1 + k_mat[1, 2] * e2 + k_mat[1, 3] * e3
    pitch_target = prev_pitch_deg + ts * pitch_rate * _RAD2DEG
    torque_target = prev_torque + ts * torque_rate
    pitch_cmd = slew_limited(
        prev_pitch_deg, pitch_target, pitch_min_deg, pitch_max_deg, -pitch_slew_deg, pitch_slew_deg
    )
    torque_cmd = slew_limited(
        prev_torque, torque_target, torque_min, torque_max, -torque_slew, torque_slew
    )
    z_next = z + ts * (omega_d - omega)
    return pitch_cmd, torque_cmd, z_next


def lq_control_step(
    design: LqDesign,
    params: TurbineParameters,
    omega: float,
    z: float,
    prev_pitch_deg: float,
    prev_torque: float,
    omega_d: float,
    pitch_d_deg: float,
    torque_d: float,
    pitch_slew_deg: float,
    torque_slew: float,
) -> tuple:
    """Python-facing wrapper around the per-step kernel."""
    anchor = design.target
    return lq_step_kernel(
        np.ascontiguousarray(design.k),
        omega,
        z,
        prev_pitch_deg,
        prev_torque,
        anchor.omega,
        anchor.pitch_deg,
        anchor.torque,
        omega_d,
        pitch_d_deg,
        torque_d,
        params.ts,
        params.pitch_min_deg,
        params.pitch_max_deg,
        params.torque_min,
        params.torque_max,
        pitch_slew_deg,
        torque_slew,
    )
