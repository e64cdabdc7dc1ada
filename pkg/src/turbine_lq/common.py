"""Scalar operators shared by both controllers.

Saturation, slew-limited command updates, first-order lowpass filters and
clamped linear-interpolation lookup tables.  The raw kernels operate on
plain floats/arrays so the simulation loops can call them when compiled;
the wrappers add validation and friendly containers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._numba import njit


@dataclass(frozen=True)
class Interval:
    """Closed interval [lower, upper] with lower < upper enforced."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"invalid interval: [{self.lower}, {self.upper}]")

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


@njit(cache=True)
def saturate(x, lower, upper):
    if x <= lower:
        return lower
    if x >= upper:
        return upper
    return x


def sat(x: float, bounds: Interval) -> float:
    """Clamp x into the interval."""
    return float(saturate(x, bounds.lower, bounds.upper))


@njit(cache=True)
def slew_limited(prev, desired, lo, hi, step_lo, step_hi):
    # value saturation first, then per-step delta saturation; the final
    # saturate guards against prev + (target - prev) rounding one ulp
    # outside the value bounds
    target = saturate(desired, lo, hi)
    return saturate(prev + saturate(target - prev, step_lo, step_hi), lo, hi)


def rate_limited_update(
    prev: float, desired: float, value_bounds: Interval, step_bounds: Interval
) -> float:
    """One actuator update: prev + sat(sat(desired, value) - prev, step).

    ``prev`` is expected to already lie within ``value_bounds``; the result
    then stays within them and moves by at most one step bound.
    """
    return float(
        slew_limited(
            prev,
            desired,
            value_bounds.lower,
            value_bounds.upper,
            step_bounds.lower,
            step_bounds.upper,
        )
    )


def make_alpha(ts: float, t_filter: float, convention: str = "minus") -> float:
    """Smoothing constant of a discrete first-order lowpass.

    Two conventions are in use by the controllers and kept distinct on
    purpose: "minus" gives Ts/(T - Ts) (requires T > 2*Ts so alpha < 1),
    "plus" gives Ts/(T + Ts).
    """
    if ts <= 0 or t_filter <= 0:
        raise ValueError("ts and t_filter must be positive")
    if convention == "minus":
        if t_filter <= 2 * ts:
            raise ValueError(f"'minus' convention needs T > 2*Ts, got T={t_filter}")
        return ts / (t_filter - ts)
    if convention == "plus":
        return ts / (t_filter + ts)
    raise ValueError(f"unknown convention {convention!r}")


@dataclass
class LowpassState:
    """First-order filter y(k) = (1-a)*y(k-1) + a*u(k), seeded by the first input."""

    alpha: float
    last_output: float = 0.0
    initialized: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")


def lowpass_step(state: LowpassState, u: float) -> float:
    if not state.initialized:
        state.initialized = True
        state.last_output = float(u)
        return float(u)
    y = (1.0 - state.alpha) * state.last_output + state.alpha * u
    state.last_output = float(y)
    return float(y)


@njit(cache=True)
def lowpass_kernel(prev, u, alpha, initialized):
    # returns the new output; callers track the initialized flag
    if initialized == 0.0:
        return u
    return (1.0 - alpha) * prev + alpha * u


def _check_grid(xs: np.ndarray, name: str) -> None:
    if xs.ndim != 1 or xs.size < 2:
        raise ValueError(f"{name} must be 1-D with at least 2 nodes")
    if not np.all(np.diff(xs) > 0):
        raise ValueError(f"{name} must be strictly increasing")


@dataclass(frozen=True)
class Table1D:
    """Clamped linear interpolation on a strictly increasing grid."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xs", np.asarray(self.xs, dtype=float))
        object.__setattr__(self, "ys", np.asarray(self.ys, dtype=float))
        _check_grid(self.xs, "xs")
        if self.ys.shape != self.xs.shape:
            raise ValueError("xs and ys must have matching shapes")


@dataclass(frozen=True)
class Table2D:
    """Bilinear interpolation with edge clamping on a rectangular grid."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # shape (len(xs), len(ys))

    def __post_init__(self):
        object.__setattr__(self, "xs", np.asarray(self.xs, dtype=float))
        object.__setattr__(self, "ys", np.asarray(self.ys, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        _check_grid(self.xs, "xs")
        _check_grid(self.ys, "ys")
        if self.values.shape != (self.xs.size, self.ys.size):
            raise ValueError("values shape must be (len(xs), len(ys))")


@njit(cache=True)
def lut1_kernel(xs, ys, x):
    n = xs.shape[0]
    if x <= xs[0]:
        return ys[0]
    if x >= xs[n - 1]:
        return ys[n - 1]
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xs[mid] <= x:
            lo = mid
        else:
            hi = mid
    w = (x - xs[lo]) / (xs[lo + 1] - xs[lo])
    return (1.0 - w) * ys[lo] + w * ys[lo + 1]


@njit(cache=True)
def _bracket(xs, x):
    n = xs.shape[0]
    if x <= xs[0]:
        return 0, 0.0
    if x >= xs[n - 1]:
        return n - 2, 1.0
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xs[mid] <= x:
            lo = mid
        else:
            hi = mid
    return lo, (x - xs[lo]) / (xs[lo + 1] - xs[lo])


@njit(cache=True)
def lut2_kernel(xs, ys, values, x, y):
    i, wx = _bracket(xs, x)
    j, wy = _bracket(ys, y)
    v00 = values[i, j]
    v10 = values[i + 1, j]
    v01 = values[i, j + 1]
    v11 = values[i + 1, j + 1]
    return (
        (1.0 - wx) * (1.0 - wy) * v00
        + wx * (1.0 - wy) * v10
        + (1.0 - wx) * wy * v01
        + wx * wy * v11
    )


def lut1(table: Table1D, x: float) -> float:
    """Interpolate, clamping x to the grid range."""
    return float(lut1_kernel(table.xs, table.ys, x))


def lut2(table: Table2D, x: float, y: float) -> float:
    """Bilinear interpolation, clamping the query to the grid edges."""
    return float(lut2_kernel(table.xs, table.ys, table.values, x, y))
