"""Fatigue load analysis: turning points, rainflow counting, equivalent loads.

The counter is the four-point stack algorithm: whenever the middle range
of the last four turning points is enclosed by its neighbours, one full
cycle is extracted and the two middle points are removed.  Points left on
the stack at the end are paired into half cycles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._numba import njit

DEFAULT_TORQUE_EXPONENT = 4.0
DEFAULT_PITCH_EXPONENT = 10.0


def turning_points(signal: np.ndarray) -> np.ndarray:
    """Local extrema of a signal including both endpoints.

    Repeated values are collapsed first so plateaus cannot generate
    spurious reversals.
    """
    x = np.asarray(signal, dtype=float).ravel()
    if x.size == 0:
        return x.copy()
    keep = np.ones(x.size, dtype=bool)
    keep[1:] = np.diff(x) != 0.0
    x = x[keep]
    if x.size < 3:
        return x.copy()
    d = np.diff(x)
    extrema = np.sign(d[:-1]) != np.sign(d[1:])
    mask = np.ones(x.size, dtype=bool)
    mask[1:-1] = extrema
    return x[mask]


@njit(cache=True)
def rainflow_kernel(points):
    """Four-point rainflow on a turning-point sequence.

    Returns (ranges, means, counts) where counts are 1.0 for full cycles
    and 0.5 for the residual half cycles.
    """
    n = points.size
    ranges = np.empty(n, dtype=np.float64)
    means = np.empty(n, dtype=np.float64)
    counts = np.empty(n, dtype=np.float64)
    out = 0
    stack = np.empty(n, dtype=np.float64)
    top = 0
    for idx in range(n):
        stack[top] = points[idx]
        top += 1
        while top >= 4:
            s0 = stack[top - 4]
            s1 = stack[top - 3]
            s2 = stack[top - 2]
            s3 = stack[top - 1]
            r1 = abs(s1 - s0)
            r2 = abs(s2 - s1)
            r3 = abs(s3 - s2)
            if r2 <= r1 and r2 <= r3:
                if r2 > 0.0:
                    ranges[out] = r2
                    means[out] = 0.5 * (s1 + s2)
                    counts[out] = 1.0
                    out += 1
                stack[top - 3] = s3
                top -= 2
            else:
                break
    for i in range(top - 1):
        r = abs(stack[i + 1] - stack[i])
        if r > 0.0:
            ranges[out] = r
            means[out] = 0.5 * (stack[i] + stack[i + 1])
            counts[out] = 0.5
            out += 1
    return ranges[:out].copy(), means[:out].copy(), counts[:out].copy()


@dataclass(frozen=True)
class CycleSet:
    """Counted load cycles: range, mean and count per entry."""

    ranges: np.ndarray
    means: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.ranges, dtype=float).ravel()
        m = np.asarray(self.means, dtype=float).ravel()
        c = np.asarray(self.counts, dtype=float).ravel()
        if not (r.size == m.size == c.size):
            raise ValueError("cycle arrays must have equal lengths")
        object.__setattr__(self, "ranges", r)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "counts", c)

    @property
    def total_count(self) -> float:
        return float(self.counts.sum())


def count_cycles(signal: np.ndarray) -> CycleSet:
    """Rainflow-count a raw signal."""
    pts = turning_points(signal)
    if pts.size < 2:
        empty = np.empty(0)
        return CycleSet(ranges=empty, means=empty.copy(), counts=empty.copy())
    ranges, means, counts = rainflow_kernel(np.ascontiguousarray(pts))
    return CycleSet(ranges=ranges, means=means, counts=counts)


def damage_equivalent_load(
    cycles: CycleSet, exponent: float, reference_count: float
) -> float:
    """Constant-range load with the same fatigue damage as the cycle set.

    Uses the inverse-power damage rule with the given Woehler exponent and
    a reference number of cycles (commonly the record length in seconds
    for a 1 Hz equivalent).
    """
    if exponent <= 0:
        raise ValueError("Woehler exponent must be positive")
    if reference_count <= 0:
        raise ValueError("reference cycle count must be positive")
    if cycles.ranges.size == 0:
        return 0.0
    damage = float(np.sum(cycles.counts * cycles.ranges**exponent))
    return (damage / reference_count) ** (1.0 / exponent)


def save_cycles_csv(cycles: CycleSet, path) -> None:
    with open(path, "w") as fh:
        fh.write("range, mean, count\n")
        for r, m, c in zip(cycles.ranges, cycles.means, cycles.counts):
            fh.write(f"{float(r)!r}, {float(m)!r}, {float(c)!r}\n")


def load_cycles_csv(path) -> CycleSet:
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names or ()
    for col in ("range", "mean", "count"):
        if col not in names:
            raise ValueError(f"cycle CSV missing column {col!r}")
    return CycleSet(
        ranges=np.atleast_1d(data["range"]),
        means=np.atleast_1d(data["mean"]),
        counts=np.atleast_1d(data["count"]),
    )
