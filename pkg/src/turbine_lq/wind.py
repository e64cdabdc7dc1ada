"""Synthetic wind records and power demand schedules.

Wind is modeled as a first-order colored-noise process around a constant
mean.  After generation the record is rescaled to hit the requested mean
and turbulence intensity exactly in sample statistics, then clipped to a
physical guard band.  Demand schedules are piecewise constant in time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter


@dataclass(frozen=True)
class WindSpec:
    """Statistical description of a wind record."""

    mean_mps: float
    turbulence_intensity: float
    duration_s: float
    ts: float = 0.004
    spectrum_tau_s: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.mean_mps <= 0:
            raise ValueError("mean wind speed must be positive")
        if not 0.0 <= self.turbulence_intensity <= 0.5:
            raise ValueError("turbulence intensity must lie in [0, 0.5]")
        if self.duration_s <= 0 or self.ts <= 0:
            raise ValueError("duration and sample time must be positive")
        if self.spectrum_tau_s <= 0:
            raise ValueError("spectrum time constant must be positive")


@dataclass(frozen=True)
class WindRecord:
    """Sampled wind speed on a uniform time grid."""

    time: np.ndarray
    speed: np.ndarray
    clipped_count: int = 0

    def __post_init__(self):
        time = np.asarray(self.time, dtype=float)
        speed = np.asarray(self.speed, dtype=float)
        if time.shape != speed.shape or time.ndim != 1 or time.size < 2:
            raise ValueError("time and speed must be matching 1-d arrays")
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "speed", speed)

    @property
    def ts(self) -> float:
        return float(self.time[1] - self.time[0])


def generate_wind(spec: WindSpec) -> WindRecord:
    """Draw one wind record with the requested sample statistics.

    The colored-noise shaping gives the record its low-frequency
    character; the subsequent rescale makes the sample mean and sample
    standard deviation match WindSpec exactly, so statistical
    postconditions hold for every seed.  A guard band of 0.5 to 1.5
    times the mean is enforced afterwards and the number of clipped
    samples is reported on the record.
    """
    n = int(round(spec.duration_s / spec.ts))
    if n < 2:
        raise ValueError("record too short")
    time = np.arange(n) * spec.ts
    a = np.exp(-spec.ts / spec.spectrum_tau_s)
    rng = np.random.default_rng(spec.seed)
    noise = rng.standard_normal(n)
    sigma = spec.turbulence_intensity * spec.mean_mps
    x = lfilter([np.sqrt(1.0 - a * a)], [1.0, -a], noise)
    x = x - x.mean()
    sd = x.std()
    if sigma > 0 and sd > 0:
        x *= sigma / sd
    else:
        x[:] = 0.0
    speed = spec.mean_mps + x
    lo = 0.5 * spec.mean_mps
    hi = 1.5 * spec.mean_mps
    clipped = int(np.count_nonzero((speed < lo) | (speed > hi)))
    speed = np.clip(speed, lo, hi)
    return WindRecord(time=time, speed=speed, clipped_count=clipped)


def constant_wind(mean_mps: float, duration_s: float, ts: float = 0.004) -> WindRecord:
    """Turbulence-free record at a fixed speed."""
    spec = WindSpec(mean_mps=mean_mps, turbulence_intensity=0.0, duration_s=duration_s, ts=ts)
    return generate_wind(spec)


def ramp_wind(
    start_mps: float,
    waypoints: tuple,
    duration_s: float,
    ts: float = 0.004,
) -> WindRecord:
    """Piecewise-linear wind profile through (time, speed) waypoints.

    The profile starts at start_mps at t = 0 and interpolates linearly
    through the waypoints, holding the last value to the end.
    """
    if start_mps <= 0:
        raise ValueError("start speed must be positive")
    times = [0.0]
    speeds = [start_mps]
    for t, v in waypoints:
        if t <= times[-1]:
            raise ValueError("waypoint times must increase")
        if v <= 0:
            raise ValueError("waypoint speeds must be positive")
        times.append(float(t))
        speeds.append(float(v))
    n = int(round(duration_s / ts))
    time = np.arange(n) * ts
    speed = np.interp(time, times, speeds)
    return WindRecord(time=time, speed=speed)


def load_wind_csv(path, expected_ts: float | None = None) -> WindRecord:
    """Read a wind record from CSV with columns time_s, wind_mps.

    The grid must be uniform; if expected_ts is given it must match the
    grid spacing to within 1e-9 s.  No resampling is done.
    """
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names or ()
    for col in ("time_s", "wind_mps"):
        if col not in names:
            raise ValueError(f"wind CSV missing column {col!r}")
    time = np.atleast_1d(np.asarray(data["time_s"], dtype=float))
    speed = np.atleast_1d(np.asarray(data["wind_mps"], dtype=float))
    if time.size < 2:
        raise ValueError("wind CSV needs at least two samples")
    steps = np.diff(time)
    if np.abs(steps - steps[0]).max() > 1e-9:
        raise ValueError("wind CSV time grid is not uniform")
    if expected_ts is not None and abs(steps[0] - expected_ts) > 1e-9:
        raise ValueError(
            f"wind CSV sample time {steps[0]!r} does not match expected {expected_ts!r}"
        )
    if np.any(speed <= 0):
        raise ValueError("wind CSV contains non-positive speeds")
    return WindRecord(time=time, speed=speed)


def save_wind_csv(record: WindRecord, path) -> None:
    with open(path, "w") as fh:
        fh.write("time_s, wind_mps\n")
        for t, v in zip(record.time, record.speed):
            fh.write(f"{float(t)!r}, {float(v)!r}\n")


@dataclass(frozen=True)
class DemandSpec:
    """Piecewise-constant power demand: ((t0, p0), (t1, p1), ...).

    The first entry must start at t = 0; each later entry takes effect at
    its own time and holds until the next one.
    """

    steps: tuple

    def __post_init__(self):
        steps = tuple((float(t), float(p)) for t, p in self.steps)
        if not steps:
            raise ValueError("demand schedule needs at least one step")
        if steps[0][0] != 0.0:
            raise ValueError("first demand step must start at t = 0")
        times = [t for t, _ in steps]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("demand step times must be strictly increasing")
        if any(p <= 0 for _, p in steps):
            raise ValueError("demanded powers must be positive")
        object.__setattr__(self, "steps", steps)

    def max_power(self) -> float:
        return max(p for _, p in self.steps)

    def power_at(self, t: float) -> float:
        power = self.steps[0][1]
        for t0, p in self.steps:
            if t >= t0:
                power = p
            else:
                break
        return power


def demand_series(spec: DemandSpec, time: np.ndarray) -> np.ndarray:
    """Sample the demand schedule on a time grid."""
    time = np.asarray(time, dtype=float)
    times = np.array([t for t, _ in spec.steps])
    powers = np.array([p for _, p in spec.steps])
    idx = np.searchsorted(times, time, side="right") - 1
    idx = np.clip(idx, 0, len(powers) - 1)
    return powers[idx]
