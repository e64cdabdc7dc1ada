"""Scenario configuration files.

Scenarios are INI files whose sections mirror the turbine, controller,
wind, demand and simulation settings.  Every key has a default, so an
empty file (or no file at all) reproduces the stock setup: the default
turbine, both stock regulator designs, 10 minutes of 15 m/s wind at 9%
turbulence intensity and a constant rated power demand.  Unknown
sections or keys are rejected rather than silently ignored.
"""

from __future__ import annotations

import configparser
import dataclasses
import os
from dataclasses import dataclass

import numpy as np

from .aero import CpModel
from .baseline import BaselineConfig
from .dynamics import TurbineParameters
from .lq import HIGH_WIND_WEIGHTS, LOW_WIND_WEIGHTS, LqWeights
from .refgen import DEFAULT_PITCH_FILTER_S, DEFAULT_SPEED_FILTER_S
from .wind import DemandSpec, WindSpec


class ConfigError(ValueError):
    """A scenario file failed validation."""


CONTROLLER_CHOICES = ("lq", "baseline", "both")


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one closed-loop study needs, validated."""

    params: TurbineParameters
    cp_model: CpModel
    baseline: BaselineConfig
    low_weights: LqWeights
    high_weights: LqWeights
    wind: WindSpec | None
    wind_csv: str | None
    demand: DemandSpec
    controller: str
    trim_s: float
    speed_filter_s: float
    pitch_filter_s: float

    def __post_init__(self):
        if self.controller not in CONTROLLER_CHOICES:
            raise ConfigError(
                f"controller must be one of {CONTROLLER_CHOICES}, got {self.controller!r}"
            )
        if (self.wind is None) == (self.wind_csv is None):
            raise ConfigError("exactly one wind source (statistical or csv) required")
        if self.trim_s < 0:
            raise ConfigError("trim must be nonnegative")
        if self.speed_filter_s <= 0 or self.pitch_filter_s <= 0:
            raise ConfigError("reference filter time constants must be positive")

    def with_seed(self, seed: int) -> "ScenarioConfig":
        """Copy of this scenario with the wind seed replaced."""
        if self.wind is None:
            raise ConfigError("cannot override the seed of a CSV wind record")
        wind = dataclasses.replace(self.wind, seed=int(seed))
        return dataclasses.replace(self, wind=wind)

    def with_trim(self, trim_s: float) -> "ScenarioConfig":
        return dataclasses.replace(self, trim_s=float(trim_s))


def default_config() -> ScenarioConfig:
    """The stock scenario used when no file is given."""
    return ScenarioConfig(
        params=TurbineParameters(),
        cp_model=CpModel(),
        baseline=BaselineConfig(),
        low_weights=LOW_WIND_WEIGHTS,
        high_weights=HIGH_WIND_WEIGHTS,
        wind=WindSpec(
            mean_mps=15.0, turbulence_intensity=0.09, duration_s=600.0, seed=0
        ),
        wind_csv=None,
        demand=DemandSpec(steps=((0.0, 3.35e6),)),
        controller="lq",
        trim_s=90.0,
        speed_filter_s=DEFAULT_SPEED_FILTER_S,
        pitch_filter_s=DEFAULT_PITCH_FILTER_S,
    )


_SECTIONS = ("turbine", "cp", "baseline", "lq", "reference", "wind", "demand", "simulation")


def _floats(raw: str, name: str, count: int | None = None) -> tuple:
    try:
        vals = tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"{name}: expected comma-separated numbers, got {raw!r}") from exc
    if count is not None and len(vals) != count:
        raise ConfigError(f"{name}: expected {count} values, got {len(vals)}")
    return vals


def _build_section(cp_section, cls, name: str, **extra):
    """Instantiate a defaults dataclass from one INI section."""
    known = {f.name for f in dataclasses.fields(cls)}
    kwargs = dict(extra)
    for key, raw in cp_section.items():
        if key not in known:
            raise ConfigError(f"[{name}] unknown key {key!r}")
        try:
            kwargs[key] = float(raw)
        except ValueError as exc:
            raise ConfigError(f"[{name}] {key}: not a number: {raw!r}") from exc
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"[{name}] {exc}") from exc


def _parse_demand(section) -> DemandSpec:
    keys = set(section.keys())
    unknown = keys - {"steps", "constant"}
    if unknown:
        raise ConfigError(f"[demand] unknown keys {sorted(unknown)}")
    if "steps" in keys and "constant" in keys:
        raise ConfigError("[demand] give either steps or constant, not both")
    if "constant" in keys:
        level = float(section["constant"])
        return DemandSpec(steps=((0.0, level),))
    if "steps" in keys:
        steps = []
        for chunk in section["steps"].split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ":" not in chunk:
                raise ConfigError(f"[demand] step {chunk!r} is not time:watts")
            t, p = chunk.split(":", 1)
            steps.append((float(t), float(p)))
        if not steps:
            raise ConfigError("[demand] steps list is empty")
        return DemandSpec(steps=tuple(steps))
    return DemandSpec(steps=((0.0, 3.35e6),))


def _parse_wind(section, default_ts: float):
    keys = set(section.keys())
    if "csv" in keys:
        extra = keys - {"csv"}
        if extra:
            raise ConfigError(
                f"[wind] csv excludes statistical keys, found {sorted(extra)}"
            )
        path = section["csv"]
        if not os.path.isfile(path):
            raise ConfigError(f"[wind] csv file not found: {path}")
        return None, path
    allowed = {
        "mean_mps",
        "turbulence_intensity",
        "duration_s",
        "spectrum_tau_s",
        "seed",
        "ts",
    }
    unknown = keys - allowed
    if unknown:
        raise ConfigError(f"[wind] unknown keys {sorted(unknown)}")
    kwargs = {
        "mean_mps": 15.0,
        "turbulence_intensity": 0.09,
        "duration_s": 600.0,
        "ts": default_ts,
        "seed": 0,
    }
    for key in keys:
        raw = section[key]
        try:
            kwargs[key] = int(raw) if key == "seed" else float(raw)
        except ValueError as exc:
            raise ConfigError(f"[wind] {key}: not a number: {raw!r}") from exc
    try:
        return WindSpec(**kwargs), None
    except ValueError as exc:
        raise ConfigError(f"[wind] {exc}") from exc


def load_config(path: str | None) -> ScenarioConfig:
    """Parse and validate a scenario file; None loads the defaults."""
    base = default_config()
    if path is None:
        return base
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    unknown = set(parser.sections()) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown sections {sorted(unknown)}")

    params = base.params
    if parser.has_section("turbine"):
        params = _build_section(parser["turbine"], TurbineParameters, "turbine")

    cp_model = base.cp_model
    if parser.has_section("cp"):
        section = parser["cp"]
        unknown_keys = set(section.keys()) - {"coeffs", "lambda_min", "lambda_max"}
        if unknown_keys:
            raise ConfigError(f"[cp] unknown keys {sorted(unknown_keys)}")
        coeffs = (
            np.array(_floats(section["coeffs"], "[cp] coeffs", 15))
            if "coeffs" in section
            else base.cp_model.coeffs
        )
        lam_lo = float(section.get("lambda_min", base.cp_model.lambda_range[0]))
        lam_hi = float(section.get("lambda_max", base.cp_model.lambda_range[1]))
        try:
            cp_model = CpModel(coeffs=coeffs, lambda_range=(lam_lo, lam_hi))
        except ValueError as exc:
            raise ConfigError(f"[cp] {exc}") from exc

    baseline = base.baseline
    if parser.has_section("baseline"):
        baseline = _build_section(parser["baseline"], BaselineConfig, "baseline")

    low_w, high_w = base.low_weights, base.high_weights
    if parser.has_section("lq"):
        section = parser["lq"]
        unknown_keys = set(section.keys()) - {"q1", "r1", "q2", "r2"}
        if unknown_keys:
            raise ConfigError(f"[lq] unknown keys {sorted(unknown_keys)}")
        try:
            if "q1" in section or "r1" in section:
                low_w = dataclasses.replace(
                    low_w,
                    q_diag=_floats(section["q1"], "[lq] q1", 4) if "q1" in section else low_w.q_diag,
                    r_diag=_floats(section["r1"], "[lq] r1", 2) if "r1" in section else low_w.r_diag,
                )
            if "q2" in section or "r2" in section:
                high_w = dataclasses.replace(
                    high_w,
                    q_diag=_floats(section["q2"], "[lq] q2", 4) if "q2" in section else high_w.q_diag,
                    r_diag=_floats(section["r2"], "[lq] r2", 2) if "r2" in section else high_w.r_diag,
                )
        except ValueError as exc:
            raise ConfigError(f"[lq] {exc}") from exc

    speed_filter_s = base.speed_filter_s
    pitch_filter_s = base.pitch_filter_s
    if parser.has_section("reference"):
        section = parser["reference"]
        unknown_keys = set(section.keys()) - {"speed_filter_s", "pitch_filter_s"}
        if unknown_keys:
            raise ConfigError(f"[reference] unknown keys {sorted(unknown_keys)}")
        speed_filter_s = float(section.get("speed_filter_s", speed_filter_s))
        pitch_filter_s = float(section.get("pitch_filter_s", pitch_filter_s))

    wind, wind_csv = (base.wind, None)
    if parser.has_section("wind"):
        wind, wind_csv = _parse_wind(parser["wind"], params.ts)

    demand = base.demand
    if parser.has_section("demand"):
        demand = _parse_demand(parser["demand"])
    if demand.max_power() > params.rated_power * (1 + 1e-12):
        raise ConfigError("[demand] schedule exceeds rated power")

    controller = base.controller
    trim_s = base.trim_s
    if parser.has_section("simulation"):
        section = parser["simulation"]
        unknown_keys = set(section.keys()) - {"controller", "trim_s"}
        if unknown_keys:
            raise ConfigError(f"[simulation] unknown keys {sorted(unknown_keys)}")
        controller = section.get("controller", controller).strip().lower()
        trim_s = float(section.get("trim_s", trim_s))

    try:
        return ScenarioConfig(
            params=params,
            cp_model=cp_model,
            baseline=baseline,
            low_weights=low_w,
            high_weights=high_w,
            wind=wind,
            wind_csv=wind_csv,
            demand=demand,
            controller=controller,
            trim_s=trim_s,
            speed_filter_s=speed_filter_s,
            pitch_filter_s=pitch_filter_s,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
