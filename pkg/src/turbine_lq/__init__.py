"""Power-tracking control toolkit for a one-state wind turbine model.

The package provides the rotor/drivetrain model and its linearization,
a gain-scheduled industry-style baseline controller, a multivariable
LQ tracking regulator with hysteresis gain switching, reference
generation from steady-state tables, turbulent wind and power-demand
scenario tools, a closed-loop simulation harness, and rainflow-based
fatigue load proxies.
"""

from ._numba import JIT_ENABLED
from .aero import (
    BETZ_LIMIT,
    DEFAULT_CP_COEFFS,
    CpModel,
    RotorGeometry,
    cp_argmax_speed,
    cp_eval,
    cp_eval_exponential,
    fit_cp_model,
    rotor_torque,
    tip_speed_ratio,
    wind_power,
)
from .baseline import BaselineConfig, BaselineController
from .common import Interval, LowpassState, Table1D, Table2D, lowpass_step, lut1, lut2, make_alpha, rate_limited_update, sat
from .config import ConfigError, ScenarioConfig, default_config, load_config
from .dynamics import (
    Equilibrium,
    LinearPlantModel,
    TurbineParameters,
    electrical_power,
    find_equilibrium,
    integrate_step,
    linearize,
    plant_rhs,
)
from .loads import CycleSet, count_cycles, damage_equivalent_load, turning_points
from .lq import (
    HIGH_WIND_TARGET,
    HIGH_WIND_WEIGHTS,
    LOW_WIND_TARGET,
    LOW_WIND_WEIGHTS,
    SWITCH_HIGH_WIND,
    SWITCH_LOW_WIND,
    GainSchedule,
    LqDesign,
    LqWeights,
    RegionTarget,
    build_gain_schedule,
    compute_gain,
    dare_residual,
    design_controller,
    solve_dare,
)
from .refgen import (
    ReferenceGenerator,
    SteadyStateTables,
    build_tables,
    load_tables,
    region2_constant,
    save_tables,
    steady_operating_point,
)
from .sim import (
    ComparisonReport,
    LoadsSummary,
    Metrics,
    SimResult,
    SimTrace,
    actuator_loads,
    compare_controllers,
    compute_metrics,
    run_closed_loop,
)
from .wind import (
    DemandSpec,
    WindRecord,
    WindSpec,
    constant_wind,
    demand_series,
    generate_wind,
    load_wind_csv,
    ramp_wind,
    save_wind_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BETZ_LIMIT",
    "BaselineConfig",
    "BaselineController",
    "ComparisonReport",
    "ConfigError",
    "CpModel",
    "CycleSet",
    "DEFAULT_CP_COEFFS",
    "DemandSpec",
    "Equilibrium",
    "GainSchedule",
    "HIGH_WIND_TARGET",
    "HIGH_WIND_WEIGHTS",
    "Interval",
    "JIT_ENABLED",
    "LOW_WIND_TARGET",
    "LOW_WIND_WEIGHTS",
    "LinearPlantModel",
    "LoadsSummary",
    "LowpassState",
    "LqDesign",
    "LqWeights",
    "Metrics",
    "ReferenceGenerator",
    "RegionTarget",
    "RotorGeometry",
    "SWITCH_HIGH_WIND",
    "SWITCH_LOW_WIND",
    "ScenarioConfig",
    "SimResult",
    "SimTrace",
    "SteadyStateTables",
    "Table1D",
    "Table2D",
    "TurbineParameters",
    "WindRecord",
    "WindSpec",
    "actuator_loads",
    "build_gain_schedule",
    "build_tables",
    "compare_controllers",
    "compute_gain",
    "compute_metrics",
    "constant_wind",
    "count_cycles",
    "cp_argmax_speed",
    "cp_eval",
    "cp_eval_exponential",
    "damage_equivalent_load",
    "dare_residual",
    "default_config",
    "demand_series",
    "design_controller",
    "electrical_power",
    "find_equilibrium",
    "fit_cp_model",
    "generate_wind",
    "integrate_step",
    "linearize",
    "load_config",
    "load_tables",
    "load_wind_csv",
    "lowpass_step",
    "lut1",
    "lut2",
    "make_alpha",
    "plant_rhs",
    "ramp_wind",
    "rate_limited_update",
    "region2_constant",
    "rotor_torque",
    "run_closed_loop",
    "sat",
    "save_tables",
    "save_wind_csv",
    "solve_dare",
    "steady_operating_point",
    "tip_speed_ratio",
    "turning_points",
    "wind_power",
]
