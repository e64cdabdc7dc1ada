"""Compare the compiled kernels against the pure-Python fallback.

Runs the same workloads twice in child interpreters, once with numba
enabled and once with TURBINE_LQ_DISABLE_JIT=1, and prints both result
tables.  Invoke with --mode current to benchmark only the interpreter
you are in.

Usage:
    python3 benchmarks/bench_modes.py            # both modes, side by side
    python3 benchmarks/bench_modes.py --mode current
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def _bench_closed_loop(controller: str, duration_s: float) -> tuple:
    from turbine_lq.aero import CpModel
    from turbine_lq.dynamics import TurbineParameters
    from turbine_lq.refgen import build_tables
    from turbine_lq.sim import run_closed_loop
    from turbine_lq.wind import DemandSpec, WindSpec, generate_wind

    params = TurbineParameters()
    cp = CpModel()
    tables = build_tables(params, cp)
    demand = DemandSpec(((0.0, 3.35e6),))
    warmup = generate_wind(WindSpec(11.0, 0.09, 1.0, seed=0))
    run_closed_loop(params, cp, controller, warmup, demand, tables=tables)

    wind = generate_wind(WindSpec(11.0, 0.09, duration_s, seed=1))
    t0 = time.perf_counter()
    res = run_closed_loop(params, cp, controller, wind, demand, tables=tables)
    elapsed = time.perf_counter() - t0
    return res.trace.n, elapsed


def _bench_rainflow(n_samples: int) -> tuple:
    from turbine_lq.loads import count_cycles

    rng = np.random.default_rng(4)
    signal = np.cumsum(rng.normal(size=n_samples))
    count_cycles(signal[:1000])  # warmup
    t0 = time.perf_counter()
    cycles = count_cycles(signal)
    elapsed = time.perf_counter() - t0
    return cycles.ranges.size, elapsed


def _bench_dare() -> float:
    from turbine_lq.aero import CpModel
    from turbine_lq.dynamics import TurbineParameters
    from turbine_lq.lq import build_gain_schedule

    params = TurbineParameters()
    cp = CpModel()
    build_gain_schedule(params, cp, initial_wind=8.0)  # warmup
    t0 = time.perf_counter()
    build_gain_schedule(params, cp, initial_wind=8.0)
    return time.perf_counter() - t0


def run_current_mode(duration_s: float, rainflow_samples: int) -> None:
    from turbine_lq._numba import JIT_ENABLED

    mode = "jit" if JIT_ENABLED else "fallback"
    print(f"mode: {mode}")

    for controller in ("baseline", "lq"):
        steps, elapsed = _bench_closed_loop(controller, duration_s)
        rate = steps / elapsed
        print(
            f"  closed loop [{controller:8s}]: {steps:7d} steps in "
            f"{elapsed * 1e3:9.1f} ms  ({rate:12.0f} steps/s)"
        )

    n_cycles, elapsed = _bench_rainflow(rainflow_samples)
    print(
        f"  rainflow    [{rainflow_samples} pts]: {n_cycles:7d} cycles in "
        f"{elapsed * 1e3:9.1f} ms"
    )

    elapsed = _bench_dare()
    print(f"  regulator design (two Riccati solves): {elapsed * 1e3:9.1f} ms")


def run_both_modes(duration_s: float, rainflow_samples: int) -> int:
    base_cmd = [
        sys.executable,
        os.path.abspath(__file__),
        "--mode",
        "current",
        "--duration",
        str(duration_s),
        "--rainflow-samples",
        str(rainflow_samples),
    ]
    for disable in ("", "1"):
        env = os.environ.copy()
        if disable:
            env["TURBINE_LQ_DISABLE_JIT"] = disable
        else:
            env.pop("TURBINE_LQ_DISABLE_JIT", None)
        proc = subprocess.run(base_cmd, env=env)
        if proc.returncode != 0:
            return proc.returncode
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--mode",
        choices=("both", "current"),
        default="both",
        help="'both' spawns one child per mode; 'current' benchmarks in place",
    )
    parser.add_argument("--duration", type=float, default=60.0, help="sim length [s]")
    parser.add_argument(
        "--rainflow-samples", type=int, default=200_000, help="rainflow signal length"
    )
    args = parser.parse_args(argv)

    if args.mode == "current":
        run_current_mode(args.duration, args.rainflow_samples)
        return 0
    return run_both_modes(args.duration, args.rainflow_samples)


if __name__ == "__main__":
    sys.exit(main())
