"""Command-line front end.

Verbs:
  run      simulate one controller and write trace, metrics, and figures
  compare  run both controllers on identical wind and demand
  design   print and save the regulator design report
  tables   export the steady-state reference tables as CSV

Every verb takes --config (INI scenario file, defaults apply without
one), --out (artifact directory), --seed (wind seed override), and
--trim (warmup override).  Artifacts are staged in a scratch directory
and moved into place only after every file has been produced, so a
failing run leaves no partial outputs.  Set TURBINE_LQ_LOG=debug for
progress logging.
"""

from __future__ import annotations

import argparse
import logging
import os
import shutil
import sys
import tempfile

import numpy as np

from .config import ConfigError, ScenarioConfig, load_config
from .lq import GainSchedule, build_gain_schedule, dare_residual
from .refgen import build_tables, save_tables
from .sim import (
    SimResult,
    actuator_loads,
    compare_controllers,
    run_closed_loop,
)
from .wind import WindRecord, generate_wind, load_wind_csv

log = logging.getLogger("turbine_lq")


def _configure_logging() -> None:
    level_name = os.environ.get("TURBINE_LQ_LOG", "warning").strip().upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _wind_record(cfg: ScenarioConfig) -> WindRecord:
    if cfg.wind_csv is not None:
        log.info("loading wind record from %s", cfg.wind_csv)
        return load_wind_csv(cfg.wind_csv, expected_ts=cfg.params.ts)
    log.info(
        "generating wind: mean %.2f m/s, TI %.3f, %.0f s, seed %d",
        cfg.wind.mean_mps,
        cfg.wind.turbulence_intensity,
        cfg.wind.duration_s,
        cfg.wind.seed,
    )
    record = generate_wind(cfg.wind)
    if record.clipped_count:
        log.warning("wind guard band clipped %d samples", record.clipped_count)
    return record


def _schedule(cfg: ScenarioConfig, initial_wind: float) -> GainSchedule:
    return build_gain_schedule(
        cfg.params,
        cfg.cp_model,
        initial_wind=initial_wind,
        low_weights=cfg.low_weights,
        high_weights=cfg.high_weights,
    )


def _commit_artifacts(out_dir: str, writers: dict) -> list:
    """Write all artifacts to a scratch dir, then move them into place."""
    os.makedirs(out_dir, exist_ok=True)
    stage = tempfile.mkdtemp(prefix=".stage-", dir=out_dir)
    written = []
    try:
        for name, write in writers.items():
            write(os.path.join(stage, name))
        for name in writers:
            os.replace(os.path.join(stage, name), os.path.join(out_dir, name))
            written.append(os.path.join(out_dir, name))
    finally:
        shutil.rmtree(stage, ignore_errors=True)
    return written


def _write_text(path, body: str) -> None:
    with open(path, "w") as fh:
        fh.write(body)


def _write_metrics_csv(path, rows: dict) -> None:
    with open(path, "w") as fh:
        fh.write("metric, value\n")
        for key, value in rows.items():
            fh.write(f"{key}, {value!r}\n")


def _metrics_rows(result: SimResult, trim_s: float) -> dict:
    rows = dict(result.metrics.as_dict())
    loads = actuator_loads(result.trace, trim_s)
    rows["torque_del_nm"] = loads.torque_del_nm
    rows["pitch_del_deg"] = loads.pitch_del_deg
    return rows


def _switch_events(result: SimResult) -> list:
    gain = result.trace.gain_idx
    t = result.trace.t_s
    events = []
    for i in np.flatnonzero(np.diff(gain) != 0):
        events.append((float(t[i + 1]), int(gain[i]), int(gain[i + 1])))
    return events


def cmd_run(cfg: ScenarioConfig, out_dir: str) -> int:
    if cfg.controller == "both":
        raise ConfigError("controller 'both' is for the compare verb")
    wind = _wind_record(cfg)
    schedule = _schedule(cfg, wind.speed[0]) if cfg.controller == "lq" else None
    log.info("running %s controller", cfg.controller)
    result = run_closed_loop(
        cfg.params,
        cfg.cp_model,
        cfg.controller,
        wind,
        cfg.demand,
        trim_s=cfg.trim_s,
        baseline_cfg=cfg.baseline,
        schedule=schedule,
        speed_filter_s=cfg.speed_filter_s,
        pitch_filter_s=cfg.pitch_filter_s,
    )

    from . import plots

    writers = {
        "trace.csv": result.trace.to_csv,
        "metrics.csv": lambda p: _write_metrics_csv(p, _metrics_rows(result, cfg.trim_s)),
        "power_tracking.png": lambda p: plots.plot_power_tracking(result.trace, p),
        "reference_tracking.png": lambda p: plots.plot_reference_tracking(result.trace, p),
    }
    if cfg.controller == "lq":
        writers["switching.png"] = lambda p: plots.plot_switching(result.trace, p)
    written = _commit_artifacts(out_dir, writers)

    m = result.metrics
    print(f"controller          : {cfg.controller}")
    print(f"rms tracking error  : {m.rms_tracking_error_w / 1e3:.2f} kW")
    print(f"mean absolute error : {m.mean_abs_error_w / 1e3:.2f} kW")
    print(f"design switches     : {m.switch_count}")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_compare(cfg: ScenarioConfig, out_dir: str) -> int:
    wind = _wind_record(cfg)
    schedule = _schedule(cfg, wind.speed[0])
    log.info("running both controllers")
    report = compare_controllers(
        cfg.params,
        cfg.cp_model,
        wind,
        cfg.demand,
        trim_s=cfg.trim_s,
        baseline_cfg=cfg.baseline,
        schedule=schedule,
    )
    text = report.to_text()
    events = _switch_events(report.lq)
    lines = [text, "lq switch events", "----------------"]
    if events:
        for t, frm, to in events:
            lines.append(f"  t = {t:9.3f} s : design {frm} -> {to}")
    else:
        lines.append("  none")
    body = "\n".join(lines) + "\n"

    from . import plots

    writers = {
        "baseline_trace.csv": report.baseline.trace.to_csv,
        "lq_trace.csv": report.lq.trace.to_csv,
        "comparison.txt": lambda p: _write_text(p, body),
        "baseline_metrics.csv": lambda p: _write_metrics_csv(
            p, _metrics_rows(report.baseline, cfg.trim_s)
        ),
        "lq_metrics.csv": lambda p: _write_metrics_csv(
            p, _metrics_rows(report.lq, cfg.trim_s)
        ),
        "comparison.png": lambda p: plots.plot_comparison(
            report.baseline.trace, report.lq.trace, p
        ),
    }
    written = _commit_artifacts(out_dir, writers)
    print(body, end="")
    for path in written:
        print(f"wrote {path}")
    return 0


def _design_report(cfg: ScenarioConfig) -> str:
    schedule = _schedule(cfg, initial_wind=8.0)
    lines = ["regulator design report", "======================="]
    for tag, design in (("low wind", schedule.low), ("high wind", schedule.high)):
        t = design.target
        lin = design.lin
        eig = np.linalg.eigvals(design.model.a - design.model.b @ design.k)
        residual = dare_residual(
            design.model.a, design.model.b, design.q, design.r, design.p
        )
        lines.append(f"[{tag}]")
        lines.append(
            f"  anchor               : omega {t.omega} rad/s, pitch {t.pitch_deg} deg, "
            f"torque {t.torque} N*m, wind {t.wind} m/s"
        )
        lines.append(
            f"  continuous jacobian  : a {lin.a:+.6e}, b_pitch {lin.b_pitch:+.6e} per rad, "
            f"b_torque {lin.b_torque:+.6e}, f_wind {lin.f_wind:+.6e}"
        )
        ad_err = abs(lin.ad - (1.0 + lin.ts * lin.a))
        lines.append(
            f"  A_d = 1 + T_s*A_c    : {lin.ad:.12f} (identity error {ad_err:.1e})"
        )
        lines.append(f"  dare residual        : {residual:.3e} (scaled)")
        lines.append(f"  closed-loop radius   : {design.closed_loop_radius:.9f}")
        lines.append(
            "  closed-loop eigs     : "
            + ", ".join(f"{abs(v):.9f}" for v in sorted(eig, key=abs, reverse=True))
        )
        lines.append("  gain matrix K:")
        for row in design.k:
            lines.append("    " + "  ".join(f"{v:+.9e}" for v in row))
    return "\n".join(lines) + "\n"


def cmd_design(cfg: ScenarioConfig, out_dir: str) -> int:
    body = _design_report(cfg)
    written = _commit_artifacts(
        out_dir, {"design_report.txt": lambda p: _write_text(p, body)}
    )
    print(body, end="")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_tables(cfg: ScenarioConfig, out_dir: str) -> int:
    tables = build_tables(cfg.params, cfg.cp_model)
    written = _commit_artifacts(
        out_dir, {"tables.csv": lambda p: save_tables(tables, cfg.params, p)}
    )
    print(
        f"steady tables: {tables.speed.xs.size} power levels x "
        f"{tables.pitch.ys.size} wind speeds"
    )
    for path in written:
        print(f"wrote {path}")
    return 0


_COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "design": cmd_design,
    "tables": cmd_tables,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="turbine-lq",
        description="Power-tracking turbine control: simulation and design tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "simulate one controller and write artifacts"),
        ("compare", "run both controllers on the same scenario"),
        ("design", "print the regulator design report"),
        ("tables", "export steady-state reference tables"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="scenario INI file")
        p.add_argument("--out", default="out", help="artifact directory")
        p.add_argument("--seed", type=int, default=None, help="wind seed override")
        p.add_argument("--trim", type=float, default=None, help="warmup override [s]")
    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        if args.trim is not None:
            cfg = cfg.with_trim(args.trim)
        return _COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        log.debug("failure detail", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
