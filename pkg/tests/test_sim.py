"""Unit tests for the closed-loop simulation, metrics and loads reporting."""

import numpy as np
import pytest

from turbine_lq.sim import (
    TRACE_COLUMNS,
    Metrics,
    SimTrace,
    actuator_loads,
    compare_controllers,
    compute_metrics,
    rms_error,
    run_closed_loop,
)
from turbine_lq.wind import DemandSpec, WindSpec, constant_wind, generate_wind

RATED_DEMAND = DemandSpec(steps=((0.0, 3.35e6),))
PART_DEMAND = DemandSpec(steps=((0.0, 2.2e6),))


def _tiny_trace():
    """Four-sample trace with hand-computable metrics."""
    t = np.array([0.0, 1.0, 2.0, 3.0])
    zeros = np.zeros(4)
    return SimTrace(
        t_s=t,
        wind_mps=np.full(4, 10.0),
        p_demand_w=np.array([2.0e6, 2.0e6, 2.0e6, 2.0e6]),
        omega_radps=np.full(4, 100.0),
        pitch_deg=np.array([2.0, 2.5, 2.25, 2.25]),
        torque_nm=np.array([20000.0, 21000.0, 20500.0, 20500.0]),
        p_e_w=np.array([2.0e6, 2.1e6, 1.9e6, 2.0e6]),
        omega_ref_radps=np.full(4, 100.0),
        pitch_ref_deg=np.full(4, 2.0),
        torque_ref_nm=np.full(4, 20000.0),
        gain_idx=np.array([0.0, 0.0, 1.0, 1.0]),
    )


class TestMetrics:
    def test_hand_computed(self):
        m = compute_metrics(_tiny_trace())
        # errors: 0, +1e5, -1e5, 0
        assert m.rms_tracking_error_w == pytest.approx(np.sqrt(2e10 / 4.0), rel=1e-12)
        assert m.mean_abs_error_w == pytest.approx(5e4, rel=1e-12)
        assert m.pitch_travel_deg == pytest.approx(0.75, rel=1e-12)
        assert m.torque_travel_nm == pytest.approx(1500.0, rel=1e-12)
        assert m.switch_count == 1

    def test_trim_drops_early_samples(self):
        m = compute_metrics(_tiny_trace(), trim_s=1.5)
        # remaining errors: -1e5, 0
        assert m.rms_tracking_error_w == pytest.approx(np.sqrt(1e10 / 2.0), rel=1e-12)
        assert m.switch_count == 1  # switch at t=2 survives the trim

    def test_rms_error_shortcut(self):
        tr = _tiny_trace()
        assert rms_error(tr) == compute_metrics(tr).rms_tracking_error_w

    def test_as_dict_keys(self):
        d = compute_metrics(_tiny_trace()).as_dict()
        assert set(d) == {
            "rms_tracking_error_w",
            "mean_abs_error_w",
            "pitch_travel_deg",
            "torque_travel_nm",
            "switch_count",
        }


class TestTraceCsv:
    def test_roundtrip_exact(self, tmp_path):
        tr = _tiny_trace()
        path = tmp_path / "trace.csv"
        tr.to_csv(path)
        back = SimTrace.from_csv(path)
        for col in TRACE_COLUMNS:
            assert np.array_equal(getattr(back, col), getattr(tr, col))

    def test_header(self, tmp_path):
        path = tmp_path / "trace.csv"
        _tiny_trace().to_csv(path)
        header = open(path).readline().strip()
        assert header.replace(" ", "") == ",".join(TRACE_COLUMNS)


class TestActuatorLoads:
    def test_hand_computed(self):
        tr = _tiny_trace()
        loads = actuator_loads(tr, trim_s=0.0)
        # torque turning points: 20000, 21000, 20500 -> two half cycles
        # of ranges 1000 and 500; record spans 3 s of reference cycles
        expect_t = ((0.5 * 1000.0**4 + 0.5 * 500.0**4) / 4.0) ** 0.25
        assert loads.torque_del_nm == pytest.approx(expect_t, rel=1e-12)
        expect_p = ((0.5 * 0.5**10 + 0.5 * 0.25**10) / 4.0) ** 0.1
        assert loads.pitch_del_deg == pytest.approx(expect_p, rel=1e-12)


class TestClosedLoop:
    @pytest.mark.parametrize("controller", ["baseline", "lq"])
    def test_short_run_invariants(self, params, cp, tables, schedule, controller):
        wind = generate_wind(WindSpec(11.0, 0.08, 20.0, seed=2))
        res = run_closed_loop(
            params,
            cp,
            controller,
            wind,
            PART_DEMAND,
            schedule=schedule,
            tables=tables,
        )
        tr = res.trace
        assert res.controller == controller
        assert tr.n == wind.speed.size
        assert np.array_equal(tr.t_s, wind.time)
        assert np.array_equal(tr.wind_mps, wind.speed)
        assert np.all(tr.p_demand_w == 2.2e6)
        assert np.all(tr.omega_radps > 0)
        assert np.all(tr.pitch_deg >= params.pitch_min_deg - 1e-12)
        assert np.all(tr.pitch_deg <= params.pitch_max_deg + 1e-12)
        assert np.all(tr.torque_nm >= params.torque_min - 1e-12)
        assert np.all(tr.torque_nm <= params.torque_max + 1e-12)
        assert np.allclose(
            tr.p_e_w, params.efficiency * tr.omega_radps * tr.torque_nm, rtol=1e-12
        )
        if controller == "lq":
            assert set(np.unique(tr.gain_idx)) <= {0.0, 1.0}
        else:
            assert np.all(tr.gain_idx == -1.0)  # no schedule in play

    def test_commands_respect_slew_bounds(self, params, cp, tables, schedule):
        wind = generate_wind(WindSpec(11.0, 0.1, 20.0, seed=7))
        res = run_closed_loop(
            params, cp, "lq", wind, RATED_DEMAND, schedule=schedule, tables=tables
        )
        dp = np.abs(np.diff(res.trace.pitch_deg))
        dt = np.abs(np.diff(res.trace.torque_nm))
        assert dp.max() <= params.pitch_slew_deg_per_step + 1e-9
        assert dt.max() <= params.torque_slew_per_step + 1e-9

    def test_deterministic(self, params, cp, tables, schedule):
        wind = generate_wind(WindSpec(9.0, 0.09, 10.0, seed=4))
        a = run_closed_loop(
            params, cp, "lq", wind, PART_DEMAND, schedule=schedule, tables=tables
        )
        b = run_closed_loop(
            params, cp, "lq", wind, PART_DEMAND, schedule=schedule, tables=tables
        )
        for col in TRACE_COLUMNS:
            assert np.array_equal(getattr(a.trace, col), getattr(b.trace, col))

    def test_starts_from_steady_point(self, params, cp, tables, schedule):
        wind = constant_wind(15.0, 30.0)
        res = run_closed_loop(
            params, cp, "lq", wind, RATED_DEMAND, schedule=schedule, tables=tables
        )
        # constant wind above rated with rated demand: the plant should
        # hold power close to demand from the start, no big transient
        err = np.abs(res.trace.p_e_w - 3.35e6)
        assert err.max() < 0.05 * 3.35e6

    def test_validation(self, params, cp, tables, schedule):
        wind = constant_wind(10.0, 5.0)
        with pytest.raises(ValueError):
            run_closed_loop(params, cp, "pid", wind, PART_DEMAND, tables=tables)
        over = DemandSpec(steps=((0.0, 3.4e6),))
        with pytest.raises(ValueError):
            run_closed_loop(params, cp, "lq", wind, over, schedule=schedule, tables=tables)
        slow = constant_wind(10.0, 5.0, ts=0.01)
        with pytest.raises(ValueError):
            run_closed_loop(params, cp, "lq", slow, PART_DEMAND, schedule=schedule, tables=tables)


class TestComparison:
    def test_report_includes_del_proxies_for_both(self, params, cp, tables, schedule):
        wind = generate_wind(WindSpec(11.0, 0.08, 20.0, seed=8))
        report = compare_controllers(
            params, cp, wind, PART_DEMAND, trim_s=2.0, schedule=schedule, tables=tables
        )
        text = report.to_text()
        assert report.baseline.controller == "baseline"
        assert report.lq.controller == "lq"
        assert report.baseline_loads.torque_del_nm > 0
        assert report.lq_loads.torque_del_nm > 0
        assert report.baseline_loads.pitch_del_deg >= 0
        assert report.lq_loads.pitch_del_deg >= 0
        assert text.count("torque DEL") >= 2
        assert text.count("pitch DEL") >= 2
        assert "baseline" in text and "lq" in text
