"""Unit tests for steady-state tables and the filtered reference generator."""

import numpy as np
import pytest

from turbine_lq.aero import argmax_lambda_kernel, cp_eval, wind_power
from turbine_lq.common import lut1, lut2
from turbine_lq.dynamics import electrical_power, plant_rhs
from turbine_lq.refgen import (
    ReferenceGenerator,
    build_tables,
    load_tables,
    locus_speed,
    region2_constant,
    save_tables,
    steady_operating_point,
)

K_M = 1.56885665817154


class TestRegion2Constant:
    def test_pinned(self, params, cp):
        assert region2_constant(params, cp) == pytest.approx(K_M, rel=1e-10)

    def test_formula(self, params, cp):
        # torque coefficient of the peak-Cp locus: with lambda held at the
        # optimum, aero power is cubic in speed and torque quadratic
        lam_star = float(
            argmax_lambda_kernel(cp.coeffs, params.pitch_min_deg, *cp.lambda_range)
        )
        cp_star = cp_eval(cp, lam_star, params.pitch_min_deg)
        area = 0.5 * params.air_density * np.pi * params.radius**2
        expect = area * cp_star * (params.radius / (params.gearbox_ratio * lam_star)) ** 3
        assert region2_constant(params, cp) == pytest.approx(expect, rel=1e-12)


class TestLocusSpeed:
    def test_cube_root_law(self, params):
        p = 1.0e6
        expect = (p / (params.efficiency * K_M)) ** (1.0 / 3.0)
        assert locus_speed(params, K_M, p) == pytest.approx(expect, rel=1e-12)

    def test_capped_at_rated(self, params):
        assert locus_speed(params, K_M, 3.35e6) == params.rated_speed

    def test_monotone(self, params):
        speeds = [locus_speed(params, K_M, p) for p in np.linspace(3e5, 3.35e6, 12)]
        assert all(b >= a for a, b in zip(speeds, speeds[1:]))


class TestTables:
    def test_speed_column(self, tables):
        expect = [
            61.102911,
            76.984843,
            88.125646,
            96.994824,
            104.484507,
            111.031357,
            116.885663,
            119.310000,
            119.310000,
            119.310000,
        ]
        assert np.allclose(tables.speed.ys, expect, atol=5e-6)

    def test_pitch_column_at_15mps(self, tables):
        j = int(np.flatnonzero(tables.pitch.ys == 15.0)[0])
        expect = [
            22.000000,
            22.000000,
            22.000000,
            20.288170,
            18.549933,
            17.149727,
            16.027570,
            15.309093,
            14.780443,
            14.237404,
        ]
        assert np.allclose(tables.pitch.values[:, j], expect, atol=5e-6)

    def test_grids(self, params, tables):
        assert tables.speed.xs[0] == pytest.approx(0.1 * params.rated_power)
        assert tables.speed.xs[-1] == pytest.approx(params.rated_power)
        assert tables.pitch.ys[0] == 3.0
        assert tables.pitch.ys[-1] == 25.0

    def test_node_lookup_exact(self, tables):
        for i in (0, 4, 9):
            assert lut1(tables.speed, float(tables.speed.xs[i])) == tables.speed.ys[i]
        for i in (0, 5, 9):
            for j in (0, 11, 22):
                assert (
                    lut2(tables.pitch, float(tables.pitch.xs[i]), float(tables.pitch.ys[j]))
                    == tables.pitch.values[i, j]
                )

    def test_pitch_bounds(self, params, tables):
        assert tables.pitch.values.min() >= params.pitch_min_deg
        assert tables.pitch.values.max() <= params.pitch_max_deg

    def test_pitch_steady_points_balance(self, params, cp, tables):
        # interior table entries away from the pitch limits are genuine
        # steady states of the full nonlinear plant
        i, j = 5, 12  # 0.6 x rated power, 15 m/s
        power = float(tables.speed.xs[i])
        wind = float(tables.pitch.ys[j])
        omega = float(tables.speed.ys[i])
        pitch = float(tables.pitch.values[i, j])
        torque = power / (params.efficiency * omega)
        assert plant_rhs(params, cp, omega, pitch, torque, wind) == pytest.approx(
            0.0, abs=1e-7
        )

    def test_csv_roundtrip(self, params, tables, tmp_path):
        path = tmp_path / "tables.csv"
        save_tables(tables, params, path)
        loaded = load_tables(path)
        assert np.array_equal(loaded.speed.xs, tables.speed.xs)
        assert np.array_equal(loaded.speed.ys, tables.speed.ys)
        assert np.array_equal(loaded.pitch.xs, tables.pitch.xs)
        assert np.array_equal(loaded.pitch.ys, tables.pitch.ys)
        assert np.array_equal(loaded.pitch.values, tables.pitch.values)


class TestWarmStart:
    def test_rated_demand_high_wind(self, params, cp):
        omega, pitch, torque = steady_operating_point(params, cp, 3.35e6, 15.21)
        assert omega == pytest.approx(119.31, rel=1e-12)
        assert pitch == pytest.approx(14.543014975321993, rel=1e-9)
        assert torque == pytest.approx(29997.987000730296, rel=1e-9)

    def test_rated_demand_low_wind(self, params, cp):
        # demand unreachable: start on the peak-Cp locus at the pitch floor
        omega, pitch, torque = steady_operating_point(params, cp, 3.35e6, 6.3)
        assert omega == pytest.approx(82.76643487733408, rel=1e-9)
        assert pitch == params.pitch_min_deg
        assert torque == pytest.approx(10747.111690621197, rel=1e-9)

    def test_part_load(self, params, cp):
        omega, pitch, torque = steady_operating_point(params, cp, 2.2e6, 10.0)
        assert omega == pytest.approx(114.42507057562575, rel=1e-9)
        assert pitch == pytest.approx(8.414513910281956, rel=1e-9)
        assert torque == pytest.approx(20541.192053483603, rel=1e-9)

    @pytest.mark.parametrize(
        "power, wind", [(3.35e6, 15.21), (3.35e6, 6.3), (2.2e6, 10.0), (1.0e6, 7.0)]
    )
    def test_never_starts_decelerating_or_overdrawing(self, params, cp, power, wind):
        omega, pitch, torque = steady_operating_point(params, cp, power, wind)
        assert plant_rhs(params, cp, omega, pitch, torque, wind) >= -1e-7
        assert electrical_power(params, omega, torque) <= power * (1 + 1e-9)
        assert params.pitch_min_deg <= pitch <= params.pitch_max_deg
        assert params.torque_min <= torque <= params.torque_max


class TestReferenceGenerator:
    def test_converges_to_steady_refs_above_rated_wind(self, params, cp, tables):
        gen = ReferenceGenerator(params, cp, tables)
        gen.reset(119.31, 14.5)
        for _ in range(200_000):  # 800 s, far beyond both filters
            omega_d, pitch_d, torque_d = gen.step(3.35e6, 15.0)
        assert omega_d == pytest.approx(119.31, rel=1e-6)
        assert pitch_d == pytest.approx(lut2(tables.pitch, 3.35e6, 15.0), rel=1e-4)
        assert torque_d == pytest.approx(
            3.35e6 / (params.efficiency * 119.31), rel=1e-6
        )

    def test_tracking_cap_below_rated_wind(self, params, cp, tables):
        # at low wind the speed reference follows the peak-Cp line, not
        # the demand locus, and the torque follows the quadratic law
        gen = ReferenceGenerator(params, cp, tables)
        wind = 6.3
        omega_track = gen.lam_star * params.gearbox_ratio * wind / params.radius
        gen.reset(omega_track, params.pitch_min_deg)
        for _ in range(200_000):
            omega_d, pitch_d, torque_d = gen.step(3.35e6, wind)
        assert omega_d == pytest.approx(omega_track, rel=1e-6)
        assert pitch_d == pytest.approx(params.pitch_min_deg, abs=1e-3)
        assert torque_d == pytest.approx(gen.k_m * omega_d**2, rel=1e-3)

    def test_torque_reference_continuous_across_locus(self, params, cp, tables):
        # the settled torque law must not jump where the max-efficiency cap
        # and the demand locus cross; seed the filters at their fixed point
        # so each wind is evaluated at the settled references
        gen = ReferenceGenerator(params, cp, tables)
        power = 2.2e6
        omega_table = lut1(tables.speed, power)

        def settled_torque(wind):
            omega_track = gen.lam_star * params.gearbox_ratio * wind / params.radius
            gen.reset(min(omega_track, omega_table), lut2(tables.pitch, power, wind))
            _, _, torque_d = gen.step(power, float(wind))
            return torque_d

        # straddle the crossover wind tightly; the demand sits between two
        # speed-table nodes so the branch values differ by the interpolation
        # error of the table, a fraction of a percent, and no more
        v_star = omega_table * params.radius / (gen.lam_star * params.gearbox_ratio)
        below = settled_torque(v_star * (1.0 - 1e-9))
        above = settled_torque(v_star * (1.0 + 1e-9))
        assert abs(below - above) / above < 5e-3

    def test_torque_reference_seam_exact_on_table_node(self, params, cp, tables):
        # at a demand sitting exactly on a speed-table node the two branch
        # laws k_m*omega^2 and power/(eta*omega) agree to rounding
        gen = ReferenceGenerator(params, cp, tables)
        power = float(tables.speed.xs[5])
        omega_table = lut1(tables.speed, power)

        def settled_torque(wind):
            omega_track = gen.lam_star * params.gearbox_ratio * wind / params.radius
            gen.reset(min(omega_track, omega_table), lut2(tables.pitch, power, wind))
            _, _, torque_d = gen.step(power, float(wind))
            return torque_d

        v_star = omega_table * params.radius / (gen.lam_star * params.gearbox_ratio)
        below = settled_torque(v_star * (1.0 - 1e-9))
        above = settled_torque(v_star * (1.0 + 1e-9))
        assert abs(below - above) / above < 1e-7

        # and across a wind sweep the settled torque moves by at most the
        # locus slope d(k_m*omega^2)/dV times the grid step (plus margin)
        winds = np.linspace(7.0, 12.0, 251)
        torques = np.array([settled_torque(float(v)) for v in winds])
        dodv = gen.lam_star * params.gearbox_ratio / params.radius
        bound = 2.0 * gen.k_m * omega_table * dodv * (winds[1] - winds[0])
        assert np.abs(np.diff(torques)).max() <= bound * 1.25

    def test_reset_seeds_filters(self, params, cp, tables):
        gen = ReferenceGenerator(params, cp, tables)
        gen.reset(100.0, 5.0)
        assert gen.speed_state == 100.0
        assert gen.pitch_state == 5.0
