"""Unit tests for the shared scalar operators."""

import numpy as np
import pytest

from turbine_lq.common import (
    Interval,
    LowpassState,
    Table1D,
    Table2D,
    lowpass_step,
    lut1,
    lut2,
    make_alpha,
    rate_limited_update,
    sat,
)


class TestInterval:
    def test_contains(self):
        box = Interval(-1.0, 2.0)
        assert box.contains(-1.0) and box.contains(2.0) and box.contains(0.5)
        assert not box.contains(-1.0001) and not box.contains(2.0001)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Interval(1.0, 1.0)
        with pytest.raises(ValueError):
            Interval(2.0, -1.0)


class TestSat:
    def test_endpoints_and_identity(self):
        box = Interval(-2.0, 3.0)
        assert sat(-5.0, box) == -2.0
        assert sat(7.0, box) == 3.0
        assert sat(1.25, box) == 1.25
        assert sat(-2.0, box) == -2.0
        assert sat(3.0, box) == 3.0

    def test_idempotent_random(self, rng):
        for _ in range(1000):
            lo, w = rng.normal(), abs(rng.normal()) + 1e-6
            box = Interval(lo, lo + w)
            x = rng.normal(scale=5.0)
            y = sat(x, box)
            assert box.contains(y)
            assert sat(y, box) == y


class TestRateLimiter:
    BOX = Interval(0.0, 10.0)
    STEP = Interval(-0.5, 0.5)

    def test_step_clamp(self):
        assert rate_limited_update(5.0, 9.0, self.BOX, self.STEP) == 5.5
        assert rate_limited_update(5.0, 1.0, self.BOX, self.STEP) == 4.5

    def test_value_clamp_wins(self):
        assert rate_limited_update(9.9, 50.0, self.BOX, self.STEP) == 10.0
        assert rate_limited_update(0.1, -50.0, self.BOX, self.STEP) == 0.0

    def test_fixed_point(self):
        assert rate_limited_update(4.0, 4.0, self.BOX, self.STEP) == 4.0

    def test_small_moves_pass_through(self):
        assert rate_limited_update(4.0, 4.2, self.BOX, self.STEP) == 4.2

    def test_bounds_random(self, rng):
        for _ in range(1000):
            lo = rng.normal()
            box = Interval(lo, lo + abs(rng.normal()) + 1e-3)
            s = abs(rng.normal()) + 1e-6
            step = Interval(-s, s)
            prev = float(np.clip(rng.normal(), box.lower, box.upper))
            desired = rng.normal(scale=10.0)
            out = rate_limited_update(prev, desired, box, step)
            assert box.contains(out)
            assert abs(out - prev) <= s + 1e-12


class TestAlpha:
    def test_minus_convention(self):
        assert make_alpha(0.004, 1.0, "minus") == pytest.approx(0.004 / 0.996, rel=1e-14)

    def test_plus_convention(self):
        assert make_alpha(0.004, 20.0, "plus") == pytest.approx(0.004 / 20.004, rel=1e-14)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            make_alpha(0.0, 1.0)
        with pytest.raises(ValueError):
            make_alpha(0.004, 0.0)
        with pytest.raises(ValueError):
            make_alpha(0.004, 0.007, "minus")  # needs T > 2*Ts
        with pytest.raises(ValueError):
            make_alpha(0.004, 1.0, "geometric")


class TestLowpass:
    def test_seeded_by_first_input(self):
        st = LowpassState(alpha=0.25)
        assert lowpass_step(st, 7.0) == 7.0

    def test_recurrence(self):
        st = LowpassState(alpha=0.25)
        lowpass_step(st, 4.0)
        assert lowpass_step(st, 8.0) == pytest.approx(0.75 * 4.0 + 0.25 * 8.0, rel=1e-15)

    def test_contracts_toward_constant_input(self):
        st = LowpassState(alpha=0.1)
        lowpass_step(st, 0.0)
        errs = [abs(lowpass_step(st, 1.0) - 1.0) for _ in range(50)]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] == pytest.approx(0.9**50, rel=1e-10)

    def test_alpha_validation(self):
        with pytest.raises(ValueError):
            LowpassState(alpha=0.0)
        with pytest.raises(ValueError):
            LowpassState(alpha=1.0)


class TestTable1D:
    TABLE = Table1D(xs=np.array([0.0, 1.0, 3.0]), ys=np.array([2.0, 4.0, -1.0]))

    def test_node_exact(self):
        for x, y in zip(self.TABLE.xs, self.TABLE.ys):
            assert lut1(self.TABLE, float(x)) == y

    def test_interior_linear(self):
        assert lut1(self.TABLE, 0.5) == pytest.approx(3.0, rel=1e-15)
        assert lut1(self.TABLE, 2.0) == pytest.approx(1.5, rel=1e-15)

    def test_clamps_outside(self):
        assert lut1(self.TABLE, -10.0) == 2.0
        assert lut1(self.TABLE, 10.0) == -1.0

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            Table1D(xs=np.array([0.0, 0.0, 1.0]), ys=np.zeros(3))
        with pytest.raises(ValueError):
            Table1D(xs=np.array([1.0]), ys=np.array([1.0]))
        with pytest.raises(ValueError):
            Table1D(xs=np.array([0.0, 1.0]), ys=np.zeros(3))


class TestTable2D:
    TABLE = Table2D(
        xs=np.array([0.0, 1.0]),
        ys=np.array([0.0, 2.0]),
        values=np.array([[1.0, 3.0], [5.0, 7.0]]),
    )

    def test_node_exact(self):
        for i, x in enumerate(self.TABLE.xs):
            for j, y in enumerate(self.TABLE.ys):
                assert lut2(self.TABLE, float(x), float(y)) == self.TABLE.values[i, j]

    def test_center_is_mean(self):
        assert lut2(self.TABLE, 0.5, 1.0) == pytest.approx(4.0, rel=1e-15)

    def test_clamps_on_both_axes(self):
        assert lut2(self.TABLE, -5.0, -5.0) == 1.0
        assert lut2(self.TABLE, 5.0, 5.0) == 7.0

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            Table2D(xs=np.array([0.0, 1.0]), ys=np.array([0.0, 1.0]), values=np.zeros((3, 2)))
