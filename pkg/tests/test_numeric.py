"""Tests for the fixed-step integrator and drift measurement."""

import math

import pytest

from vfield.algebra import MultiPoly, RatFunc
from vfield.errors import NonFiniteState, PoleEncountered, SignChange
from vfield.lv import brestovski_reduce
from vfield.numeric import (
    Trajectory,
    first_integral_drift,
    integrate_rk4,
    log_first_integral,
)
from vfield.vectorfield import VectorField, lotka_volterra

XY = ("X", "Y")


def exponential_field() -> VectorField:
    X = MultiPoly.var(XY, "X")
    Y = MultiPoly.var(XY, "Y")
    return VectorField(XY, (X, Y))


class TestIntegrateRK4:
    def test_equilibrium_is_exact_fixed_point(self):
        traj = integrate_rk4(lotka_volterra(1, 2, 1, 3), (-3.0, -2.0), 1.0, 1e-3)
        assert traj.stop_reason is None
        assert len(traj) == 1001
        assert all(state == (-3.0, -2.0) for state in traj.states)

    def test_exponential(self):
        traj = integrate_rk4(exponential_field(), (1.0, 1.0), 1.0, 1e-3)
        assert abs(traj.final_state()[0] - math.e) < 1e-8

    def test_uniform_increasing_times(self):
        traj = integrate_rk4(exponential_field(), (1.0, 1.0), 0.05, 1e-2)
        assert traj.times[0] == 0.0
        assert traj.step == 1e-2
        for t0, t1 in zip(traj.times, traj.times[1:]):
            assert t1 > t0
            assert abs((t1 - t0) - 1e-2) < 1e-12

    def test_deterministic(self):
        a = integrate_rk4(lotka_volterra(1, -2, 1, -3), (1.0, 1.0), 0.5, 1e-3)
        b = integrate_rk4(lotka_volterra(1, -2, 1, -3), (1.0, 1.0), 0.5, 1e-3)
        assert a == b

    def test_blowup_truncates_with_reason(self):
        # This orbit has a genuine finite-time singularity near t = 0.5.
        traj = integrate_rk4(lotka_volterra(1, 2, 1, 3), (1.0, 1.0), 1.0, 1e-3)
        assert traj.stop_reason is not None
        assert "non-finite" in traj.stop_reason
        assert 0.4 < traj.times[-1] < 0.6
        assert all(
            math.isfinite(x) and math.isfinite(y) for x, y in traj.states
        )

    def test_pole_at_start(self):
        one = MultiPoly.const(XY, 1)
        X = MultiPoly.var(XY, "X")
        s = VectorField(XY, (RatFunc(one, X), RatFunc.zero(XY)))
        with pytest.raises(PoleEncountered):
            integrate_rk4(s, (0.0, 1.0), 1.0, 1e-2)

    def test_nonfinite_start(self):
        with pytest.raises(NonFiniteState):
            integrate_rk4(exponential_field(), (float("nan"), 1.0), 1.0, 1e-2)

    def test_bad_step(self):
        with pytest.raises(ValueError):
            integrate_rk4(exponential_field(), (1.0, 1.0), 1.0, 0.0)

    def test_symbolic_coefficients_rejected(self):
        from vfield.algebra import Scalar

        s = lotka_volterra(1, Scalar.sym("b"), 1, 3)
        with pytest.raises(ValueError):
            integrate_rk4(s, (1.0, 1.0), 1.0, 1e-2)

    def test_non_planar_rejected(self):
        from vfield.algebra import DiffParam

        z = DiffParam.log("z", 2)
        s = lotka_volterra(1, 2, 1, 2, diff_params=(z,))
        with pytest.raises(ValueError):
            integrate_rk4(s, (1.0, 1.0), 1.0, 1e-2)

    def test_rational_components(self):
        # x' = 1/x from x(0) = 1 gives x(t) = sqrt(1 + 2t).
        one = MultiPoly.const(XY, 1)
        X = MultiPoly.var(XY, "X")
        s = VectorField(XY, (RatFunc(one, X), RatFunc.zero(XY)))
        traj = integrate_rk4(s, (1.0, 1.0), 1.0, 1e-3)
        assert abs(traj.final_state()[0] - math.sqrt(3.0)) < 1e-8


class TestFirstIntegralDrift:
    def test_drift_small_on_bounded_orbit(self):
        traj = integrate_rk4(lotka_volterra(1, -2, 1, -3), (1.0, 1.0), 1.0, 1e-3)
        assert traj.stop_reason is None
        assert first_integral_drift(traj, -2.0, -3.0) < 1e-8

    def test_equilibrium_drift_exactly_zero(self):
        traj = integrate_rk4(lotka_volterra(1, -2, 1, -3), (3.0, 2.0), 1.0, 1e-2)
        assert first_integral_drift(traj, -2.0, -3.0) == 0.0

    def test_different_levels_both_conserved(self):
        s = lotka_volterra(1, -2, 1, -3)
        t1 = integrate_rk4(s, (1.0, 1.0), 1.0, 1e-3)
        t2 = integrate_rk4(s, (2.0, 2.0), 1.0, 1e-3)
        lvl1 = log_first_integral(1.0, 1.0, -2.0, -3.0)
        lvl2 = log_first_integral(2.0, 2.0, -2.0, -3.0)
        assert abs(lvl1 - lvl2) > 0.1
        assert first_integral_drift(t1, -2.0, -3.0) < 1e-8
        assert first_integral_drift(t2, -2.0, -3.0) < 1e-8

    def test_fourth_order_step_halving(self):
        s = lotka_volterra(1, -2, 1, -3)
        coarse = first_integral_drift(
            integrate_rk4(s, (1.0, 1.0), 1.0, 4e-3), -2.0, -3.0
        )
        fine = first_integral_drift(
            integrate_rk4(s, (1.0, 1.0), 1.0, 2e-3), -2.0, -3.0
        )
        assert 8.0 <= coarse / fine <= 32.0

    def test_sign_change_detected(self):
        minus_one = MultiPoly.const(XY, -1)
        s = VectorField(XY, (minus_one, MultiPoly.zero(XY)))
        traj = integrate_rk4(s, (0.5, 1.0), 1.0, 0.1)
        with pytest.raises(SignChange):
            first_integral_drift(traj, 1.0, 1.0)

    def test_axis_start_rejected(self):
        s = VectorField(XY, (MultiPoly.zero(XY), MultiPoly.zero(XY)))
        traj = integrate_rk4(s, (0.0, 1.0), 0.2, 0.1)
        with pytest.raises(SignChange):
            first_integral_drift(traj, 1.0, 1.0)

    def test_log_first_integral_on_axis(self):
        with pytest.raises(SignChange):
            log_first_integral(0.0, 1.0, 1.0, 1.0)


class TestReducedEquationCrossCheck:
    def test_z_tracks_phase_flow(self):
        # Integrate the planar system and its second-order reduction
        # from matched initial data; z = x - y must follow the phase
        # flow's Z coordinate.
        lv = lotka_volterra(1, 2, 1, 3)
        traj = integrate_rk4(lv, (1.0, 1.0), 0.25, 1e-3)
        assert traj.stop_reason is None

        phase = brestovski_reduce(2, 3).phase_field()
        x0, y0 = traj.states[0]
        start = (x0 - y0, 2 * x0 - 3 * y0)
        ptraj = integrate_rk4(phase, start, 0.25, 1e-3)
        assert ptraj.stop_reason is None

        worst = max(
            abs((x - y) - z)
            for (x, y), (z, _) in zip(traj.states, ptraj.states)
        )
        assert worst < 1e-8
