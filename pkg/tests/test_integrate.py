import math

import numpy as np
import pytest

from ricci_qc.geometry import ClassId, ClassParams, InitialData, closed_form
from ricci_qc.integrate import (IntegratorConfig, MaxStepsExceeded, StiffnessError, Trajectory,
                                evaluate_at, integrate)
from ricci_qc.metric import DomainError

from conftest import ALL_CLASSES, DEFAULT_PARAMS, UNIT


class TestConfig:
    @pytest.mark.parametrize("kwargs", [dict(t_end=0.0), dict(t_end=1.0, rel_tol=0.0),
                                        dict(t_end=1.0, abs_tol=-1.0),
                                        dict(t_end=1.0, max_steps=0),
                                        dict(t_end=1.0, initial_step=0.0)])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(DomainError):
            IntegratorConfig(**kwargs)

    def test_defaults(self):
        cfg = IntegratorConfig(t_end=1.0)
        assert (cfg.rel_tol, cfg.abs_tol, cfg.max_steps, cfg.initial_step) == (
            1e-10, 1e-12, 10_000_000, 1e-4)


class TestIntegrate:
    def test_a1_constant(self):
        traj = integrate("A1", ClassParams(), InitialData(1, 2, 3, 4), IntegratorConfig(t_end=10))
        assert np.all(traj.states == np.array([1.0, 2.0, 3.0, 4.0]))
        assert traj.t_end == 10.0

    def test_a2iv_linear_d(self):
        traj = integrate("A2iv", ClassParams(k=2.0), UNIT, IntegratorConfig(t_end=1.0))
        assert traj.final.as_tuple() == pytest.approx((1, 1, 1, 29), abs=1e-9)

    def test_a3_equal_case(self):
        traj = integrate("A3", ClassParams(k=1.0), InitialData(2, 2, 1, 1),
                         IntegratorConfig(t_end=5.0))
        assert traj.final.as_tuple() == pytest.approx((2, 2, 1, 61), rel=1e-8)

    def test_trajectory_invariants(self):
        traj = integrate("A5", ClassParams(), InitialData(2, 3, 1, 1), IntegratorConfig(t_end=100))
        assert traj.times[0] == 0.0
        assert np.all(np.diff(traj.times) > 0)
        assert np.all(traj.states > 0)
        assert evaluate_at(traj, 0.0).as_tuple() == (2.0, 3.0, 1.0, 1.0)
        assert isinstance(traj, Trajectory) and traj.n_steps == len(traj.times) - 1

    def test_arrays_read_only(self):
        traj = integrate("A4", ClassParams(), UNIT, IntegratorConfig(t_end=1.0))
        with pytest.raises(ValueError):
            traj.states[0, 0] = 2.0

    @pytest.mark.parametrize("cls", ALL_CLASSES)
    def test_every_class_reaches_1e3_from_unit_data(self, cls):
        traj = integrate(cls, DEFAULT_PARAMS[cls], UNIT, IntegratorConfig(t_end=1e3))
        assert traj.t_end == 1e3
        assert np.all(traj.states > 0)

    def test_max_steps_carries_partial_trajectory(self):
        with pytest.raises(MaxStepsExceeded) as info:
            integrate("A7i", ClassParams(), UNIT, IntegratorConfig(t_end=1e3, max_steps=5))
        partial = info.value.trajectory
        assert 0 < partial.t_end < 1e3
        assert np.all(partial.states > 0)

    def test_step_below_minimum_is_stiffness(self):
        with pytest.raises(StiffnessError):
            integrate("A5", ClassParams(), UNIT, IntegratorConfig(t_end=1.0, initial_step=1e-16))


class TestEvaluateAt:
    def test_grid_points_bit_exact(self):
        traj = integrate("A8", ClassParams(), InitialData(1, 2, 0.5, 1), IntegratorConfig(t_end=50))
        for t, y in zip(traj.times, traj.states):
            assert evaluate_at(traj, t).as_tuple() == tuple(y)

    def test_a2iv_midpoints_linear(self):
        traj = integrate("A2iv", ClassParams(k=2.0), UNIT, IntegratorConfig(t_end=10.0))
        mids = (traj.times[1:] + traj.times[:-1]) / 2
        for t in mids:
            assert evaluate_at(traj, t).d == pytest.approx(1 + 28 * t, abs=1e-10)

    def test_a4_dense_output(self):
        traj = integrate("A4", ClassParams(), UNIT, IntegratorConfig(t_end=1.0))
        r = 2.5 ** (1 / 3)
        assert evaluate_at(traj, 0.5).as_tuple() == pytest.approx((r, 1 / r, 1.0, r), rel=1e-8)

    def test_dense_output_between_steps_tracks_solution(self):
        init = InitialData(2, 1, 3, 1)
        traj = integrate("A6", ClassParams(), init, IntegratorConfig(t_end=100.0))
        for t in np.geomspace(0.01, 99.0, 60):
            ref = closed_form("A6", ClassParams(), init, float(t)).as_tuple()
            assert evaluate_at(traj, float(t)).as_tuple() == pytest.approx(ref, rel=1e-8)

    @pytest.mark.parametrize("t", [-1e-9, 1.0 + 1e-9])
    def test_out_of_range(self, t):
        traj = integrate("A4", ClassParams(), UNIT, IntegratorConfig(t_end=1.0))
        with pytest.raises(DomainError):
            evaluate_at(traj, t)


def test_long_horizon_step_count_stays_small():
    # step sizes grow with t, so reaching 1e6 needs only a few hundred steps
    traj = integrate("A7i", ClassParams(), UNIT, IntegratorConfig(t_end=1e6))
    assert traj.n_steps < 2000
    assert math.isfinite(traj.final.a)
