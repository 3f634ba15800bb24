import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavitysr.analysis import (FitResult, SweepPoint, SweepSpec,
                               detect_window, extract_risetime, fit_risetime,
                               run_sweep)
from cavitysr.errors import DegenerateWindowError, EmptyTrajectoryError
from cavitysr.params import InitialCondition, ModelParams, validate
from cavitysr.trajectory import Trajectory


def synthetic(times, n_over_n, n_emitters=10):
    n_over_n = np.asarray(n_over_n, dtype=float)
    return Trajectory(times_fs=np.asarray(times, dtype=float),
                      photon=n_over_n * n_emitters,
                      sz=np.zeros_like(n_over_n), n_emitters=n_emitters)


def exponential_traj(tau, amp=1e-7, tmax=300.0, points=3001, n_emitters=10):
    t = np.linspace(0.0, tmax, points)
    return synthetic(t, amp * np.exp(t / tau), n_emitters)


class TestDetectWindow:
    def test_pure_exponential_full_overlap(self):
        traj = exponential_traj(20.0)
        window = detect_window(traj, lo=1e-6, hi=1e-4)
        assert window is not None
        t0, t1 = window
        # the band is crossed between amp*e^(t/tau) = lo and = hi
        assert t0 == pytest.approx(20.0 * math.log(1e-6 / 1e-7), abs=0.2)
        assert t1 == pytest.approx(20.0 * math.log(1e-4 / 1e-7), abs=0.2)

    def test_constant_trajectory(self):
        t = np.linspace(0.0, 100.0, 500)
        traj = synthetic(t, np.full_like(t, 5e-5))
        assert detect_window(traj) is None

    def test_non_exponential_crossing_rejected(self):
        # rises into the band, turns around inside it, rises again: the
        # in-band stretch is not a single exponential
        t = np.linspace(0.0, 100.0, 2001)
        y = 1e-4 * (1.05 + np.sin(2 * np.pi * t / 30.0))
        traj = synthetic(t, y)
        assert detect_window(traj, lo=3e-5, hi=3e-4) is None

    def test_empty_trajectory(self):
        with pytest.raises(EmptyTrajectoryError):
            detect_window(synthetic([], []))

    def test_grid_refinement_converges(self):
        windows = []
        for points in (1001, 2001, 4001, 8001):
            traj = exponential_traj(35.0, points=points)
            windows.append(detect_window(traj, lo=1e-6, hi=1e-4))
        t0s = [w[0] for w in windows]
        t1s = [w[1] for w in windows]
        assert max(t0s) - min(t0s) < 0.5
        assert max(t1s) - min(t1s) < 0.5

    def test_earliest_window_wins(self):
        # band crossed on the way up and again during a later revival; the
        # first window is the physical rise
        t = np.linspace(0.0, 400.0, 8001)
        y = np.where(t < 150.0, 1e-7 * np.exp(t / 15.0), 0.0)
        y = np.where(t >= 150.0, 1e-7 * np.exp((t - 150.0) / 15.0), y)
        traj = synthetic(t, y)
        window = detect_window(traj, lo=1e-6, hi=1e-4)
        assert window[1] < 150.0


class TestFitRisetime:
    def test_recovers_exact_parameters(self):
        traj = exponential_traj(20.0, amp=2e-7)
        window = detect_window(traj, lo=1e-6, hi=1e-4)
        fit = fit_risetime(traj, window)
        assert fit.well_defined
        assert fit.tau_fs == pytest.approx(20.0, rel=1e-4)
        assert fit.amplitude == pytest.approx(2e-7 * 10, rel=1e-3)
        assert fit.r_squared > 0.999999

    @given(st.floats(min_value=1.0, max_value=1000.0))
    @settings(max_examples=25, deadline=None)
    def test_recovery_property(self, tau):
        traj = exponential_traj(tau, tmax=40.0 * tau, points=4001)
        fit = extract_risetime(traj, lo=1e-6, hi=1e-4)
        assert fit is not None and fit.well_defined
        assert abs(fit.tau_fs - tau) / tau < 1e-3

    def test_decaying_window_not_well_defined(self):
        t = np.linspace(0.0, 100.0, 1001)
        traj = synthetic(t, 1e-4 * np.exp(-t / 30.0))
        fit = fit_risetime(traj, (10.0, 60.0))
        assert not fit.well_defined
        assert fit.tau_fs == math.inf

    def test_degenerate_window(self):
        traj = exponential_traj(20.0, points=31, tmax=300.0)
        with pytest.raises(DegenerateWindowError):
            fit_risetime(traj, (0.0, 10.0))

    def test_no_window_returns_none(self):
        t = np.linspace(0.0, 10.0, 101)
        traj = synthetic(t, np.full_like(t, 1e-9))
        assert extract_risetime(traj) is None


class TestSweeps:
    def base(self, **kw):
        params = validate(ModelParams(n_emitters=10 ** 6, g_collective=0.2,
                                      delta=0.0, kappa=0.01, gamma=1e-6,
                                      omega_nu=0.15, gamma_nu=0.01,
                                      temperature=0.026))
        spec = dict(axis="delta", values=(-0.1, 0.0, 0.1), solver="mf",
                    params=params, init=InitialCondition(theta=1e-3 * math.pi),
                    t_grid_fs=np.linspace(0.0, 120.0, 1201))
        spec.update(kw)
        return SweepSpec(**spec)

    def test_axis_aliases_and_validation(self):
        spec = self.base(axis="S", values=(0.0, 0.1))
        assert spec.axis == "huang_rhys"
        with pytest.raises(ValueError):
            self.base(axis="bogus")
        with pytest.raises(ValueError):
            self.base(values=())
        with pytest.raises(ValueError):
            self.base(values=(float("nan"),))
        with pytest.raises(ValueError):
            self.base(solver="nope")

    def test_deterministic_and_ordered(self):
        spec = self.base()
        a = run_sweep(spec)
        b = run_sweep(spec)
        assert [pt.value for pt in a] == [-0.1, 0.0, 0.1]
        for x, y in zip(a, b):
            assert x.error is None
            assert x.fit == y.fit and x.peak_n_over_n == y.peak_n_over_n

    def test_parallel_matches_serial(self):
        spec = self.base(values=(-0.05, 0.05))
        serial = run_sweep(spec, jobs=1)
        parallel = run_sweep(spec, jobs=2)
        for x, y in zip(serial, parallel):
            assert x.fit == y.fit

    def test_per_point_failure_recorded(self):
        # sweeping S onto a config with dephasing trips validation for the
        # nonzero values, without killing the sweep
        params = validate(ModelParams(n_emitters=100, g_collective=0.2,
                                      delta=0.0, kappa=0.01,
                                      gamma_phi=0.005, omega_nu=0.15))
        spec = SweepSpec(axis="S", values=(0.0, 0.2), solver="mf",
                         params=params,
                         init=InitialCondition(theta=1e-3 * math.pi),
                         t_grid_fs=np.linspace(0.0, 60.0, 601))
        points = run_sweep(spec)
        assert points[0].error is None
        assert points[1].error is not None
        assert "MixedDephasingModels" in points[1].error

    def test_theta_axis_moves_initial_condition(self):
        spec = self.base(axis="theta", values=(1e-3 * math.pi,
                                               1e-2 * math.pi))
        points = run_sweep(spec)
        assert all(pt.error is None for pt in points)
        # larger tilt seeds more coherence, so the pulse peaks earlier
        assert points[1].t_peak_fs < points[0].t_peak_fs
