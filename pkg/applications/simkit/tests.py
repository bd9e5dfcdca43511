import math
import os
import unittest

import numpy as np
from django.test import SimpleTestCase, tag
from numpy.testing import assert_allclose, assert_array_equal

from applications.aero.models import WindInput
from applications.control.laws import ActiveController, OpenLoopController
from applications.control.models import ControllerGains
from applications.core.constants import DEFAULT_THRESHOLDS
from applications.core.exceptions import DivergedState
from applications.machine.models import FaultPhase, FaultSpec
from applications.plant.models import PlantEnvironment, PlantParams, PlantState
from applications.plant.operating import steady_state

from .integrator import euler_step, integrate_field, rk4_step
from .metrics import extract_metrics, settle_time
from .models import COLUMNS, IntegratorConfig, Termination, TimeSeries, WindProfileSpec
from .runner import (
    active_fault,
    check_state,
    current_limit,
    references_at,
    sample_control,
    simulate,
)
from .wind import ConstantWind, build_wind_profile, wind_profile

ACCEPTANCE = os.environ.get('TWINWIND_ACCEPTANCE') == '1'
OMEGA_REFS = (32.0, 32.0)


def zero_series(samples=11, t_end=1.0):
    table = np.zeros((samples, len(COLUMNS)))
    table[:, 0] = np.linspace(0.0, t_end, samples)
    return TimeSeries.from_table(table)


class IntegratorTests(SimpleTestCase):
    def test_euler_step(self):
        self.assertAlmostEqual(euler_step(lambda t, x: -x, 0.0, np.array([2.0]), 0.1)[0], 1.8)

    def test_rk4_step_matches_taylor_polynomial(self):
        h = 0.1
        expected = 1.0 - h + h**2 / 2 - h**3 / 6 + h**4 / 24
        self.assertAlmostEqual(rk4_step(lambda t, x: -x, 0.0, np.array([1.0]), h)[0], expected)

    def test_rk4_uses_stage_times(self):
        x = rk4_step(lambda t, x: np.array([3.0 * t**2]), 0.0, np.array([0.0]), 0.5)
        self.assertAlmostEqual(x[0], 0.125, places=14)

    def test_global_order_on_a_rotation(self):
        def rotation(t, x):
            return np.array([-x[1], x[0]])

        errors = []
        for steps in (20, 40, 80):
            final = integrate_field(rotation, np.array([1.0, 0.0]), 2.0 / steps, steps)[-1]
            errors.append(np.linalg.norm(final - [math.cos(2.0), math.sin(2.0)]))
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        self.assertTrue(np.all((orders > 3.7) & (orders < 4.3)), orders)

    def test_integrate_field_includes_initial_point(self):
        trajectory = integrate_field(lambda t, x: np.ones(2), np.zeros(2), 0.25, 4, 'euler')
        self.assertEqual(trajectory.shape, (5, 2))
        assert_allclose(trajectory[-1], [1.0, 1.0])


class IntegratorConfigTests(SimpleTestCase):
    def test_grid(self):
        config = IntegratorConfig(dt=1e-3, t_end=0.02, control_period=5e-3)
        self.assertEqual(config.steps, 20)
        self.assertEqual(config.hold_steps, 5)
        self.assertEqual(IntegratorConfig().hold_steps, 1)

    def test_rejects_invalid_values(self):
        for kwargs in ({'dt': 0.0}, {'t_end': -1.0}, {'method': 'rk45'}, {'control_period': 1e-6}):
            with self.subTest(kwargs=kwargs), self.assertRaises(ValueError):
                IntegratorConfig(**kwargs)

    def test_coarse_step_is_logged(self):
        with self.assertLogs('applications.simkit.models', level='WARNING'):
            IntegratorConfig(dt=5e-3)


class WindProfileTests(SimpleTestCase):
    def test_constant(self):
        for t in (0.0, 3.0, 100.0):
            sample = wind_profile('constant', {'vv': 10.0, 'alpha': 0.0}, t)
            self.assertEqual(sample, WindInput(10.0, 0.0))

    def test_step_in_direction(self):
        params = {'vv': 8.0, 'alpha': 0.0, 't_switch': 3.0, 'alpha_after': 0.2}
        self.assertEqual(wind_profile('step', params, 2.999), WindInput(8.0, 0.0))
        self.assertEqual(wind_profile('step', params, 3.0), WindInput(8.0, 0.2))

    def test_ramp(self):
        params = {'vv': 6.0, 'alpha': 0.0, 't_switch': 1.0, 'duration': 2.0, 'vv_after': 10.0}
        middle = wind_profile('ramp', params, 2.0)
        self.assertAlmostEqual(middle.vv, 8.0)
        self.assertAlmostEqual(middle.vv_dot, 2.0)
        self.assertEqual(middle.alpha_dot, 0.0)
        self.assertEqual(wind_profile('ramp', params, 3.5), WindInput(10.0, 0.0))

    def test_turbulence_is_seeded(self):
        spec = WindProfileSpec(kind='turbulence', vv=8.0, seed=11)
        first, second = build_wind_profile(spec), build_wind_profile(spec)
        other = build_wind_profile(WindProfileSpec(kind='turbulence', vv=8.0, seed=12))
        times = np.linspace(0.0, 20.0, 101)
        self.assertEqual([first(t) for t in times], [second(t) for t in times])
        self.assertNotEqual([first(t).vv for t in times], [other(t).vv for t in times])

    def test_turbulence_rate_is_the_derivative(self):
        profile = build_wind_profile(WindProfileSpec(kind='turbulence', vv=8.0, intensity=0.2))
        h = 1e-6
        for t in (0.3, 4.0, 17.5):
            numeric = (profile(t + h).vv - profile(t - h).vv) / (2 * h)
            self.assertAlmostEqual(profile(t).vv_dot, numeric, places=5)
            self.assertEqual(profile(t).alpha_dot, 0.0)

    def test_unknown_parameter(self):
        with self.assertRaises(ValueError):
            wind_profile('constant', {'speed': 3.0}, 0.0)
        with self.assertRaises(ValueError):
            wind_profile('gust', {}, 0.0)


class MetricsTests(SimpleTestCase):
    def test_all_zero_trajectory(self):
        metrics = extract_metrics(zero_series(), (0.0, 1.0))
        self.assertFalse(metrics.diverged)
        for name in (
            'psi_error',
            'omega_error',
            'id_max',
            'ih_max',
            'phase_sum_ratio',
            'phase_peak',
        ):
            self.assertEqual(getattr(metrics, name), 0.0, name)
        self.assertEqual(metrics.samples, 11)
        self.assertEqual(metrics.psi_settle, 0.0)

    def test_sinusoid_amplitude(self):
        series = zero_series(101)
        series.derived[:, 0] = 0.3 * np.sin(2 * np.pi * series.t)
        metrics = extract_metrics(series, (0.0, 1.0))
        self.assertAlmostEqual(metrics.id_max1, 0.3, places=12)
        self.assertEqual(metrics.id_max2, 0.0)

    def test_window_restricts_samples(self):
        series = zero_series(101)
        series.outputs[:50, 0] = 1.0
        self.assertEqual(extract_metrics(series, (0.5, 1.0)).psi_error, 0.0)
        self.assertEqual(extract_metrics(series, (0.0, 1.0)).psi_error, 1.0)

    def test_relative_speed_error(self):
        series = zero_series()
        series.states[:, 7] = 20.0
        series.outputs[:, 1] = 0.4
        metrics = extract_metrics(series, (0.0, 1.0))
        self.assertAlmostEqual(metrics.omega_error1, 0.4 / 19.6)

    def test_phase_sum_ratio(self):
        series = zero_series()
        series.states[:, 4:7] = [10.0, -4.0, -5.0]
        metrics = extract_metrics(series, (0.0, 1.0))
        self.assertAlmostEqual(metrics.phase_sum_max1, 1.0)
        self.assertAlmostEqual(metrics.phase_sum_ratio, 0.1)

    def test_settle_time(self):
        t = np.linspace(0.0, 1.0, 11)
        error = np.array([1.0, 0.5, 0.2, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
        self.assertEqual(settle_time(t, error, 0.25), t[5])
        self.assertIsNone(settle_time(t, np.r_[np.zeros(10), 1.0], 0.25))

    def test_short_run_is_judged_on_its_last_sample(self):
        series = zero_series(11, t_end=0.5)
        series.outputs[-1, 0] = 0.7
        metrics = extract_metrics(series, (2.0, 10.0))
        self.assertEqual(metrics.samples, 1)
        self.assertEqual(metrics.psi_error, 0.7)


class SimulationTestCase(SimpleTestCase):
    def setUp(self):
        self.params = PlantParams()
        self.wind = ConstantWind(8.0, 0.1)
        self.calm = ConstantWind(0.0, 0.0)
        self.start = steady_state(self.params, self.wind(0.0), OMEGA_REFS, 0.05)

    def run_loop(self, x0, *, wind=None, controller=None, fault=None, **integrator):
        return simulate(
            x0,
            params=self.params,
            controller=controller or OpenLoopController(),
            wind=wind or self.wind,
            omega_refs=OMEGA_REFS,
            beta_ref=0.05,
            integrator=IntegratorConfig(**integrator),
            fault=fault,
        )


class SimulationTests(SimulationTestCase):
    def test_calm_open_loop_decays(self):
        x0 = PlantState.from_fields(omega1=10.0, omega2=5.0, theta_e2=0.5)
        series = self.run_loop(x0, wind=self.calm, dt=1e-3, t_end=1.0)
        self.assertTrue(series.completed)
        self.assertEqual(len(series), 1001)
        self.assertTrue(np.all(np.isfinite(series.states)))
        self.assertLess(series.column('omega1')[-1], 10.0)
        self.assertLess(series.column('omega2')[-1], 5.0)

    def test_pitch_sum_follows_its_closed_form(self):
        x0 = PlantState.from_fields(beta1=0.2, beta2=-0.1)
        series = self.run_loop(x0, wind=self.calm, dt=1e-3, t_end=10.0)
        t_beta = self.params.aero.t_beta
        expected = 2 * 0.05 + (0.1 - 2 * 0.05) * np.exp(-series.t / t_beta)
        z = series.column('beta1') + series.column('beta2')
        assert_allclose(z, expected, rtol=0, atol=1e-6)

    def test_fault_switches_at_first_grid_point(self):
        def run(t_on):
            fault = FaultSpec(mu_bar=0.2, turbine=1, phase=FaultPhase.B, t_on=t_on)
            return self.run_loop(self.start, fault=fault, dt=1e-3, t_end=0.02).states

        healthy = self.run_loop(self.start, dt=1e-3, t_end=0.02).states
        assert_array_equal(run(0.0105), run(0.0109))
        self.assertFalse(np.array_equal(run(0.0109), run(0.0111)))
        faulted = run(0.0109)
        assert_array_equal(faulted[:12], healthy[:12])
        self.assertFalse(np.array_equal(faulted[12], healthy[12]))

    def test_active_fault_resolution(self):
        fault = FaultSpec(mu_bar=0.1, t_on=7.0)
        self.assertIsNone(active_fault(fault, 6.9999))
        self.assertIs(active_fault(fault, 7.0), fault)
        self.assertIsNone(active_fault(None, 8.0))
        self.assertIsNone(active_fault(FaultSpec(mu_bar=0.0), 8.0))

    def test_rk4_observed_order(self):
        finals = [
            self.run_loop(self.start, dt=dt, t_end=0.02).states[-1]
            for dt in (5e-4, 2.5e-4, 1.25e-4)
        ]
        coarse = np.max(np.abs(finals[0] - finals[1]))
        fine = np.max(np.abs(finals[1] - finals[2]))
        order = math.log2(coarse / fine)
        self.assertGreater(order, 3.7)
        self.assertLess(order, 4.3)

    def test_deterministic(self):
        wind = build_wind_profile(WindProfileSpec(kind='turbulence', vv=8.0, alpha=0.1, seed=5))
        fault = FaultSpec(mu_bar=0.2, t_on=0.01)
        controller = ActiveController(ControllerGains(), self.params, fault)
        runs = [
            self.run_loop(
                self.start, wind=wind, controller=controller, fault=fault, dt=1e-4, t_end=0.02
            )
            for _ in range(2)
        ]
        self.assertTrue(runs[0].completed)
        assert_array_equal(runs[0].as_table(), runs[1].as_table())

    def test_divergence_stops_the_run(self):
        series = simulate(
            self.start,
            params=self.params,
            controller=OpenLoopController(),
            wind=self.wind,
            omega_refs=OMEGA_REFS,
            beta_ref=0.05,
            integrator=IntegratorConfig(dt=1e-3, t_end=1.0),
            limit=1.0,
        )
        self.assertEqual(series.termination, Termination.DIVERGED)
        self.assertEqual(len(series), 1)
        self.assertEqual(series.terminated_at, 1e-3)
        with self.assertRaises(DivergedState):
            series.raise_for_termination()

    def test_singular_decoupling_stops_the_run(self):
        controller = ActiveController(ControllerGains(), self.params)
        series = self.run_loop(
            PlantState.from_fields(omega1=10.0, omega2=10.0),
            wind=self.calm,
            controller=controller,
            dt=1e-3,
            t_end=0.1,
        )
        self.assertEqual(series.termination, Termination.SINGULAR)
        self.assertEqual(len(series), 0)
        self.assertEqual(series.terminated_at, 0.0)

    def test_state_checks(self):
        limit = current_limit(self.start.vector)
        self.assertGreater(limit, 100.0)
        check_state(self.start.vector, 0.0, limit)
        broken = self.start.vector.copy()
        broken[5] = np.nan
        with self.assertRaisesMessage(DivergedState, 'non-finite'):
            check_state(broken, 0.5, limit)

    def test_sampling_without_lead_is_the_plain_law(self):
        controller = ActiveController(ControllerGains(), self.params)
        env = PlantEnvironment(wind=self.wind(0.0), beta_ref=0.05)
        refs = references_at(env.wind, OMEGA_REFS, 0.05)
        u = sample_control(
            controller,
            self.start.vector,
            0.0,
            None,
            lead=0.0,
            fault=None,
            params=self.params,
            wind=self.wind,
            omega_refs=OMEGA_REFS,
            beta_ref=0.05,
        )
        assert_array_equal(u, controller(self.start.vector, 0.0, env, refs).vector)

    def test_predictive_hold_removes_the_sampling_offset(self):
        controller = ActiveController(ControllerGains(), self.params)
        offsets = {
            predictive: abs(
                self.run_loop(
                    self.start,
                    controller=controller,
                    dt=1e-4,
                    t_end=0.03,
                    predictive_hold=predictive,
                ).column('y_id1')[-1]
            )
            for predictive in (False, True)
        }
        self.assertGreater(offsets[False], 0.03)
        self.assertLess(offsets[True], 0.01)

    def test_recorded_rows_are_consistent(self):
        series = self.run_loop(self.start, dt=1e-3, t_end=0.005)
        assert_allclose(series.t, np.arange(6) * 1e-3)
        assert_array_equal(series.states[0], self.start.vector)
        assert_array_equal(series.inputs, np.zeros((6, 7)))
        assert_allclose(series.column('y_psi'), series.column('psi') - 0.1, atol=1e-15)


@tag('slow')
@unittest.skipUnless(ACCEPTANCE, 'set TWINWIND_ACCEPTANCE=1 to run the closed-loop reproductions')
class ClosedLoopAcceptanceTests(SimulationTestCase):
    def test_healthy_tracking(self):
        controller = ActiveController(ControllerGains(), self.params)
        series = self.run_loop(self.start, controller=controller, dt=1e-4, t_end=10.0)
        metrics = extract_metrics(series, (2.0, 10.0))
        self.assertTrue(series.completed)
        self.assertLess(metrics.psi_error, DEFAULT_THRESHOLDS['psi_error'])
        self.assertLess(metrics.omega_error, DEFAULT_THRESHOLDS['omega_error'])
        self.assertLess(metrics.id_max, DEFAULT_THRESHOLDS['id_max'])
        self.assertLess(metrics.ih_max, DEFAULT_THRESHOLDS['ih_max'])

    def test_yaw_reconverges_after_a_direction_step(self):
        wind = build_wind_profile(
            WindProfileSpec(kind='step', vv=8.0, alpha=0.1, t_switch=3.0, alpha_after=0.2)
        )
        controller = ActiveController(ControllerGains(), self.params)
        series = self.run_loop(self.start, wind=wind, controller=controller, dt=1e-4, t_end=6.0)
        self.assertTrue(series.completed)
        y_psi = series.column('y_psi')
        before, after = series.t < 3.0, series.t >= 5.0
        self.assertLess(np.abs(y_psi[before & (series.t >= 2.0)]).max(), 0.01)
        self.assertAlmostEqual(y_psi[np.argmax(series.t >= 3.0)], -0.1, delta=1e-3)
        self.assertLess(np.abs(y_psi[after]).max(), 0.01)
        self.assertAlmostEqual(series.column('psi')[-1], 0.2, delta=0.01)

    def test_active_control_under_severe_fault(self):
        fault = FaultSpec(mu_bar=0.2, turbine=1, phase=FaultPhase.B, t_on=7.0)
        controller = ActiveController(ControllerGains(), self.params, fault)
        series = self.run_loop(
            self.start, controller=controller, fault=fault, dt=1e-4, t_end=10.0
        )
        metrics = extract_metrics(series, (8.0, 10.0))
        self.assertTrue(series.completed)
        self.assertLess(metrics.phase_sum_ratio, DEFAULT_THRESHOLDS['phase_sum_ratio'])
        self.assertLess(metrics.id_max, DEFAULT_THRESHOLDS['id_max'])
        self.assertLess(metrics.ih_max, DEFAULT_THRESHOLDS['ih_max'])
        self.assertLess(metrics.psi_error, DEFAULT_THRESHOLDS['psi_error'])
        self.assertLess(metrics.omega_error, DEFAULT_THRESHOLDS['omega_error'])
