import math

import numpy as np
from django.test import SimpleTestCase

from applications.core.exceptions import DegenerateTipSpeed, SingularOrientation

from .formulas import (
    aerodynamic_torque,
    drag_coefficient,
    drag_coefficient_partials,
    drag_force,
    evaluate_power_coefficient,
    mechanical_power,
    optimal_tip_speed_ratio,
    pitch_dynamics,
    power_coefficient,
    rotor_loads,
    tip_speed_ratio,
    yaw_acceleration,
)
from .models import AeroParams, CdPolynomial, CpParameters, WindInput


def horner_oracle(coefficients, x):
    return sum(c * x**k for k, c in enumerate(coefficients))


def central_difference(fn, x, h=1e-6):
    return (fn(x + h) - fn(x - h)) / (2 * h)


class TipSpeedRatioTests(SimpleTestCase):
    def test_direct_evaluation(self):
        self.assertAlmostEqual(tip_speed_ratio(1.0, 10.0, 5.0, 0.3, 0.3), 2.0, places=12)

    def test_zero_speed(self):
        self.assertEqual(tip_speed_ratio(2.0, 0.0, 8.0, 0.1, 0.0), 0.0)

    def test_side_on_wind_is_singular(self):
        with self.assertRaises(SingularOrientation):
            tip_speed_ratio(1.0, 10.0, 10.0, math.pi / 2, 0.0)

    def test_calm_wind_is_singular(self):
        with self.assertRaises(SingularOrientation):
            tip_speed_ratio(1.0, 10.0, 0.0, 0.0, 0.0)


class DragCoefficientTests(SimpleTestCase):
    def setUp(self):
        self.poly = CdPolynomial()

    def test_value_at_origin(self):
        self.assertEqual(drag_coefficient(0.0, 0.0), 0.25382)

    def test_unit_tip_speed(self):
        self.assertAlmostEqual(drag_coefficient(1.0, 0.0), 0.15774, places=12)

    def test_matches_power_sum_oracle(self):
        rng = np.random.default_rng(3)
        for lam, beta in rng.uniform([0.0, -0.2], [12.0, 0.5], size=(50, 2)):
            expected = horner_oracle(self.poly.a, lam) + horner_oracle(self.poly.b, lam) * beta
            actual = drag_coefficient(lam, beta, self.poly)
            self.assertLessEqual(abs(actual - expected), 1e-12 * max(abs(expected), 1.0))

    def test_affine_in_pitch(self):
        for lam, beta in [(0.5, 0.1), (4.0, -0.3), (9.0, 0.7)]:
            with self.subTest(lam=lam, beta=beta):
                delta = drag_coefficient(lam, beta) - drag_coefficient(lam, 0.0)
                self.assertAlmostEqual(delta, horner_oracle(self.poly.b, lam) * beta, places=12)

    def test_partials_match_central_differences(self):
        for lam, beta in [(3.0, 0.05), (8.0, 0.2), (11.0, -0.1)]:
            with self.subTest(lam=lam, beta=beta):
                d_lam, d_beta = drag_coefficient_partials(lam, beta)
                fd_lam = central_difference(lambda v: drag_coefficient(v, beta), lam)
                fd_beta = central_difference(lambda v: drag_coefficient(lam, v), beta)
                self.assertAlmostEqual(d_lam, fd_lam, places=7)
                self.assertAlmostEqual(d_beta, fd_beta, places=7)


class ForcesAndPowerTests(SimpleTestCase):
    def setUp(self):
        self.params = AeroParams(rho=1.25, rp=1.0)
        self.wind = WindInput(vv=10.0, alpha=0.2)

    def test_drag_force_direct_evaluation(self):
        force = drag_force(self.wind, 0.2, 0.25382, self.params)
        self.assertAlmostEqual(force, (math.pi * 1.25 / 2) * 0.25382 * 100.0, places=9)

    def test_drag_and_power_vanish_without_facing_wind(self):
        calm = WindInput(vv=0.0, alpha=0.0)
        self.assertEqual(drag_force(calm, 0.3, 0.25, self.params), 0.0)
        self.assertEqual(mechanical_power(calm, 0.3, 0.4, self.params), 0.0)
        side_on = 0.2 + math.pi / 2
        self.assertAlmostEqual(drag_force(self.wind, side_on, 0.25, self.params), 0.0, places=12)
        self.assertAlmostEqual(
            mechanical_power(self.wind, side_on, 0.4, self.params), 0.0, places=12
        )

    def test_mechanical_power_direct_evaluation(self):
        power = mechanical_power(self.wind, 0.2, 0.4, self.params)
        self.assertAlmostEqual(power, (math.pi * 1.25 / 2) * 0.4 * 1000.0, places=8)

    def test_torque_direct_evaluation(self):
        torque = aerodynamic_torque(self.wind, 0.2, 2.0, 0.4, self.params)
        self.assertAlmostEqual(torque, (math.pi * 1.25 / 4) * 0.4 * 100.0, places=9)

    def test_power_equals_torque_times_speed(self):
        rng = np.random.default_rng(11)
        for omega, psi, beta in rng.uniform([1.0, -0.5, 0.0], [40.0, 0.5, 0.3], size=(20, 3)):
            lam = tip_speed_ratio(self.params.rp, omega, self.wind.vv, psi, self.wind.alpha)
            cp = power_coefficient(lam, beta)
            torque = aerodynamic_torque(self.wind, psi, lam, cp, self.params)
            power = mechanical_power(self.wind, psi, cp, self.params)
            self.assertLessEqual(abs(torque * omega - power), 1e-10 * max(abs(power), 1.0))

    def test_torque_rejects_degenerate_tip_speed(self):
        with self.assertRaises(DegenerateTipSpeed):
            aerodynamic_torque(self.wind, 0.2, 0.0, 0.4, self.params)

    def test_clamped_torque_with_calm_wind(self):
        calm = WindInput(vv=0.0, alpha=0.0)
        self.assertEqual(aerodynamic_torque(calm, 0.0, 0.0, 0.4, self.params, clamp=True), 0.0)


class PowerCoefficientTests(SimpleTestCase):
    def test_zero_tip_speed_extracts_nothing(self):
        self.assertEqual(power_coefficient(0.0, 0.0), 0.0)

    def test_interior_optimum(self):
        lam_opt, cp_opt = optimal_tip_speed_ratio()
        self.assertGreater(lam_opt, 0.0)
        self.assertLess(lam_opt, 15.0)
        self.assertGreater(cp_opt, 0.45)
        self.assertLess(cp_opt, 16.0 / 27.0)

    def test_bounded_by_optimum(self):
        _, cp_opt = optimal_tip_speed_ratio()
        rng = np.random.default_rng(5)
        for lam, beta in rng.uniform([0.0, -0.1], [20.0, 0.5], size=(500, 2)):
            value = power_coefficient(lam, beta)
            self.assertGreaterEqual(value, 0.0)
            self.assertLessEqual(value, cp_opt + 1e-8)

    def test_partials_match_central_differences(self):
        params = CpParameters()
        for lam, beta in [(6.0, 0.05), (8.0, 0.1), (10.0, 0.02)]:
            with self.subTest(lam=lam, beta=beta):
                evaluation = evaluate_power_coefficient(lam, beta, params)
                fd_lam = central_difference(lambda v: power_coefficient(v, beta), lam)
                fd_beta = central_difference(lambda v: power_coefficient(lam, v), beta)
                self.assertAlmostEqual(evaluation.d_lam, fd_lam, places=6)
                self.assertAlmostEqual(evaluation.d_beta, fd_beta, places=5)

    def test_negative_pitch_is_treated_as_zero(self):
        self.assertEqual(power_coefficient(7.0, -0.2), power_coefficient(7.0, 0.0))
        self.assertEqual(evaluate_power_coefficient(7.0, -0.2).d_beta, 0.0)

    def test_zero_pitch_reports_the_feathering_partial(self):
        h = 1e-7
        forward = (power_coefficient(7.0, h) - power_coefficient(7.0, 0.0)) / h
        self.assertAlmostEqual(evaluate_power_coefficient(7.0, 0.0).d_beta, forward, places=4)
        self.assertLess(evaluate_power_coefficient(7.0, 0.0).d_beta, 0.0)

    def test_clipped_strictly_below_betz(self):
        evaluation = evaluate_power_coefficient(8.0, 0.05, CpParameters(c6=1.0))
        self.assertLess(evaluation.value, 16.0 / 27.0)
        self.assertGreater(evaluation.value, 0.5925)
        self.assertEqual((evaluation.d_lam, evaluation.d_beta), (0.0, 0.0))


class YawAndPitchTests(SimpleTestCase):
    def setUp(self):
        self.params = AeroParams(dr=100.0, fr=10.0, lever=2.0)

    def test_balanced_rest(self):
        self.assertEqual(yaw_acceleration(0.0, 40.0, 40.0, self.params), 0.0)

    def test_balanced_drag_is_pure_damping(self):
        self.assertAlmostEqual(yaw_acceleration(0.4, 12.0, 12.0, self.params), -0.04, places=12)

    def test_direct_evaluation(self):
        self.assertAlmostEqual(yaw_acceleration(0.1, 80.0, 30.0, self.params), 0.99, places=12)

    def test_odd_in_drag_difference(self):
        forward = yaw_acceleration(0.0, 35.0, 10.0, self.params)
        backward = yaw_acceleration(0.0, 10.0, 35.0, self.params)
        self.assertAlmostEqual(forward, -backward, places=12)

    def test_pitch_equilibrium(self):
        self.assertEqual(pitch_dynamics(0.1, 0.1, 0.0, 0.5, 1), 0.0)

    def test_pitch_direct_evaluation(self):
        self.assertAlmostEqual(pitch_dynamics(0.0, 0.1, 0.05, 0.5, 1), 0.3, places=12)

    def test_pitch_sum_ignores_differential_command(self):
        beta1, beta2, beta_ref, delta, t_beta = 0.03, 0.11, 0.05, 0.07, 0.5
        total = pitch_dynamics(beta1, beta_ref, delta, t_beta, 1) + pitch_dynamics(
            beta2, beta_ref, delta, t_beta, -1
        )
        self.assertAlmostEqual(total, (2 * beta_ref - (beta1 + beta2)) / t_beta, places=12)


class RotorLoadsTests(SimpleTestCase):
    def test_side_on_wind_carries_no_load(self):
        loads = rotor_loads(
            WindInput(vv=8.0, alpha=0.0), math.pi / 2, 30.0, 0.05,
            AeroParams(), CdPolynomial(), CpParameters(),
        )
        self.assertTrue(loads.calm)
        self.assertEqual((loads.torque, loads.drag), (0.0, 0.0))

    def test_loads_compose_building_blocks(self):
        params, wind = AeroParams(), WindInput(vv=8.0, alpha=0.1)
        loads = rotor_loads(wind, 0.15, 32.0, 0.05, params, CdPolynomial(), CpParameters())
        lam = tip_speed_ratio(params.rp, 32.0, wind.vv, 0.15, wind.alpha)
        cp = power_coefficient(lam, 0.05)
        cd = drag_coefficient(lam, 0.05)
        self.assertAlmostEqual(loads.lam, lam, places=12)
        expected_torque = aerodynamic_torque(wind, 0.15, lam, cp, params)
        self.assertAlmostEqual(loads.torque, expected_torque, places=9)
        self.assertAlmostEqual(loads.drag, drag_force(wind, 0.15, cd, params), places=9)
