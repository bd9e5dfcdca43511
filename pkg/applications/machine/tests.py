import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from applications.core.exceptions import InvalidSeverity

from .electrical import (
    electrical_derivative,
    electromagnetic_torque,
    emf_rate,
    emf_vector,
    fault_inductance_matrix,
    inductance_derivative,
    inductance_matrix,
    rotor_acceleration,
    winding_model,
)
from .models import ElectricalState, FaultPhase, FaultSpec, MachineParams
from .park import dq_currents, homopolar_current, inverse_park, park_transform

RNG_SEED = 20240607


def rk4_currents(state, voltages, fault, params, horizon, steps):
    """Reference trajectory of the electrical subsystem at constant speed."""

    h = horizon / steps
    currents, theta = np.array(state.currents, dtype=float), state.theta_e

    def rhs(theta_e, i):
        local = ElectricalState(currents=i, theta_e=theta_e, omega=state.omega)
        return electrical_derivative(local, voltages, fault, params)

    rate = params.p * state.omega
    for _ in range(steps):
        k1 = rhs(theta, currents)
        k2 = rhs(theta + rate * h / 2, currents + h / 2 * k1)
        k3 = rhs(theta + rate * h / 2, currents + h / 2 * k2)
        k4 = rhs(theta + rate * h, currents + h * k3)
        currents = currents + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        theta += rate * h
    return currents


class MachineParamsTests(SimpleTestCase):
    def test_profile_constants(self):
        params = MachineParams()
        self.assertGreater(params.ls0, abs(params.ms0))
        self.assertGreater(params.ms0, 0.0)

    def test_rejects_inconsistent_zero_sequence(self):
        with self.assertRaises(ValueError):
            MachineParams(ld=8e-3, lq=10e-3, l0=12e-3)

    def test_fault_spec_rejects_full_short(self):
        with self.assertRaises(InvalidSeverity):
            FaultSpec(mu_bar=1.0)

    def test_fault_severity_is_scheduled(self):
        fault = FaultSpec(mu_bar=0.2, turbine=1, phase=FaultPhase.B, t_on=7.0)
        self.assertEqual(fault.severity_for(1, 6.9999), 0.0)
        self.assertEqual(fault.severity_for(1, 7.0), 0.2)
        self.assertEqual(fault.severity_for(2, 8.0), 0.0)


class ParkTransformTests(SimpleTestCase):
    def setUp(self):
        self.thetas = np.random.default_rng(RNG_SEED).uniform(0.0, 2 * math.pi, 1000)

    def test_orthonormal(self):
        for theta in self.thetas:
            park = park_transform(theta)
            assert_allclose(park @ park.T, np.eye(3), rtol=0, atol=1e-12)

    def test_homopolar_vector(self):
        assert_allclose(park_transform(0.0) @ np.ones(3), [0.0, 0.0, math.sqrt(3)], atol=1e-12)

    def test_balanced_currents_give_constant_dq(self):
        amplitude, shift = 3.0, 0.4
        for theta in self.thetas[:50]:
            currents = amplitude * np.cos(theta + np.array([0, -2, 2]) * math.pi / 3 + shift)
            i_d, i_q, i_h = dq_currents(currents, theta)
            self.assertAlmostEqual(i_d, math.sqrt(1.5) * amplitude * math.cos(shift), places=10)
            self.assertAlmostEqual(i_q, math.sqrt(1.5) * amplitude * math.sin(shift), places=10)
            self.assertAlmostEqual(i_h, 0.0, places=12)

    def test_dq_of_zero_and_common_mode(self):
        self.assertEqual(dq_currents(np.zeros(3), 1.2), (0.0, 0.0, 0.0))
        i_d, i_q, i_h = dq_currents(np.ones(3), 2.5)
        self.assertAlmostEqual(i_d, 0.0, places=12)
        self.assertAlmostEqual(i_q, 0.0, places=12)
        self.assertAlmostEqual(i_h, math.sqrt(3), places=12)

    def test_homopolar_ignores_angle(self):
        currents = np.array([1.0, -0.25, -0.75])
        for theta in self.thetas[:20]:
            self.assertAlmostEqual(dq_currents(currents, theta)[2], 0.0, places=12)
        self.assertAlmostEqual(homopolar_current(np.ones(3)), math.sqrt(3), places=12)

    def test_inverse_park(self):
        dqh = np.array([0.3, -1.2, 0.1])
        assert_allclose(park_transform(0.9) @ inverse_park(dqh, 0.9), dqh, atol=1e-12)


class InductanceTests(SimpleTestCase):
    def setUp(self):
        self.params = MachineParams()
        self.thetas = np.random.default_rng(RNG_SEED + 1).uniform(0.0, 2 * math.pi, 1000)

    def test_symmetric(self):
        for theta in self.thetas:
            matrix = inductance_matrix(theta, self.params)
            assert_array_equal(matrix, matrix.T)

    def test_period_pi(self):
        for theta in self.thetas[:100]:
            assert_allclose(
                inductance_matrix(theta + math.pi, self.params),
                inductance_matrix(theta, self.params),
                rtol=0,
                atol=1e-15,
            )

    def test_park_diagonalises_profile(self):
        expected = np.diag([self.params.ld, self.params.lq, self.params.l0])
        for theta in np.linspace(0.0, 2 * math.pi, 360, endpoint=False):
            park = park_transform(theta)
            projected = park @ inductance_matrix(theta, self.params) @ park.T
            assert_allclose(projected, expected, atol=1e-14)

    def test_positive_definite(self):
        for theta in self.thetas[:50]:
            self.assertGreater(np.linalg.eigvalsh(inductance_matrix(theta, self.params)).min(), 0.0)

    def test_derivative_matches_central_differences(self):
        h = 1e-6
        for theta in self.thetas[:50]:
            forward, backward = (inductance_matrix(theta + s, self.params) for s in (h, -h))
            expected = (forward - backward) / (2 * h)
            analytic = inductance_derivative(theta, self.params)
            self.assertLess(
                np.linalg.norm(analytic - expected), 1e-6 * np.linalg.norm(analytic)
            )

    def test_healthy_fault_matrix_is_identical(self):
        for phase in FaultPhase.values:
            for theta in self.thetas[:20]:
                assert_array_equal(
                    fault_inductance_matrix(theta, 0.0, phase, self.params),
                    inductance_matrix(theta, self.params),
                )

    def test_fault_scales_row_and_column_once(self):
        theta = 0.7
        healthy = inductance_matrix(theta, self.params)
        faulty = fault_inductance_matrix(theta, 0.2, FaultPhase.B, self.params)
        assert_allclose(faulty[1, [0, 2]], 0.8 * healthy[1, [0, 2]], rtol=1e-15)
        assert_allclose(faulty[[0, 2], 1], 0.8 * healthy[[0, 2], 1], rtol=1e-15)
        self.assertAlmostEqual(faulty[1, 1], 0.8 * healthy[1, 1], places=15)
        assert_array_equal(faulty[np.ix_([0, 2], [0, 2])], healthy[np.ix_([0, 2], [0, 2])])

    def test_fault_matrix_stays_symmetric(self):
        for mu_bar in (0.04, 0.2, 0.6, 0.95):
            for phase in FaultPhase.values:
                matrix = fault_inductance_matrix(1.3, mu_bar, phase, self.params)
                assert_array_equal(matrix, matrix.T)

    def test_invalid_severity(self):
        for mu_bar in (-0.1, 1.0, 1.5):
            with self.subTest(mu_bar=mu_bar), self.assertRaises(InvalidSeverity):
                fault_inductance_matrix(0.0, mu_bar, FaultPhase.A, self.params)


class EmfTests(SimpleTestCase):
    def setUp(self):
        self.params = MachineParams()

    def test_balanced(self):
        for theta in np.linspace(0.0, 6.0, 25):
            self.assertAlmostEqual(float(np.sum(emf_vector(theta, self.params))), 0.0, places=14)

    def test_value_at_zero_angle(self):
        assert_allclose(emf_vector(0.0, self.params), self.params.phi_f * np.array([1, -0.5, -0.5]))

    def test_rate_matches_trajectory_differences(self):
        h, omega = 1e-6, 30.0
        rate = self.params.p * omega
        for theta in (0.1, 1.7, 4.0):
            forward, backward = (emf_vector(theta + s * rate * h, self.params) for s in (1, -1))
            expected = (forward - backward) / (2 * h)
            analytic = emf_rate(theta, omega, self.params)
            self.assertLess(np.linalg.norm(analytic - expected), 1e-6 * np.linalg.norm(analytic))


class ElectricalDerivativeTests(SimpleTestCase):
    def setUp(self):
        self.params = MachineParams()
        self.state = ElectricalState(currents=np.array([2.0, -5.0, 3.5]), theta_e=0.8, omega=25.0)

    def test_zero_severity_reduces_to_healthy(self):
        voltages = np.array([10.0, -4.0, 1.0])
        assert_array_equal(
            electrical_derivative(self.state, voltages, FaultSpec(mu_bar=0.0), self.params),
            electrical_derivative(self.state, voltages, None, self.params),
        )

    def test_equilibrium_at_rest(self):
        rest = ElectricalState(currents=np.zeros(3), theta_e=0.4, omega=0.0)
        assert_array_equal(electrical_derivative(rest, np.zeros(3), None, self.params), np.zeros(3))

    def test_emf_compensating_voltage(self):
        open_circuit = ElectricalState(currents=np.zeros(3), theta_e=1.1, omega=40.0)
        voltages = emf_rate(1.1, 40.0, self.params)
        derivative = electrical_derivative(open_circuit, voltages, None, self.params)
        assert_allclose(derivative, np.zeros(3), atol=1e-9)

    def test_affine_in_voltages(self):
        fault = FaultSpec(mu_bar=0.2, phase=FaultPhase.C)
        v1, v2 = np.array([5.0, -3.0, 8.0]), np.array([-2.0, 7.0, 1.0])

        def f(v):
            return electrical_derivative(self.state, v, fault, self.params)

        residual = f(v1 + v2) - f(v1) - f(v2) + f(np.zeros(3))
        assert_allclose(residual, np.zeros(3), atol=1e-9 * np.abs(f(v1)).max())

    def test_matches_refined_trajectory(self):
        fault = FaultSpec(mu_bar=0.2)
        voltages = np.array([30.0, -12.0, -15.0])
        h = 1e-5
        forward = rk4_currents(self.state, voltages, fault, self.params, h, 10)
        backward = rk4_currents(self.state, voltages, fault, self.params, -h, 10)
        expected = (forward - backward) / (2 * h)
        analytic = electrical_derivative(self.state, voltages, fault, self.params)
        self.assertLess(np.linalg.norm(analytic - expected), 1e-5 * np.linalg.norm(analytic))


class TorqueTests(SimpleTestCase):
    def setUp(self):
        self.params = MachineParams()

    def test_no_quadrature_current(self):
        self.assertEqual(electromagnetic_torque(3.0, 0.0, self.params), 0.0)

    def test_magnet_torque(self):
        # Generating with i_q < 0; the q-axis magnet flux is √(3/2)·φ_f.
        self.assertAlmostEqual(
            electromagnetic_torque(0.0, -1.0, self.params),
            self.params.p * math.sqrt(1.5) * self.params.phi_f,
        )

    def test_round_rotor_ignores_direct_current(self):
        params = MachineParams(ld=9e-3, lq=9e-3)
        self.assertEqual(
            electromagnetic_torque(0.0, 2.0, params), electromagnetic_torque(5.0, 2.0, params)
        )

    def test_reluctance_torque_matches_abc_coenergy(self):
        rng = np.random.default_rng(RNG_SEED + 2)
        for theta, *currents in rng.uniform([0, -10, -10, -10], [2 * math.pi, 10, 10, 10], (50, 4)):
            currents = np.array(currents)
            i_d, i_q, _ = dq_currents(currents, theta)
            coenergy = 0.5 * currents @ inductance_derivative(theta, self.params) @ currents
            self.assertAlmostEqual(
                self.params.p * coenergy,
                self.params.p * (self.params.ld - self.params.lq) * i_d * i_q,
                places=10,
            )

    def test_torque_matches_stator_power_balance(self):
        rng = np.random.default_rng(RNG_SEED + 3)
        samples = rng.uniform([0, 5, -20, -60], [2 * math.pi, 45, 20, 0], (40, 4))
        for theta, omega, i_d, i_q in samples:
            currents = inverse_park(np.array([i_d, i_q, 0.0]), theta)
            l_dot = self.params.p * omega * inductance_derivative(theta, self.params)
            converted = emf_rate(theta, omega, self.params) @ currents
            converted += 0.5 * currents @ l_dot @ currents
            gamma_em = electromagnetic_torque(i_d, i_q, self.params)
            self.assertLessEqual(abs(gamma_em * omega + converted), 0.01 * abs(converted))
            self.assertAlmostEqual(
                winding_model(theta, self.params).torque(currents, self.params.p),
                gamma_em,
                places=9,
            )

    def test_faulted_torque_matches_faulted_power_balance(self):
        theta, omega = 0.9, 30.0
        currents = np.array([12.0, -20.0, 5.0])
        for mu_bar in (0.04, 0.2, 0.5):
            winding = winding_model(theta, self.params, mu_bar, FaultPhase.B)
            scale = np.array([1.0, 1.0 - mu_bar, 1.0])
            converted = (scale * emf_rate(theta, omega, self.params)) @ currents
            converted += 0.5 * self.params.p * omega * currents @ winding.d_inductance @ currents
            self.assertAlmostEqual(
                winding.torque(currents, self.params.p) * omega, -converted, places=8
            )

    def test_torque_sensitivities_match_differences(self):
        h = 1e-6
        currents = np.array([7.0, -15.0, 6.0])
        for theta, mu_bar in ((0.3, 0.0), (2.2, 0.2)):
            winding = winding_model(theta, self.params, mu_bar, FaultPhase.A)
            gradient = winding.torque_gradient(currents, self.params.p)
            for k in range(3):
                step = np.zeros(3)
                step[k] = h
                expected = (
                    winding.torque(currents + step, self.params.p)
                    - winding.torque(currents - step, self.params.p)
                ) / (2 * h)
                self.assertAlmostEqual(gradient[k], expected, places=5)
            forward, backward = (
                winding_model(theta + s * h, self.params, mu_bar, FaultPhase.A).torque(
                    currents, self.params.p
                )
                for s in (1, -1)
            )
            self.assertAlmostEqual(
                winding.torque_angle_sensitivity(currents, self.params.p),
                (forward - backward) / (2 * h),
                places=5,
            )

    def test_rotor_acceleration(self):
        params = MachineParams(j=2.0, fv=1.0)
        self.assertAlmostEqual(rotor_acceleration(10.0, 4.0, 2.0, params), 2.0)
        self.assertEqual(rotor_acceleration(5.0, 5.0, 0.0, params), 0.0)
        self.assertAlmostEqual(rotor_acceleration(4.0 + 3.0, 4.0, 3.0, params), 0.0)
