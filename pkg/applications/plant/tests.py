import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from applications.aero.formulas import (
    aerodynamic_torque,
    drag_coefficient,
    drag_force,
    pitch_dynamics,
    power_coefficient,
    tip_speed_ratio,
    yaw_acceleration,
)
from applications.aero.models import WindInput
from applications.machine.electrical import (
    electrical_derivative,
    electromagnetic_torque,
    emf_rate,
    fault_inductance_matrix,
    fault_scaling,
    inductance_derivative,
    inductance_matrix,
    rotor_acceleration,
)
from applications.machine.models import ElectricalState, FaultPhase, FaultSpec
from applications.machine.park import dq_currents

from .dynamics import drift_field, full_derivative, input_matrix
from .models import PlantEnvironment, PlantInput, PlantParams, PlantState
from .operating import phase_current_peak, steady_state

RNG_SEED = 7


def random_states(count, seed=RNG_SEED):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        x = np.empty(14)
        x[[0, 1]] = rng.uniform(0.0, 0.2, 2)
        x[2] = rng.uniform(-0.4, 0.6)
        x[3] = rng.uniform(-0.2, 0.2)
        x[[4, 5, 6, 8, 9, 10]] = rng.uniform(-40.0, 40.0, 6)
        x[[7, 11]] = rng.uniform(10.0, 45.0, 2)
        x[[12, 13]] = rng.uniform(0.0, 2 * np.pi, 2)
        yield PlantState(x)


def converted_power_torque(state, turbine, fault, machine):
    """Faulted-machine torque from the stator power balance, −(Ė·I + ½·Iᵀ·L̇·I)/Ω."""

    currents, theta, omega = state.currents(turbine), state.theta_e(turbine), state.omega(turbine)
    scale, mask = fault_scaling(fault.mu_bar, fault.phase_index)
    l_dot = machine.p * omega * mask * inductance_derivative(theta, machine)
    converted = (scale * emf_rate(theta, omega, machine)) @ currents
    converted += 0.5 * currents @ l_dot @ currents
    return -converted / omega


def hand_drift(state, t, fault, env, params):
    """Drift assembled directly from the aero and machine building blocks."""

    aero, machine, wind = params.aero, params.machine, env.wind
    f = np.zeros(14)
    drags = {}
    for turbine, (beta_row, current_rows, omega_row, theta_row) in {
        1: (0, slice(4, 7), 7, 12),
        2: (1, slice(8, 11), 11, 13),
    }.items():
        beta, omega = state.beta(turbine), state.omega(turbine)
        lam = tip_speed_ratio(aero.rp, omega, wind.vv, state.psi, wind.alpha)
        gamma_a = aerodynamic_torque(wind, state.psi, lam, power_coefficient(lam, beta), aero)
        drags[turbine] = drag_force(wind, state.psi, drag_coefficient(lam, beta), aero)
        i_d, i_q, _ = dq_currents(state.currents(turbine), state.theta_e(turbine))
        active = fault if fault is not None and fault.severity_for(turbine, t) > 0 else None
        electrical = ElectricalState(
            currents=state.currents(turbine), theta_e=state.theta_e(turbine), omega=omega
        )
        f[beta_row] = pitch_dynamics(beta, env.beta_ref, 0.0, aero.t_beta, 1)
        f[current_rows] = electrical_derivative(electrical, np.zeros(3), active, machine)
        if active is None:
            gamma_em = electromagnetic_torque(i_d, i_q, machine)
        else:
            gamma_em = converted_power_torque(state, turbine, active, machine)
        f[omega_row] = rotor_acceleration(gamma_a, gamma_em, omega, machine)
        f[theta_row] = machine.p * omega
    f[2] = state.psi_dot
    f[3] = yaw_acceleration(state.psi_dot, drags[1], drags[2], aero)
    return f


class PlantTestCase(SimpleTestCase):
    def setUp(self):
        self.params = PlantParams()
        self.env = PlantEnvironment(wind=WindInput(vv=8.0, alpha=0.1), beta_ref=0.05)
        self.fault = FaultSpec(mu_bar=0.2, turbine=1, phase=FaultPhase.B, t_on=7.0)


class DriftFieldTests(PlantTestCase):
    def test_zero_severity_matches_healthy(self):
        for state in random_states(20):
            assert_array_equal(
                drift_field(state, 8.0, FaultSpec(mu_bar=0.0), self.env, self.params),
                drift_field(state, 8.0, None, self.env, self.params),
            )

    def test_fault_is_off_before_onset(self):
        state = next(random_states(1))
        assert_array_equal(
            drift_field(state, 6.5, self.fault, self.env, self.params),
            drift_field(state, 6.5, None, self.env, self.params),
        )
        self.assertFalse(
            np.array_equal(
                drift_field(state, 7.0, self.fault, self.env, self.params),
                drift_field(state, 7.0, None, self.env, self.params),
            )
        )

    def test_rows_match_building_blocks(self):
        for state in random_states(100):
            for t in (3.0, 8.0):
                expected = hand_drift(state, t, self.fault, self.env, self.params)
                actual = drift_field(state, t, self.fault, self.env, self.params)
                assert_allclose(actual, expected, rtol=1e-12, atol=1e-12)

    def test_mechanical_rows_vanish_at_operating_point(self):
        state = steady_state(self.params, self.env.wind, (30.0, 30.0), self.env.beta_ref)
        f = drift_field(state, 0.0, None, self.env, self.params)
        assert_allclose(f[[0, 1, 2, 3, 7, 11]], np.zeros(6), atol=1e-10)

    def test_healthy_machine_rows_ignore_severity(self):
        state = next(random_states(1, seed=99))
        reference = drift_field(state, 8.0, FaultSpec(mu_bar=0.04), self.env, self.params)
        for mu_bar in (0.1, 0.2, 0.5):
            f = drift_field(state, 8.0, FaultSpec(mu_bar=mu_bar), self.env, self.params)
            assert_array_equal(f[8:11], reference[8:11])


class InputMatrixTests(PlantTestCase):
    def test_zero_rows(self):
        for state in random_states(20):
            g = input_matrix(state, 8.0, self.fault, self.params)
            assert_array_equal(g[[2, 3, 7, 11, 12, 13]], np.zeros((6, 7)))

    def test_pitch_column(self):
        g = input_matrix(next(random_states(1)), 0.0, None, self.params)
        t_beta = self.params.aero.t_beta
        assert_array_equal(g[:, 0], np.r_[1 / t_beta, -1 / t_beta, np.zeros(12)])
        assert_array_equal(g[[0, 1], 1:], np.zeros((2, 6)))

    def test_inductance_blocks(self):
        state = next(random_states(1))
        theta1, theta2 = state.theta_e(1), state.theta_e(2)
        g = input_matrix(state, 8.0, self.fault, self.params)
        faulty = fault_inductance_matrix(theta1, 0.2, FaultPhase.B, self.params.machine)
        assert_allclose(g[4:7, 1:4], np.linalg.inv(faulty), rtol=1e-12)
        assert_allclose(
            g[8:11, 4:7], np.linalg.inv(inductance_matrix(theta2, self.params.machine)), rtol=1e-12
        )
        assert_array_equal(g[4:7, 4:7], np.zeros((3, 3)))
        assert_array_equal(g[8:11, 1:4], np.zeros((3, 3)))

    def test_healthy_block_matches_second_machine_structure(self):
        state = next(random_states(1))
        g = input_matrix(state, 0.0, None, self.params)
        expected = np.linalg.inv(inductance_matrix(state.theta_e(1), self.params.machine))
        assert_allclose(g[4:7, 1:4], expected, rtol=1e-12)

    def test_healthy_columns_ignore_severity(self):
        state = next(random_states(1, seed=3))
        reference = input_matrix(state, 8.0, FaultSpec(mu_bar=0.05), self.params)
        g = input_matrix(state, 8.0, FaultSpec(mu_bar=0.3), self.params)
        assert_array_equal(g[:, 4:7], reference[:, 4:7])


class FullDerivativeTests(PlantTestCase):
    def setUp(self):
        super().setUp()
        rng = np.random.default_rng(RNG_SEED + 1)
        self.inputs = [PlantInput(rng.uniform(-50.0, 50.0, 7)) for _ in range(3)]

    def test_zero_input_is_drift(self):
        state = next(random_states(1))
        assert_array_equal(
            full_derivative(state, PlantInput(), 8.0, self.fault, self.env, self.params),
            drift_field(state, 8.0, self.fault, self.env, self.params),
        )

    def test_input_matrix_matches_affine_difference(self):
        for state in random_states(10):
            for u in self.inputs:
                args = (8.0, self.fault, self.env, self.params)
                with_input = full_derivative(state, u, *args)
                without = full_derivative(state, PlantInput(), *args)
                g = input_matrix(state, 8.0, self.fault, self.params)
                scale = np.abs(with_input).max()
                assert_allclose(with_input - without, g @ u.vector, rtol=0, atol=1e-10 * scale)

    def test_control_affinity(self):
        u1, u2, _ = self.inputs
        a, b = 0.7, -1.9
        for state in random_states(10, seed=21):
            def f(u):
                return full_derivative(state, u, 8.0, self.fault, self.env, self.params)

            drift = drift_field(state, 8.0, self.fault, self.env, self.params)
            combined = f(a * u1.vector + b * u2.vector)
            expected = a * f(u1) + b * f(u2) - (a + b - 1) * drift
            assert_allclose(combined, expected, rtol=0, atol=1e-9 * np.abs(expected).max())

    def test_electrical_angles_follow_speed(self):
        state = next(random_states(1))
        f = full_derivative(state, self.inputs[0], 0.0, None, self.env, self.params)
        p = self.params.machine.p
        self.assertEqual(f[12], p * state.omega(1))
        self.assertEqual(f[13], p * state.omega(2))


class OperatingPointTests(PlantTestCase):
    def test_steady_state_layout(self):
        state = steady_state(self.params, self.env.wind, (28.0, 31.0), 0.05)
        self.assertEqual(state.psi, 0.1)
        self.assertEqual((state.beta(1), state.beta(2)), (0.05, 0.05))
        self.assertEqual((state.omega(1), state.omega(2)), (28.0, 31.0))
        for turbine in (1, 2):
            i_d, i_q, i_h = dq_currents(state.currents(turbine), state.theta_e(turbine))
            self.assertAlmostEqual(i_d, 0.0, places=12)
            self.assertAlmostEqual(i_h, 0.0, places=12)
            self.assertLess(i_q, 0.0)

    def test_phase_current_peak(self):
        state = steady_state(self.params, self.env.wind, (30.0, 30.0), 0.05)
        i_q = dq_currents(state.currents(1), 0.0)[1]
        self.assertAlmostEqual(phase_current_peak(state, 1), np.sqrt(2 / 3) * abs(i_q), places=10)

    def test_state_names(self):
        state = PlantState.from_fields(psi=0.3, omega2=12.0)
        self.assertEqual(state.as_dict()['psi'], 0.3)
        self.assertEqual(state.omega(2), 12.0)
        with self.assertRaises(ValueError):
            PlantState.from_fields(gamma=1.0)
