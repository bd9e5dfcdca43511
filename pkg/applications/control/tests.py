import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from applications.aero.models import WindInput
from applications.core.exceptions import SingularDecoupling
from applications.machine.electrical import emf_rate, winding_model
from applications.machine.models import FaultPhase, FaultSpec
from applications.machine.park import dq_currents, park_transform
from applications.plant.dynamics import drift_field, full_derivative, input_matrix
from applications.plant.models import (
    CURRENTS,
    VOLTAGES,
    PlantEnvironment,
    PlantInput,
    PlantParams,
    PlantState,
)
from applications.plant.operating import steady_state

from .decoupling import lambda_vector, output_decomposition, outputs, theta_matrix
from .homogeneous import (
    exponents,
    homogeneity_exponent,
    sliding_variable,
    sliding_variables,
    stabilizer,
)
from .laws import (
    ActiveController,
    OpenLoopController,
    PassiveController,
    active_control,
    build_controller,
    passive_control,
)
from .models import (
    RELATIVE_DEGREES,
    ControlLaw,
    ControllerGains,
    ControlMode,
    References,
)

FD_STEP = 1e-6
T_FAULTED = 8.0


def random_states(count, seed=17):
    """States inside the operating envelope: facing wind, attached flow, positive pitch."""

    rng = np.random.default_rng(seed)
    for _ in range(count):
        x = np.empty(14)
        x[[0, 1]] = rng.uniform(0.02, 0.15, 2)
        x[2] = rng.uniform(-0.2, 0.4)
        x[3] = rng.uniform(-0.1, 0.1)
        x[[4, 5, 6, 8, 9, 10]] = rng.uniform(-30.0, 30.0, 6)
        x[[7, 11]] = rng.uniform(22.0, 38.0, 2)
        x[[12, 13]] = rng.uniform(0.0, 2 * math.pi, 2)
        yield PlantState(x)


def top_chain_values(x, t, fault, env, params):
    """y^(ε−1) of every channel, built from plant rows and the Park transform only."""

    state = PlantState(x)
    f = drift_field(state, t, fault, env, params)
    i_d1, _, i_h1 = dq_currents(state.currents(1), state.theta_e(1))
    i_d2, _, i_h2 = dq_currents(state.currents(2), state.theta_e(2))
    return np.array([f[3], f[7], i_d1, i_h1, f[11], i_d2, i_h2])


def lower_chain_values(x, refs):
    """Every y^(k) with k < ε − 1; none of them may see the input."""

    state = PlantState(x)
    return np.array(
        [state.psi - refs.alpha, state.psi_dot, state.omega(1), state.omega(2)]
    )


def central_rate(fn, x, direction, t, step=FD_STEP):
    """Central difference along ``direction``; the step shrinks with the state velocity."""

    s = step / max(1.0, float(np.abs(direction).max()))
    return (fn(x + s * direction, t + s) - fn(x - s * direction, t - s)) / (2 * s)


def finite_difference_rates(x, u, t, fault, env, params):
    """d/dt of y^(ε−1) along ẋ = f + g·u, by central differences."""

    x = np.asarray(x, dtype=float)
    velocity = full_derivative(x, u, t, fault, env, params)
    return central_rate(
        lambda point, time: top_chain_values(point, time, fault, env, params), x, velocity, t
    )


def assert_relative_close(testcase, actual, expected, tolerance):
    for index, (a, b) in enumerate(zip(actual, expected, strict=True)):
        testcase.assertLessEqual(
            abs(a - b), tolerance * max(abs(b), 1.0), msg=f'channel {index}: {a!r} vs {b!r}'
        )


class ControlTestCase(SimpleTestCase):
    def setUp(self):
        self.params = PlantParams()
        self.env = PlantEnvironment(wind=WindInput(vv=8.0, alpha=0.1), beta_ref=0.05)
        self.refs = References(alpha=0.1, omega_ref_1=32.0, omega_ref_2=32.0, beta_ref=0.05)
        self.gains = ControllerGains()
        self.fault = FaultSpec(mu_bar=0.2, turbine=1, phase=FaultPhase.B, t_on=7.0)


class ControllerGainsTests(SimpleTestCase):
    def test_defaults_are_valid(self):
        gains = ControllerGains()
        self.assertEqual(len(gains.k_vector), 7)
        self.assertEqual(gains.surface(3), gains.psi_surface)
        self.assertEqual(gains.surface(1), ())

    def test_rejects_flat_homogeneity(self):
        with self.assertRaises(ValueError):
            ControllerGains(delta=1.0)

    def test_rejects_non_positive_regularisation(self):
        with self.assertRaises(ValueError):
            ControllerGains(eps=(1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0))

    def test_rejects_non_hurwitz_surface(self):
        with self.assertRaises(ValueError):
            ControllerGains(psi_surface=(25.0, -1.0))

    def test_rejects_unknown_mode(self):
        with self.assertRaises(ValueError):
            ControlLaw(mode='adaptive')


class OutputsTests(ControlTestCase):
    def test_tracking_point(self):
        state = steady_state(self.params, self.env.wind, (32.0, 32.0), 0.05)
        assert_allclose(outputs(state, self.refs).as_array(), np.zeros(7), atol=1e-12)

    def test_homopolar_output_ignores_angle(self):
        state = next(random_states(1))
        rotated = state.vector.copy()
        rotated[[12, 13]] += [1.1, -2.3]
        first, second = outputs(state, self.refs), outputs(PlantState(rotated), self.refs)
        self.assertAlmostEqual(first.ih1, second.ih1, places=12)
        self.assertAlmostEqual(first.ih2, second.ih2, places=12)

    def test_matches_park_oracle(self):
        for state in random_states(10):
            y = outputs(state, self.refs)
            park1 = park_transform(state.theta_e(1))
            park2 = park_transform(state.theta_e(2))
            self.assertAlmostEqual(y.psi, state.psi - 0.1, places=14)
            self.assertAlmostEqual(y.omega2, state.omega(2) - 32.0, places=12)
            self.assertAlmostEqual(y.id1, (park1 @ state.currents(1))[0], places=12)
            self.assertAlmostEqual(y.ih2, (park2 @ state.currents(2))[2], places=12)

    def test_csv_names(self):
        names = list(outputs(next(random_states(1)), self.refs).as_dict())
        self.assertEqual(names[0], 'y_psi')
        self.assertEqual(names[-1], 'y_ih2')


class DecompositionTests(ControlTestCase):
    def test_lambda_matches_drift_differences(self):
        for state in random_states(20):
            expected = finite_difference_rates(
                state.vector, PlantInput(), T_FAULTED, self.fault, self.env, self.params
            )
            analytic = lambda_vector(state, T_FAULTED, self.fault, self.env, self.refs, self.params)
            assert_relative_close(self, analytic, expected, 1e-4)

    def test_decomposition_matches_controlled_differences(self):
        rng = np.random.default_rng(4)
        for state in random_states(20, seed=23):
            u = PlantInput(np.r_[rng.uniform(-0.05, 0.05), rng.uniform(-60.0, 60.0, 6)])
            expected = finite_difference_rates(
                state.vector, u, T_FAULTED, self.fault, self.env, self.params
            )
            decomposition = output_decomposition(
                state, T_FAULTED, self.fault, self.env, self.refs, self.params
            )
            analytic = decomposition.lam + decomposition.theta @ u.vector
            assert_relative_close(self, analytic, expected, 1e-4)

    def test_relative_degrees(self):
        self.assertEqual(sum(RELATIVE_DEGREES), 11)
        rng = np.random.default_rng(8)
        for state in random_states(100, seed=31):
            u = rng.uniform(-50.0, 50.0, 7)
            direction = input_matrix(state, T_FAULTED, self.fault, self.params) @ u
            lower = central_rate(
                lambda point, _: lower_chain_values(point, self.refs), state.vector, direction, 0.0
            )
            assert_allclose(lower, np.zeros(4), atol=1e-8)
            theta = theta_matrix(state, T_FAULTED, self.fault, self.env, self.params)
            self.assertTrue(np.all(np.abs(theta @ u) > 0.0))

    def test_theta_zero_blocks(self):
        theta = theta_matrix(next(random_states(1)), T_FAULTED, self.fault, self.env, self.params)
        assert_array_equal(theta[0, 1:], np.zeros(6))
        assert_array_equal(theta[1:4, 4:], np.zeros((3, 3)))
        assert_array_equal(theta[4:, 1:4], np.zeros((3, 3)))
        assert_array_equal(theta[[2, 3, 5, 6], 0], np.zeros(4))

    def test_healthy_theta_uses_healthy_inductances(self):
        state = next(random_states(1))
        healthy = theta_matrix(state, T_FAULTED, FaultSpec(mu_bar=0.0), self.env, self.params)
        reference = theta_matrix(state, T_FAULTED, None, self.env, self.params)
        assert_array_equal(healthy, reference)
        inverse = input_matrix(state, T_FAULTED, None, self.params)[4:7, 1:4]
        park = park_transform(state.theta_e(1))
        assert_allclose(healthy[2, 1:4], (park @ inverse)[0], rtol=1e-12)
        assert_allclose(healthy[3, 1:4], (park @ inverse)[2], rtol=1e-12)

    def test_calm_wind_leaves_emf_terms_only(self):
        env = PlantEnvironment(wind=WindInput(vv=0.0, alpha=0.0), beta_ref=0.0)
        state = PlantState.from_fields(omega1=20.0, omega2=15.0, theta_e1=0.4, theta_e2=1.3)
        lam = lambda_vector(state, 0.0, None, env, References(), self.params)
        machine = self.params.machine
        g = input_matrix(state, 0.0, None, self.params)
        for turbine, rows in {1: [2, 3], 2: [5, 6]}.items():
            theta_e, omega = state.theta_e(turbine), state.omega(turbine)
            inverse = g[CURRENTS[turbine], VOLTAGES[turbine]]
            expected = -park_transform(theta_e) @ inverse @ emf_rate(theta_e, omega, machine)
            assert_allclose(lam[rows], expected[[0, 2]], rtol=1e-10, atol=1e-9)

    def test_speed_row_at_zero_current(self):
        machine = self.params.machine
        state = PlantState.from_fields(
            beta1=0.05, beta2=0.05, psi=0.1, omega1=30.0, omega2=30.0, theta_e1=0.4
        )
        theta = output_decomposition(state, 0.0, None, self.env, self.refs, self.params).theta
        winding = winding_model(0.4, machine)
        expected = machine.p * (winding.emf_gradient @ winding.inverse) / machine.j
        assert_allclose(theta[1, 1:4], expected, rtol=1e-12)

    def test_negative_pitch_keeps_the_yaw_row_decouplable(self):
        x = next(random_states(1, seed=5)).vector.copy()
        x[[0, 1]] = [-0.05, 0.1]
        theta = theta_matrix(PlantState(x), T_FAULTED, self.fault, self.env, self.params)
        self.assertEqual(theta[1, 0], 0.0)
        self.assertNotEqual(theta[4, 0], 0.0)
        self.assertNotEqual(theta[0, 0], 0.0)

    def test_calm_wind_is_not_decouplable(self):
        env = PlantEnvironment(wind=WindInput(vv=0.0, alpha=0.0), beta_ref=0.0)
        state = PlantState.from_fields(omega1=20.0, omega2=15.0)
        with self.assertRaises(SingularDecoupling):
            theta_matrix(state, 0.0, None, env, self.params)


class HomogeneousTests(SimpleTestCase):
    def setUp(self):
        self.gains = ControllerGains()

    def test_zero_chains(self):
        chains = [(0.0, 0.0, 0.0), (0.0, 0.0), (0.0,), (0.0,), (0.0, 0.0), (0.0,), (0.0,)]
        assert_array_equal(sliding_variables(chains, self.gains), np.zeros(7))

    def test_first_order_chain_is_output(self):
        self.assertEqual(sliding_variable((2.5,), ()), 2.5)

    def test_third_order_chain(self):
        self.assertEqual(sliding_variable((1.0, 1.0, 1.0), (1.0, 2.0)), 4.0)

    def test_chain_length_must_match_surface(self):
        with self.assertRaises(ValueError):
            sliding_variable((1.0, 2.0), (1.0, 2.0))

    def test_exponent_limits(self):
        self.assertEqual(homogeneity_exponent([0.0, 0.0, 0.0], 1.5, 10.0), 1.0)
        self.assertEqual(homogeneity_exponent([1e12], 1.5, 10.0), 0.0)
        self.assertEqual(homogeneity_exponent([3.0], 2.0, 3.0), 0.0)

    def test_exponent_is_continuous_and_non_increasing(self):
        grid = np.linspace(0.0, 5.0, 501)
        values = [homogeneity_exponent([z, 0.3], 1.5, 2.0) for z in grid]
        self.assertTrue(np.all(np.diff(values) <= 0.0))
        self.assertLess(np.abs(np.diff(values)).max(), 0.01)

    def test_exponents_use_channel_regularisation(self):
        chains = [(0.5,), (0.5,)]
        values = exponents(chains, self.gains, (1, 2))
        self.assertEqual(values[0], homogeneity_exponent([0.5], 1.5, self.gains.eps[1]))
        self.assertEqual(values[1], homogeneity_exponent([0.5], 1.5, self.gains.eps[2]))

    def test_stabilizer_examples(self):
        assert_array_equal(stabilizer(np.zeros(7), np.full(7, 0.5), self.gains), np.zeros(7))
        self.assertEqual(stabilizer([2.0], [1.0], [3.0])[0], -6.0)

    def test_stabilizer_is_odd_and_dissipative(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            sigma = rng.normal(scale=5.0, size=7)
            mu = rng.uniform(0.0, 1.0, 7)
            z_bar = stabilizer(sigma, mu, self.gains)
            assert_allclose(stabilizer(-sigma, mu, self.gains), -z_bar)
            self.assertTrue(np.all(z_bar * sigma <= 0.0))


class ControlLawTests(ControlTestCase):
    def test_active_control_linearizes_exactly(self):
        for state in random_states(10, seed=41):
            u = active_control(
                state, T_FAULTED, self.fault, self.env, self.refs, self.gains, self.params
            )
            decomposition = output_decomposition(
                state, T_FAULTED, self.fault, self.env, self.refs, self.params
            )
            chains = decomposition.chains
            z_bar = stabilizer(
                sliding_variables(chains, self.gains),
                exponents(chains, self.gains, range(7)),
                self.gains,
            )
            assert_allclose(
                decomposition.lam + decomposition.theta @ u.vector,
                z_bar,
                rtol=1e-8,
                atol=1e-8 * np.abs(decomposition.lam).max(),
            )
            rates = finite_difference_rates(
                state.vector, u, T_FAULTED, self.fault, self.env, self.params
            )
            assert_relative_close(self, rates, z_bar, 1e-3)

    def test_zero_severity_is_the_healthy_law(self):
        state = next(random_states(1))
        laws = [
            active_control(state, T_FAULTED, fault, self.env, self.refs, self.gains, self.params)
            for fault in (FaultSpec(mu_bar=0.0), None)
        ]
        assert_array_equal(laws[0].vector, laws[1].vector)

    def test_tracking_point_compensates_lambda(self):
        state = steady_state(self.params, self.env.wind, (32.0, 32.0), 0.05)
        decomposition = output_decomposition(state, 0.0, None, self.env, self.refs, self.params)
        u = active_control(state, 0.0, None, self.env, self.refs, self.gains, self.params)
        assert_allclose(
            decomposition.theta @ u.vector,
            -decomposition.lam,
            rtol=0,
            atol=1e-9 * max(np.abs(decomposition.lam).max(), 1.0),
        )

    def test_passive_matches_active_on_shared_outputs_when_healthy(self):
        gains = ControllerGains(robust_gain=1.0)
        for state in random_states(5, seed=43):
            decomposition = output_decomposition(
                state, 0.0, None, self.env, self.refs, self.params
            )
            active = active_control(state, 0.0, None, self.env, self.refs, gains, self.params)
            passive = passive_control(state, 0.0, self.env, self.refs, gains, self.params)
            rows = [0, 1, 2, 4, 5]
            assert_allclose(
                decomposition.theta[rows] @ passive.vector,
                decomposition.theta[rows] @ active.vector,
                rtol=1e-8,
                atol=1e-8 * np.abs(decomposition.lam).max(),
            )

    def test_passive_voltages_have_no_homopolar_part(self):
        state = next(random_states(1))
        u = passive_control(state, T_FAULTED, self.env, self.refs, self.gains, self.params)
        self.assertAlmostEqual(float(np.sum(u.voltages(1))), 0.0, places=9)
        self.assertAlmostEqual(float(np.sum(u.voltages(2))), 0.0, places=9)

    def test_passive_law_ignores_the_fault(self):
        state = next(random_states(1))
        controller = build_controller(
            ControlLaw(mode=ControlMode.PASSIVE, gains=self.gains), self.params, self.fault
        )
        self.assertIsInstance(controller, PassiveController)
        assert_array_equal(
            controller(state.vector, T_FAULTED, self.env, self.refs).vector,
            passive_control(state, T_FAULTED, self.env, self.refs, self.gains, self.params).vector,
        )

    def test_factory(self):
        active = build_controller(ControlLaw(), self.params, self.fault)
        self.assertIsInstance(active, ActiveController)
        self.assertIs(active.fault, self.fault)
        open_loop = build_controller(
            ControlLaw(mode=ControlMode.OPEN_LOOP), self.params, self.fault
        )
        self.assertIsInstance(open_loop, OpenLoopController)
        assert_array_equal(
            open_loop(next(random_states(1)).vector, 0.0, self.env, self.refs).vector, np.zeros(7)
        )
