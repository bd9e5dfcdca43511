import numpy as np
from django.conf import settings
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from .exceptions import (
    DivergedState,
    InvalidSeverity,
    ScenarioConfigError,
    SingularDecoupling,
    SingularInductance,
    TwinWindError,
)
from .numerics import check_condition, guarded_inverse, guarded_solve, one_norm_condition


class GuardedLinearAlgebraTests(SimpleTestCase):
    def setUp(self):
        self.matrix = np.array([[4.0, 1.0], [2.0, 3.0]])

    def test_inverse(self):
        inverse = guarded_inverse(self.matrix, limit=1e8, error=SingularInductance, label='L')
        assert_allclose(inverse @ self.matrix, np.eye(2), atol=1e-15)

    def test_one_norm_condition(self):
        # ||A||_1 = 6, ||A^-1||_1 = 0.5
        condition = one_norm_condition(self.matrix, np.linalg.inv(self.matrix))
        self.assertAlmostEqual(condition, 3.0)

    def test_singular_matrix_raises_the_requested_error(self):
        singular = np.array([[1.0, 2.0], [2.0, 4.0]])
        with self.assertRaisesMessage(SingularInductance, 'L_eff'):
            guarded_inverse(singular, limit=1e8, error=SingularInductance, label='L_eff')

    def test_badly_conditioned_matrix(self):
        matrix = np.diag([1.0, 1e-10])
        with self.assertRaisesMessage(SingularDecoupling, 'exceeds'):
            check_condition(matrix, limit=1e8, error=SingularDecoupling, label='Θ')
        condition = check_condition(matrix, limit=1e12, error=SingularDecoupling, label='Θ')
        self.assertAlmostEqual(condition, 1e10, delta=1.0)

    def test_non_finite_entries(self):
        with self.assertRaisesMessage(SingularDecoupling, 'non-finite'):
            check_condition(np.array([[np.nan]]), limit=1e8, error=SingularDecoupling, label='Θ')

    def test_solve(self):
        rhs = np.array([1.0, 2.0])
        solution = guarded_solve(self.matrix, rhs, limit=1e8, error=SingularDecoupling, label='Θ')
        assert_allclose(self.matrix @ solution, rhs)


class ErrorHierarchyTests(SimpleTestCase):
    def test_lab_errors_share_a_base(self):
        for error in (InvalidSeverity, SingularInductance, SingularDecoupling):
            self.assertTrue(issubclass(error, TwinWindError))
        self.assertTrue(issubclass(InvalidSeverity, ValueError))

    def test_diverged_state_carries_time(self):
        error = DivergedState(7.25, 'phase current 1e3 A above limit')
        self.assertEqual(error.time, 7.25)
        self.assertIn('t=7.250000', str(error))

    def test_config_error_lists_diagnostics(self):
        error = ScenarioConfigError(['wind.vv: required', 'fault.mu_bar: too large'])
        self.assertEqual(str(error), 'wind.vv: required; fault.mu_bar: too large')
        self.assertEqual(str(ScenarioConfigError([])), 'invalid scenario configuration')


class SettingsTests(SimpleTestCase):
    def test_simulation_settings(self):
        self.assertTrue(settings.SCENARIO_CONFIG_DIR.is_absolute())
        self.assertTrue((settings.SCENARIO_CONFIG_DIR / 'healthy_active.toml').exists())
        self.assertGreaterEqual(settings.SCENARIO_WORKERS, 1)
        self.assertIn('applications', settings.LOGGING['loggers'])
