import io
import os
import tempfile
import unittest
from dataclasses import replace
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings, tag
from numpy.testing import assert_array_equal

from applications.aero.formulas import optimal_tip_speed_ratio
from applications.control.models import ControlMode
from applications.core.constants import (
    DEFAULT_THRESHOLDS,
    EXIT_CONFIG_ERROR,
    EXIT_DIVERGED,
    EXIT_SINGULAR,
)
from applications.core.exceptions import ScenarioConfigError
from applications.plant.models import PlantParams
from applications.simkit.metrics import extract_metrics
from applications.simkit.models import COLUMNS, Termination, TimeSeries
from applications.simkit.runner import execute_scenario, run_batch

from . import artifacts
from .loader import build_scenario, flatten_errors, load_scenario
from .management.commands._common import termination_error
from .models import ReportRow
from .reports import (
    compare,
    first_unstable_severity,
    judged_thresholds,
    sweep,
    sweep_scenarios,
    tolerated_severity,
    verdict,
)

ACCEPTANCE = os.environ.get('TWINWIND_ACCEPTANCE') == '1'

SHORT_RUN = """
id = "short"

[wind]
vv = 8.0
alpha = 0.1

[references]
omega_ref_1 = 32.0
omega_ref_2 = 32.0

[control]
mode = "{mode}"

[integrator]
dt = 1e-4
t_end = 0.005
"""

CALM_RUN = """
id = "calm"

[wind]
vv = 0.0

[references]
omega_ref_1 = 10.0
omega_ref_2 = 10.0

[initial]
omega1 = 10.0
omega2 = 10.0

[integrator]
dt = 1e-3
t_end = 0.1
"""


def payload(**sections):
    base = {'wind': {'vv': 8.0, 'alpha': 0.1}}
    base.update(sections)
    return base


def zero_metrics(**changes):
    table = np.zeros((11, len(COLUMNS)))
    table[:, 0] = np.linspace(0.0, 1.0, 11)
    return replace(extract_metrics(TimeSeries.from_table(table)), **changes)


class ScenarioFileTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def write(self, name, text):
        path = self.root / name
        path.write_text(text, encoding='utf-8')
        return path


class LoaderTests(ScenarioFileTestCase):
    def diagnostics(self, data):
        with self.assertRaises(ScenarioConfigError) as exc:
            build_scenario(data)
        return exc.exception.diagnostics

    def test_minimal_payload(self):
        scenario = build_scenario(payload(), Path('gusty.toml'))
        self.assertEqual(scenario.scenario_id, 'gusty')
        self.assertEqual(scenario.mode, ControlMode.ACTIVE)
        self.assertIsNone(scenario.fault)
        self.assertEqual(scenario.severity, 0.0)
        self.assertEqual(scenario.thresholds, DEFAULT_THRESHOLDS)

    def test_unknown_keys_are_named(self):
        diagnostics = self.diagnostics(payload(colour='red', fault={'mu_bar': 0.1, 'where': 'b'}))
        self.assertIn('colour: Unknown key.', diagnostics)
        self.assertIn('fault.where: Unknown key.', diagnostics)

    def test_unknown_state_field(self):
        diagnostics = self.diagnostics(payload(initial={'omega3': 1.0}))
        self.assertIn('initial.omega3: Unknown state field.', diagnostics)

    def test_missing_wind(self):
        self.assertEqual(self.diagnostics({}), ['wind: This field is required.'])

    def test_invalid_values_are_named(self):
        diagnostics = self.diagnostics(
            payload(
                fault={'mu_bar': 1.0},
                integrator={'dt': -1.0},
                control={'mode': 'optimal'},
            )
        )
        self.assertIn('fault.mu_bar: Severity must be below 1.', diagnostics)
        self.assertTrue(any(line.startswith('integrator: ') for line in diagnostics))
        self.assertTrue(any(line.startswith('control.mode: ') for line in diagnostics))

    def test_step_profile_needs_switch_time(self):
        diagnostics = self.diagnostics({'wind': {'kind': 'step', 'vv': 8.0}})
        self.assertEqual(diagnostics, ['wind.t_switch: Required by a step profile.'])

    def test_window_within_horizon(self):
        diagnostics = self.diagnostics(
            payload(integrator={'t_end': 1.0}, metrics={'window': [0.5, 2.0]})
        )
        self.assertEqual(diagnostics, ['metrics.window: Expected start < end <= integrator.t_end.'])

    def test_fault_onset_within_horizon(self):
        diagnostics = self.diagnostics(
            payload(integrator={'t_end': 1.0}, fault={'mu_bar': 0.1, 't_on': 7.0})
        )
        self.assertEqual(diagnostics, ['fault.t_on: Fault onset lies beyond the horizon.'])

    def test_flatten_errors(self):
        errors = {'wind': {'vv': ['bad']}, 'non_field_errors': ['broken']}
        self.assertEqual(flatten_errors(errors), ['wind.vv: bad', 'scenario: broken'])

    def test_default_speed_references(self):
        scenario = build_scenario(payload(references={'beta_ref': 0.05, 'omega_ref_2': 30.0}))
        params = PlantParams()
        lam_opt, _ = optimal_tip_speed_ratio(params.cp, beta=0.05)
        self.assertAlmostEqual(scenario.omega_refs[0], lam_opt * 8.0 / params.aero.rp)
        self.assertEqual(scenario.omega_refs[1], 30.0)

    def test_missing_file(self):
        with self.assertRaises(ScenarioConfigError) as exc:
            load_scenario(self.root / 'absent.toml')
        self.assertIn('file not found', exc.exception.diagnostics[0])

    def test_malformed_toml(self):
        path = self.write('broken.toml', '[wind\nvv = 8\n')
        with self.assertRaises(ScenarioConfigError):
            load_scenario(path)

    def test_overrides(self):
        path = self.write('short.toml', SHORT_RUN.format(mode='active'))
        scenario = load_scenario(path, seed=7, dt=5e-5)
        self.assertEqual(scenario.wind.seed, 7)
        self.assertEqual(scenario.integrator.dt, 5e-5)
        with self.assertRaises(ScenarioConfigError) as exc:
            load_scenario(path, dt=0.0)
        self.assertTrue(exc.exception.diagnostics[0].startswith('integrator.dt: '))

    def test_relative_path_uses_scenario_directory(self):
        self.write('short.toml', SHORT_RUN.format(mode='active'))
        with override_settings(SCENARIO_CONFIG_DIR=self.root):
            self.assertEqual(load_scenario('short.toml').scenario_id, 'short')

    def test_shipped_scenarios_are_valid(self):
        for name, mode, severity in (
            ('healthy_active', 'active', 0.0),
            ('passive_4', 'passive', 0.04),
            ('passive_8', 'passive', 0.08),
            ('passive_20', 'passive', 0.20),
            ('active_20', 'active', 0.20),
        ):
            with self.subTest(name=name):
                scenario = load_scenario(f'{name}.toml')
                self.assertEqual(scenario.scenario_id, name)
                self.assertEqual(scenario.mode, mode)
                self.assertEqual(scenario.severity, severity)
                self.assertEqual(scenario.omega_refs, (32.0, 32.0))
                self.assertEqual(scenario.metrics_window, (8.0, 10.0))

    def test_severity_variant(self):
        scenario = build_scenario(payload(id='base', fault={'mu_bar': 0.1, 'phase': 'c'}))
        variant = scenario.with_mode('passive').with_severity(0.05)
        self.assertEqual(variant.scenario_id, 'base__passive_mu0.05')
        self.assertEqual(variant.fault.phase, 'c')
        self.assertEqual(variant.severity, 0.05)


class ArtifactTests(ScenarioFileTestCase):
    def setUp(self):
        super().setUp()
        self.scenario = load_scenario(self.write('short.toml', SHORT_RUN.format(mode='active')))
        self.outcome = execute_scenario(self.scenario)

    def test_csv_header_contract(self):
        path = artifacts.write_timeseries_csv(self.outcome.series, self.root / 'ts.csv')
        header = path.read_text(encoding='utf-8').splitlines()[0]
        self.assertEqual(header, ','.join(COLUMNS))
        self.assertTrue(header.startswith('t,beta1,beta2,psi,psi_dot,i_a1,i_b1,i_c1,omega1,'))
        self.assertTrue(header.endswith('gamma_a1,gamma_a2,f_drag1,f_drag2'))
        self.assertEqual(len(path.read_text(encoding='utf-8').splitlines()), 52)

    def test_csv_round_trip(self):
        series = self.outcome.series
        path = artifacts.write_timeseries_csv(series, self.root / 'ts.csv')
        parsed = artifacts.read_timeseries_csv(path, termination=series.termination)
        assert_array_equal(parsed.as_table(), series.as_table())
        recomputed = extract_metrics(
            parsed, self.scenario.metrics_window, self.scenario.thresholds
        )
        self.assertEqual(recomputed.as_dict(), self.outcome.metrics.as_dict())

    def test_csv_header_is_checked(self):
        path = self.write('bad.csv', 't,psi\n0.0,0.0\n')
        with self.assertRaises(ValueError):
            artifacts.read_timeseries_csv(path)

    def test_metrics_json(self):
        payload_ = artifacts.metrics_payload(
            'short', self.outcome.series, self.outcome.metrics, {'passed': True}
        )
        path = artifacts.write_metrics_json(payload_, self.root / 'metrics.json')
        loaded = artifacts.read_metrics_json(path)
        self.assertEqual(loaded['termination'], 'completed')
        self.assertEqual(loaded['metrics'], self.outcome.metrics.as_dict())
        self.assertEqual(loaded['verdict'], {'passed': True})


class VerdictTests(SimpleTestCase):
    def test_quiet_run_passes(self):
        self.assertEqual(verdict(zero_metrics(), DEFAULT_THRESHOLDS), (True, ()))

    def test_threshold_exceeded(self):
        metrics = zero_metrics(id_max2=0.2, psi_error=0.5)
        passed, failures = verdict(metrics, DEFAULT_THRESHOLDS)
        self.assertFalse(passed)
        self.assertEqual([failure.split()[0] for failure in failures], ['psi_error', 'id_max'])

    def test_early_termination_fails(self):
        metrics = zero_metrics(termination=Termination.DIVERGED, diverged=True, t_final=7.2)
        passed, failures = verdict(metrics, DEFAULT_THRESHOLDS)
        self.assertFalse(passed)
        self.assertIn('terminated early', failures[0])

    def test_non_finite_metric_fails(self):
        passed, _ = verdict(zero_metrics(omega_error1=float('nan')), DEFAULT_THRESHOLDS)
        self.assertFalse(passed)

    def test_only_declared_thresholds_apply(self):
        metrics = zero_metrics(ih_max1=3.0)
        self.assertEqual(verdict(metrics, {'psi_error': 0.01}), (True, ()))

    def test_verdict_is_pure(self):
        metrics = zero_metrics(omega_error2=0.02)
        thresholds = dict(DEFAULT_THRESHOLDS)
        first = verdict(metrics, thresholds)
        self.assertEqual(verdict(metrics, thresholds), first)
        self.assertEqual(thresholds, DEFAULT_THRESHOLDS)

    def test_tolerated_severity(self):
        def row(mu, termination, passed=False):
            metrics = zero_metrics(termination=termination)
            return ReportRow(f'r{mu}', 'passive', mu, metrics, passed, ())

        rows = [
            row(0.1, Termination.DIVERGED),
            row(0.0, Termination.COMPLETED, passed=True),
            row(0.04, Termination.COMPLETED),
            row(0.2, Termination.COMPLETED),
        ]
        self.assertEqual(tolerated_severity(rows), 0.04)
        self.assertEqual(first_unstable_severity(rows), 0.1)
        self.assertIsNone(tolerated_severity([row(0.0, Termination.SINGULAR)]))
        self.assertIsNone(tolerated_severity([]))
        self.assertIsNone(first_unstable_severity(rows[1:]))

    def test_passive_law_is_not_judged_on_unregulated_outputs(self):
        scenario = build_scenario(payload(id='base', control={'mode': 'passive'}))
        judged = judged_thresholds(scenario)
        self.assertNotIn('ih_max', judged)
        self.assertNotIn('phase_sum_ratio', judged)
        self.assertEqual(judged['id_max'], DEFAULT_THRESHOLDS['id_max'])
        self.assertEqual(judged_thresholds(scenario.with_mode('active')), DEFAULT_THRESHOLDS)
        metrics = zero_metrics(ih_max1=3.0, phase_sum_ratio=1.0)
        self.assertTrue(verdict(metrics, judged)[0])


class BatchTests(ScenarioFileTestCase):
    def setUp(self):
        super().setUp()
        self.scenario = load_scenario(self.write('short.toml', SHORT_RUN.format(mode='active')))

    def test_run_batch_orders_by_id(self):
        scenarios = [self.scenario.renamed(name) for name in ('b', 'c', 'a')]
        outcomes = run_batch(scenarios)
        self.assertEqual([outcome.scenario_id for outcome in outcomes], ['a', 'b', 'c'])

    def test_run_batch_rejects_duplicate_ids(self):
        with self.assertRaises(ValueError):
            run_batch([self.scenario, self.scenario])

    def test_compare_with_itself(self):
        report, _ = compare([self.scenario.renamed('x'), self.scenario.renamed('y')])
        first, second = report.rows
        self.assertEqual(first.metrics, second.metrics)
        self.assertEqual(first.passed, second.passed)
        self.assertEqual(report.row('y').failures, first.failures)

    def test_compare_needs_two(self):
        with self.assertRaises(ValueError):
            compare([self.scenario])

    def test_sweep_layout(self):
        scenarios = sweep_scenarios(self.scenario, (0.0, 0.1), ('passive', 'active'))
        self.assertEqual(
            [scenario.scenario_id for scenario in scenarios],
            [
                'short__passive_mu0',
                'short__passive_mu0.1',
                'short__active_mu0',
                'short__active_mu0.1',
            ],
        )
        with self.assertRaises(ValueError):
            sweep_scenarios(self.scenario, (1.0,), ('active',))

    def test_sweep_result(self):
        result, outcomes = sweep(self.scenario, (0.0,), ('passive', 'active'))
        self.assertEqual(len(outcomes), 2)
        self.assertEqual(result.severities, (0.0,))
        self.assertEqual(set(result.tolerated), {'passive', 'active'})
        for row in result.report.rows:
            self.assertEqual(result.tolerated[row.mode], 0.0 if row.completed else None)
            self.assertEqual(result.unstable[row.mode], None if row.completed else 0.0)


class CommandTests(ScenarioFileTestCase):
    def call(self, *args):
        out = io.StringIO()
        call_command(*args, stdout=out)
        return out.getvalue()

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as exc:
            self.call(*args)
        self.assertEqual(exc.exception.returncode, code)
        return exc.exception

    def test_run_writes_artifacts(self):
        path = self.write('short.toml', SHORT_RUN.format(mode='active'))
        out_dir = self.root / 'runs'
        output = self.call('run', '--config', str(path), '--out-dir', str(out_dir), '--plot')
        directory = out_dir / 'short'
        self.assertIn(str(directory), output)
        self.assertTrue((directory / 'timeseries.csv').exists())
        self.assertTrue((directory / 'phase_sums.svg').exists())
        metrics = artifacts.read_metrics_json(directory / 'metrics.json')
        self.assertEqual(metrics['scenario_id'], 'short')
        self.assertEqual(metrics['termination'], 'completed')

    def test_run_missing_file(self):
        out_dir = self.root / 'runs'
        self.assertExitCode(
            EXIT_CONFIG_ERROR,
            'run',
            '--config',
            str(self.root / 'absent.toml'),
            '--out-dir',
            str(out_dir),
        )
        self.assertFalse(out_dir.exists())

    def test_run_singular_keeps_partial_artifacts(self):
        path = self.write('calm.toml', CALM_RUN)
        out_dir = self.root / 'runs'
        self.assertExitCode(EXIT_SINGULAR, 'run', '--config', str(path), '--out-dir', str(out_dir))
        metrics = artifacts.read_metrics_json(out_dir / 'calm' / 'metrics.json')
        self.assertEqual(metrics['termination'], 'singular')
        series = artifacts.read_timeseries_csv(out_dir / 'calm' / 'timeseries.csv')
        self.assertEqual(len(series), 0)

    def test_termination_codes(self):
        self.assertIsNone(termination_error('x', Termination.COMPLETED, None, ''))
        diverged = termination_error('x', Termination.DIVERGED, 7.5, 'current limit')
        self.assertEqual(diverged.returncode, EXIT_DIVERGED)
        singular = termination_error('x', Termination.SINGULAR, 0.0, 'singular')
        self.assertEqual(singular.returncode, EXIT_SINGULAR)

    def test_compare_usage_errors(self):
        path = self.write('short.toml', SHORT_RUN.format(mode='active'))
        self.assertExitCode(EXIT_CONFIG_ERROR, 'compare')
        self.assertExitCode(EXIT_CONFIG_ERROR, 'compare', '--config', str(path))

    def test_compare_with_itself(self):
        path = self.write('short.toml', SHORT_RUN.format(mode='active'))
        out_dir = self.root / 'runs'
        output = self.call(
            'compare', '--config', str(path), str(path), '--out-dir', str(out_dir)
        )
        self.assertIn('short__1', output)
        self.assertIn('short__2', output)
        csv_1 = (out_dir / 'short__1' / 'timeseries.csv').read_text(encoding='utf-8')
        csv_2 = (out_dir / 'short__2' / 'timeseries.csv').read_text(encoding='utf-8')
        self.assertEqual(csv_1, csv_2)

    def test_sweep_command(self):
        path = self.write('short.toml', SHORT_RUN.format(mode='active'))
        out_dir = self.root / 'runs'
        output = self.call(
            'sweep', '--config', str(path), '--mu', '0', '--out-dir', str(out_dir)
        )
        self.assertIn('passive: largest tolerated severity', output)
        self.assertIn('active: largest tolerated severity', output)
        self.assertIn('first unstable', output)
        self.assertTrue((out_dir / 'short__active_mu0' / 'metrics.json').exists())
        self.assertExitCode(
            EXIT_CONFIG_ERROR,
            'sweep',
            '--config',
            str(path),
            '--mu',
            '1.5',
            '--out-dir',
            str(out_dir),
        )

    def test_validate(self):
        good = self.write('short.toml', SHORT_RUN.format(mode='passive'))
        bad = self.write('bad.toml', '[wind]\nvv = 8.0\ngust = 3.0\n')
        output = self.call('validate', '--config', str(good))
        self.assertIn('ok (short)', output)
        error = self.assertExitCode(
            EXIT_CONFIG_ERROR, 'validate', '--config', str(good), str(bad)
        )
        self.assertIn('1 of 2', str(error))


@tag('slow')
@unittest.skipUnless(ACCEPTANCE, 'set TWINWIND_ACCEPTANCE=1 to run the closed-loop reproductions')
class SeverityComparisonAcceptanceTests(SimpleTestCase):
    def test_passive_and_active_verdicts(self):
        names = ('passive_4', 'passive_20', 'active_20')
        scenarios = [load_scenario(f'{name}.toml') for name in names]
        report, _ = compare(scenarios)
        self.assertTrue(report.row('passive_4').passed)
        self.assertFalse(report.row('passive_20').passed)
        self.assertTrue(report.row('active_20').passed)

    def test_healthy_sweep_passes_under_both_laws(self):
        result, _ = sweep(load_scenario('healthy_active.toml'), (0.0,))
        self.assertEqual(result.tolerated, {'passive': 0.0, 'active': 0.0})

    def test_active_sweep_tolerates_severe_fault(self):
        result, _ = sweep(load_scenario('passive_20.toml'), (0.0, 0.1, 0.2), ('active',))
        self.assertEqual(result.tolerated['active'], 0.2)

    def test_passive_crossover_lies_between_seven_and_ten_percent(self):
        severities = (0.04, 0.06, 0.07, 0.08, 0.09, 0.10)
        result, _ = sweep(load_scenario('passive_8.toml'), severities, ('passive',))
        self.assertGreaterEqual(result.tolerated['passive'], 0.06)
        self.assertIsNotNone(result.unstable['passive'])
        self.assertGreaterEqual(result.unstable['passive'], 0.07)
        self.assertLessEqual(result.unstable['passive'], 0.10)
