"""Threshold verdicts, multi-scenario comparisons and severity sweeps."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

from applications.control.models import ControlMode
from applications.simkit.models import RunMetrics, Termination
from applications.simkit.runner import ScenarioOutcome, run_batch

from . import artifacts, charts
from .models import ComparisonReport, ReportRow, ScenarioConfig, SweepResult

logger = logging.getLogger(__name__)

# Threshold key -> metric attribute compared against it.
VERDICT_METRICS = {
    'psi_error': 'psi_error',
    'omega_error': 'omega_error',
    'id_max': 'id_max',
    'ih_max': 'ih_max',
    'phase_sum_ratio': 'phase_sum_ratio',
}

# Outputs the passive law does not regulate: their thresholds are reported, not judged.
UNREGULATED_THRESHOLDS = {ControlMode.PASSIVE: frozenset({'ih_max', 'phase_sum_ratio'})}

TABLE_COLUMNS = (
    ('scenario', 28),
    ('mode', 8),
    ('mu', 6),
    ('end', 10),
    ('psi_err', 10),
    ('omega_err', 10),
    ('id_max', 10),
    ('ih_max', 10),
    ('sum_ratio', 10),
    ('verdict', 7),
)


def verdict(metrics: RunMetrics, thresholds: Mapping[str, float]) -> tuple[bool, tuple[str, ...]]:
    """Pass when the run went to the horizon and every declared threshold holds."""

    failures = []
    if metrics.termination != Termination.COMPLETED:
        failures.append(f'terminated early ({metrics.termination} at t={metrics.t_final:g} s)')
    for key, attribute in VERDICT_METRICS.items():
        if key not in thresholds:
            continue
        value = getattr(metrics, attribute)
        if not value <= thresholds[key]:
            failures.append(f'{key} {value:.4g} > {thresholds[key]:.4g}')
    return not failures, tuple(failures)


def judged_thresholds(scenario: ScenarioConfig) -> dict[str, float]:
    skipped = UNREGULATED_THRESHOLDS.get(scenario.mode, frozenset())
    return {key: value for key, value in scenario.thresholds.items() if key not in skipped}


def report_row(outcome: ScenarioOutcome) -> ReportRow:
    scenario = outcome.scenario
    passed, failures = verdict(outcome.metrics, judged_thresholds(scenario))
    return ReportRow(
        scenario_id=scenario.scenario_id,
        mode=str(scenario.mode),
        severity=scenario.severity,
        metrics=outcome.metrics,
        passed=passed,
        failures=failures,
    )


def build_report(outcomes: Iterable[ScenarioOutcome]) -> ComparisonReport:
    return ComparisonReport(rows=tuple(report_row(outcome) for outcome in outcomes))


def compare(
    scenarios: Sequence[ScenarioConfig], workers: int = 1
) -> tuple[ComparisonReport, list[ScenarioOutcome]]:
    """Run every scenario; early terminations are reported as failing rows."""

    if len(scenarios) < 2:
        raise ValueError('compare needs at least two scenarios')
    outcomes = run_batch(scenarios, workers=workers)
    return build_report(outcomes), outcomes


def sweep_scenarios(
    base: ScenarioConfig, severities: Sequence[float], modes: Sequence[str]
) -> list[ScenarioConfig]:
    for mu_bar in severities:
        if not 0.0 <= mu_bar < 1.0:
            raise ValueError(f'severity must lie in [0, 1), got {mu_bar}')
    return [
        base.with_mode(mode).with_severity(mu_bar) for mode in modes for mu_bar in severities
    ]


def tolerated_severity(rows: Iterable[ReportRow]) -> float | None:
    """Largest severity run to the horizon together with every smaller one.

    Divergence criterion: a diverged or singular stop ends the tolerated
    range, a missed threshold does not.
    """

    tolerated = None
    for row in sorted(rows, key=lambda item: item.severity):
        if not row.completed:
            break
        tolerated = row.severity
    return tolerated


def first_unstable_severity(rows: Iterable[ReportRow]) -> float | None:
    for row in sorted(rows, key=lambda item: item.severity):
        if not row.completed:
            return row.severity
    return None


def sweep(
    base: ScenarioConfig,
    severities: Sequence[float],
    modes: Sequence[str] = (ControlMode.PASSIVE, ControlMode.ACTIVE),
    workers: int = 1,
) -> tuple[SweepResult, list[ScenarioOutcome]]:
    scenarios = sweep_scenarios(base, severities, modes)
    logger.info(
        'sweeping %s over %d severities and %d modes', base.scenario_id, len(severities), len(modes)
    )
    outcomes = run_batch(scenarios, workers=workers)
    report = build_report(outcomes)
    rows = {str(mode): [row for row in report.rows if row.mode == mode] for mode in modes}
    result = SweepResult(
        severities=tuple(sorted(severities)),
        report=report,
        tolerated={mode: tolerated_severity(mode_rows) for mode, mode_rows in rows.items()},
        unstable={mode: first_unstable_severity(mode_rows) for mode, mode_rows in rows.items()},
    )
    return result, outcomes


def write_artifacts(outcome: ScenarioOutcome, out_root: Path, plot: bool = False) -> Path:
    """CSV, metrics JSON and optional charts under ``out_root/<scenario_id>/``."""

    directory = artifacts.scenario_directory(out_root, outcome.scenario_id)
    thresholds = judged_thresholds(outcome.scenario)
    passed, failures = verdict(outcome.metrics, thresholds)
    artifacts.write_timeseries_csv(outcome.series, directory / artifacts.CSV_NAME)
    payload = artifacts.metrics_payload(
        outcome.scenario_id,
        outcome.series,
        outcome.metrics,
        {'passed': passed, 'failures': list(failures), 'thresholds': thresholds},
    )
    artifacts.write_metrics_json(payload, directory / artifacts.METRICS_NAME)
    if plot and len(outcome.series) > 1:
        charts.render_charts(outcome.series, directory)
    logger.debug('artifacts of %s written to %s', outcome.scenario_id, directory)
    return directory


def _cell(value, width: int) -> str:
    if isinstance(value, float):
        text = f'{value:.4g}'
    else:
        text = str(value)
    return text[:width].ljust(width)


def format_table(report: ComparisonReport) -> str:
    header = ' '.join(_cell(name, width) for name, width in TABLE_COLUMNS)
    lines = [header, '-' * len(header)]
    for row in report.rows:
        metrics = row.metrics
        values = (
            row.scenario_id,
            row.mode,
            row.severity,
            metrics.termination,
            metrics.psi_error,
            metrics.omega_error,
            metrics.id_max,
            metrics.ih_max,
            metrics.phase_sum_ratio,
            'PASS' if row.passed else 'FAIL',
        )
        lines.append(
            ' '.join(_cell(value, width) for value, (_, width) in zip(values, TABLE_COLUMNS))
        )
    return '\n'.join(lines)


def format_tolerance(result: SweepResult) -> str:
    lines = []
    for mode, mu_bar in result.tolerated.items():
        limit = 'none' if mu_bar is None else f'{mu_bar:g}'
        unstable = result.unstable.get(mode)
        first = 'none swept' if unstable is None else f'{unstable:g}'
        lines.append(f'{mode}: largest tolerated severity {limit}, first unstable {first}')
    return '\n'.join(lines)


__all__ = [
    'UNREGULATED_THRESHOLDS',
    'VERDICT_METRICS',
    'build_report',
    'compare',
    'first_unstable_severity',
    'format_table',
    'format_tolerance',
    'judged_thresholds',
    'report_row',
    'sweep',
    'sweep_scenarios',
    'tolerated_severity',
    'verdict',
    'write_artifacts',
]
