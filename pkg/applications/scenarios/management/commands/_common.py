"""Arguments and error mapping shared by the scenario commands."""

from __future__ import annotations

from collections.abc import Iterable
from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError

from applications.core.constants import EXIT_CONFIG_ERROR, EXIT_DIVERGED, EXIT_SINGULAR
from applications.core.exceptions import ScenarioConfigError
from applications.scenarios.loader import load_scenario
from applications.scenarios.models import ScenarioConfig
from applications.simkit.models import Termination


def add_scenario_arguments(parser, *, many: bool = False) -> None:  # pragma: no cover - argparse
    if many:
        parser.add_argument(
            '--config',
            dest='configs',
            action='extend',
            nargs='+',
            default=[],
            help='Scenario files; relative paths fall back to TWINWIND_CONFIG_DIR.',
        )
    else:
        parser.add_argument(
            '--config',
            required=True,
            help='Scenario file; a relative path falls back to TWINWIND_CONFIG_DIR.',
        )
    parser.add_argument('--out-dir', dest='out_dir', help='Artifact root directory.')
    parser.add_argument('--seed', type=int, help='Override the turbulence seed.')
    parser.add_argument('--dt', type=float, help='Override the integration step (s).')
    parser.add_argument('--plot', action='store_true', help='Also render SVG charts.')


def add_workers_argument(parser) -> None:  # pragma: no cover - argparse
    parser.add_argument(
        '--workers',
        type=int,
        default=None,
        help='Parallel runs (default TWINWIND_WORKERS).',
    )


def config_error(diagnostics: Iterable[str]) -> CommandError:
    return CommandError(
        'Invalid scenario configuration:\n  ' + '\n  '.join(diagnostics),
        returncode=EXIT_CONFIG_ERROR,
    )


def load(path: str, options) -> ScenarioConfig:
    try:
        return load_scenario(path, seed=options.get('seed'), dt=options.get('dt'))
    except ScenarioConfigError as exc:
        raise config_error(exc.diagnostics) from exc


def output_root(options, scenario: ScenarioConfig | None = None) -> Path:
    if options.get('out_dir'):
        return Path(options['out_dir']).expanduser()
    if scenario is not None and scenario.out_dir is not None:
        return scenario.out_dir
    return Path(settings.SCENARIO_OUTPUT_DIR)


def workers(options) -> int:
    return options.get('workers') or settings.SCENARIO_WORKERS


def termination_error(scenario_id: str, termination: str, at: float | None, reason: str):
    message = f'{scenario_id}: {termination} at t={at} s ({reason})'
    if termination == Termination.DIVERGED:
        return CommandError(message, returncode=EXIT_DIVERGED)
    if termination == Termination.SINGULAR:
        return CommandError(message, returncode=EXIT_SINGULAR)
    return None
