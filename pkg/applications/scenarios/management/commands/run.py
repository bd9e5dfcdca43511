"""Run one scenario and write its artifacts."""

from __future__ import annotations

from django.core.management.base import BaseCommand

from applications.scenarios.reports import judged_thresholds, verdict, write_artifacts
from applications.simkit.runner import execute_scenario

from ._common import add_scenario_arguments, load, output_root, termination_error


class Command(BaseCommand):
    help = 'Simulates one scenario file and writes timeseries.csv, metrics.json and charts.'

    def add_arguments(self, parser) -> None:  # pragma: no cover - argparse plumbing
        add_scenario_arguments(parser)

    def handle(self, *args, **options):
        scenario = load(options['config'], options)
        outcome = execute_scenario(scenario)
        directory = write_artifacts(
            outcome, output_root(options, scenario), plot=options['plot'] or scenario.plot
        )

        series = outcome.series
        error = termination_error(
            scenario.scenario_id, series.termination, series.terminated_at, series.reason
        )
        if error is not None:
            self.stdout.write(self.style.WARNING(f'Partial artifacts written to {directory}'))
            raise error

        passed, failures = verdict(outcome.metrics, judged_thresholds(scenario))
        self.stdout.write(f'Artifacts written to {directory}')
        if passed:
            self.stdout.write(self.style.SUCCESS(f'{scenario.scenario_id}: PASS'))
        else:
            self.stdout.write(
                self.style.WARNING(f'{scenario.scenario_id}: FAIL ({"; ".join(failures)})')
            )
