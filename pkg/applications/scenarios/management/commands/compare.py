"""Run several scenarios side by side and tabulate their verdicts."""

from __future__ import annotations

from django.core.management.base import BaseCommand, CommandError

from applications.core.constants import EXIT_CONFIG_ERROR
from applications.scenarios.reports import compare, format_table, write_artifacts

from ._common import add_scenario_arguments, add_workers_argument, load, output_root, workers


class Command(BaseCommand):
    help = 'Runs two or more scenario files and prints a metric table with pass/fail verdicts.'

    def add_arguments(self, parser) -> None:  # pragma: no cover - argparse plumbing
        add_scenario_arguments(parser, many=True)
        add_workers_argument(parser)

    def handle(self, *args, **options):
        paths = options['configs']
        if len(paths) < 2:
            raise CommandError(
                'compare needs at least two --config files.', returncode=EXIT_CONFIG_ERROR
            )
        scenarios = [load(path, options) for path in paths]
        ids = [scenario.scenario_id for scenario in scenarios]
        if len(set(ids)) != len(ids):
            # Comparing a file with itself: keep the runs apart.
            scenarios = [
                scenario.renamed(f'{scenario.scenario_id}__{index}')
                for index, scenario in enumerate(scenarios, start=1)
            ]

        report, outcomes = compare(scenarios, workers=workers(options))
        for outcome in outcomes:
            write_artifacts(
                outcome, output_root(options), plot=options['plot'] or outcome.scenario.plot
            )

        self.stdout.write(format_table(report))
        failed = sum(not row.passed for row in report.rows)
        style = self.style.SUCCESS if not failed else self.style.WARNING
        self.stdout.write(style(f'{len(report.rows) - failed} passed, {failed} failed.'))
