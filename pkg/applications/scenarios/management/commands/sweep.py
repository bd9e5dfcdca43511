"""Sweep one scenario over fault severities under each control law."""

from __future__ import annotations

from django.core.management.base import BaseCommand, CommandError

from applications.control.models import ControlMode
from applications.core.constants import EXIT_CONFIG_ERROR
from applications.scenarios.reports import format_table, format_tolerance, sweep, write_artifacts

from ._common import add_scenario_arguments, add_workers_argument, load, output_root, workers


class Command(BaseCommand):
    help = 'Runs a scenario across fault severities and reports the largest tolerated one.'

    def add_arguments(self, parser) -> None:  # pragma: no cover - argparse plumbing
        add_scenario_arguments(parser)
        add_workers_argument(parser)
        parser.add_argument(
            '--mu',
            dest='severities',
            type=float,
            nargs='+',
            required=True,
            help='Fault severities in [0, 1).',
        )
        parser.add_argument(
            '--modes',
            nargs='+',
            choices=[ControlMode.PASSIVE, ControlMode.ACTIVE],
            default=[ControlMode.PASSIVE, ControlMode.ACTIVE],
            help='Control laws to sweep.',
        )

    def handle(self, *args, **options):
        base = load(options['config'], options)
        try:
            result, outcomes = sweep(
                base, options['severities'], options['modes'], workers=workers(options)
            )
        except ValueError as exc:
            raise CommandError(str(exc), returncode=EXIT_CONFIG_ERROR) from exc

        root = output_root(options, base)
        for outcome in outcomes:
            write_artifacts(outcome, root, plot=options['plot'] or base.plot)

        self.stdout.write(format_table(result.report))
        self.stdout.write(self.style.SUCCESS(format_tolerance(result)))
