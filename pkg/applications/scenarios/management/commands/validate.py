"""Check scenario files without running them."""

from __future__ import annotations

from django.core.management.base import BaseCommand, CommandError

from applications.core.constants import EXIT_CONFIG_ERROR
from applications.core.exceptions import ScenarioConfigError
from applications.scenarios.loader import load_scenario

from ._common import add_scenario_arguments


class Command(BaseCommand):
    help = 'Validates scenario files and lists every diagnostic found.'

    def add_arguments(self, parser) -> None:  # pragma: no cover - argparse plumbing
        add_scenario_arguments(parser, many=True)

    def handle(self, *args, **options):
        paths = options['configs']
        if not paths:
            raise CommandError('No --config file given.', returncode=EXIT_CONFIG_ERROR)

        invalid = 0
        for path in paths:
            try:
                scenario = load_scenario(path, seed=options.get('seed'), dt=options.get('dt'))
            except ScenarioConfigError as exc:
                invalid += 1
                self.stdout.write(self.style.ERROR(f'{path}: invalid'))
                for diagnostic in exc.diagnostics:
                    self.stdout.write(f'  {diagnostic}')
                continue
            self.stdout.write(self.style.SUCCESS(f'{path}: ok ({scenario.scenario_id})'))

        if invalid:
            raise CommandError(
                f'{invalid} of {len(paths)} scenario files are invalid.',
                returncode=EXIT_CONFIG_ERROR,
            )
