"""Scenario runner settings resolved from the environment."""

from pathlib import Path

from settings.components.base import BASE_DIR, env

# Relative values are taken against the project root.
SCENARIO_CONFIG_DIR = BASE_DIR / Path(env('TWINWIND_CONFIG_DIR', default='config/scenarios'))
SCENARIO_OUTPUT_DIR = BASE_DIR / Path(env('TWINWIND_OUTPUT_DIR', default='runs'))
SCENARIO_WORKERS = env.int('TWINWIND_WORKERS', default=1)
