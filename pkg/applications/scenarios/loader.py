"""Reading scenario files into validated :class:`ScenarioConfig` values."""

from __future__ import annotations

import tomllib
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from django.conf import settings

from applications.core.exceptions import ScenarioConfigError

from .models import ScenarioConfig
from .serializers import ScenarioSerializer


def flatten_errors(errors: Any, prefix: str = '') -> list[str]:
    """``{'wind': {'vv': ['...']}}`` becomes ``['wind.vv: ...']``."""

    if isinstance(errors, Mapping):
        messages = []
        for key, value in errors.items():
            name = prefix if key == 'non_field_errors' else '.'.join(filter(None, [prefix, key]))
            messages.extend(flatten_errors(value, name))
        return messages
    if isinstance(errors, list | tuple):
        messages = []
        for index, item in enumerate(errors):
            if isinstance(item, Mapping | list):
                messages.extend(flatten_errors(item, f'{prefix}[{index}]'))
            else:
                messages.append(f'{prefix or "scenario"}: {item}')
        return messages
    return [f'{prefix or "scenario"}: {errors}']


def resolve_path(path: str | Path) -> Path:
    """Relative paths that do not exist here are looked up in the scenario directory."""

    candidate = Path(path).expanduser()
    if not candidate.is_absolute() and not candidate.exists():
        candidate = Path(settings.SCENARIO_CONFIG_DIR) / candidate
    return candidate.resolve()


def read_payload(path: Path) -> dict[str, Any]:
    try:
        with path.open('rb') as stream:
            return tomllib.load(stream)
    except FileNotFoundError as exc:
        raise ScenarioConfigError([f'{path}: file not found']) from exc
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ScenarioConfigError([f'{path}: {exc}']) from exc


def build_scenario(payload: Mapping[str, Any], source: Path | None = None) -> ScenarioConfig:
    serializer = ScenarioSerializer(data=payload, context={'source': source})
    if not serializer.is_valid():
        raise ScenarioConfigError(flatten_errors(serializer.errors))
    return serializer.save()


def load_scenario(
    path: str | Path, *, seed: int | None = None, dt: float | None = None
) -> ScenarioConfig:
    """Load and validate one scenario, applying command-line overrides."""

    source = resolve_path(path)
    scenario = build_scenario(read_payload(source), source)
    if seed is not None:
        scenario = scenario.with_seed(seed)
    if dt is not None:
        try:
            scenario = scenario.with_dt(dt)
        except ValueError as exc:
            raise ScenarioConfigError([f'integrator.dt: {exc}']) from exc
    return scenario


__all__ = ['build_scenario', 'flatten_errors', 'load_scenario', 'read_payload', 'resolve_path']
