"""Per-scenario artifacts: time-series CSV, metrics JSON and charts."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np

from applications.simkit.models import COLUMNS, RunMetrics, TimeSeries

CSV_NAME = 'timeseries.csv'
METRICS_NAME = 'metrics.json'


def scenario_directory(root: Path, scenario_id: str) -> Path:
    directory = Path(root) / scenario_id
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def write_timeseries_csv(series: TimeSeries, path: Path) -> Path:
    """One row per grid point in the frozen column order, floats at full precision."""

    with Path(path).open('w', encoding='utf-8', newline='') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(COLUMNS)
        for row in series.as_table():
            writer.writerow([repr(float(value)) for value in row])
    return Path(path)


def read_timeseries_csv(path: Path, **extra) -> TimeSeries:
    with Path(path).open(encoding='utf-8', newline='') as stream:
        reader = csv.reader(stream)
        header = tuple(next(reader))
        if header != COLUMNS:
            raise ValueError(f'{path}: unexpected CSV header')
        rows = [[float(value) for value in row] for row in reader]
    return TimeSeries.from_table(np.array(rows, dtype=float).reshape(-1, len(COLUMNS)), **extra)


def metrics_payload(
    scenario_id: str,
    series: TimeSeries,
    metrics: RunMetrics,
    verdict: dict[str, Any] | None = None,
) -> dict[str, Any]:
    return {
        'scenario_id': scenario_id,
        'termination': str(series.termination),
        'terminated_at': series.terminated_at,
        'reason': series.reason,
        'metrics': metrics.as_dict(),
        'verdict': verdict,
    }


def write_metrics_json(payload: dict[str, Any], path: Path) -> Path:
    Path(path).write_text(json.dumps(payload, indent=2) + '\n', encoding='utf-8')
    return Path(path)


def read_metrics_json(path: Path) -> dict[str, Any]:
    return json.loads(Path(path).read_text(encoding='utf-8'))


__all__ = [
    'CSV_NAME',
    'METRICS_NAME',
    'metrics_payload',
    'read_metrics_json',
    'read_timeseries_csv',
    'scenario_directory',
    'write_metrics_json',
    'write_timeseries_csv',
]
