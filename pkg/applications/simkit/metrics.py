"""Figures of merit of a recorded run."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from applications.core.constants import (
    DEFAULT_SETTLE_TIME,
    DEFAULT_THRESHOLDS,
    OMEGA_REFERENCE_FLOOR,
)

from .models import RunMetrics, Termination, TimeSeries

WINDOW_TOLERANCE = 1e-9


def settle_time(t: np.ndarray, error: np.ndarray, tolerance: float) -> float | None:
    """Earliest instant after which |error| stays within ``tolerance`` until the end."""

    outside = np.flatnonzero(np.abs(error) > tolerance)
    if outside.size == 0:
        return float(t[0]) if t.size else None
    last = int(outside[-1])
    if last + 1 >= t.size:
        return None
    return float(t[last + 1])


def default_window(ts: TimeSeries) -> tuple[float, float]:
    end = float(ts.t[-1]) if len(ts) else 0.0
    return min(DEFAULT_SETTLE_TIME, end), end


def _window_mask(t: np.ndarray, start: float, end: float) -> np.ndarray:
    mask = (t >= start - WINDOW_TOLERANCE) & (t <= end + WINDOW_TOLERANCE)
    if not mask.any() and t.size:
        # Run stopped before the window: judge it on its last sample.
        mask[-1] = True
    return mask


def _max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


def extract_metrics(
    ts: TimeSeries,
    window: tuple[float, float | None] | None = None,
    thresholds: Mapping[str, float] | None = None,
) -> RunMetrics:
    thresholds = {**DEFAULT_THRESHOLDS, **(thresholds or {})}
    start, end = window or default_window(ts)
    if end is None:
        end = float(ts.t[-1]) if len(ts) else start
    mask = _window_mask(ts.t, start, end)
    t = ts.t

    def column(name: str, rows: np.ndarray | None = None) -> np.ndarray:
        values = ts.column(name)
        return values if rows is None else values[rows]

    omega_errors, omega_settles = [], []
    for turbine in (1, 2):
        y = column(f'y_omega{turbine}')
        reference = column(f'omega{turbine}') - y
        scale = max(abs(float(reference[0])), OMEGA_REFERENCE_FLOOR) if y.size else 1.0
        relative = y / scale
        omega_errors.append(_max_abs(relative[mask]))
        omega_settles.append(settle_time(t, relative, thresholds['omega_error']))

    phase_sums, phase_peak = [], 0.0
    for turbine in (1, 2):
        phases = np.column_stack(
            [column(f'i_{phase}{turbine}', mask) for phase in 'abc']
        )
        phase_sums.append(_max_abs(phases.sum(axis=1)))
        phase_peak = max(phase_peak, _max_abs(phases))

    y_psi = column('y_psi')
    return RunMetrics(
        window_start=float(start),
        window_end=float(end),
        samples=int(mask.sum()),
        psi_error=_max_abs(y_psi[mask]),
        omega_error1=omega_errors[0],
        omega_error2=omega_errors[1],
        id_max1=_max_abs(column('i_d1', mask)),
        id_max2=_max_abs(column('i_d2', mask)),
        ih_max1=_max_abs(column('i_h1', mask)),
        ih_max2=_max_abs(column('i_h2', mask)),
        phase_sum_max1=phase_sums[0],
        phase_sum_max2=phase_sums[1],
        phase_peak=phase_peak,
        phase_sum_ratio=max(phase_sums) / phase_peak if phase_peak > 0.0 else 0.0,
        diverged=ts.termination == Termination.DIVERGED,
        termination=str(ts.termination),
        t_final=float(t[-1]) if len(ts) else 0.0,
        psi_settle=settle_time(t, y_psi, thresholds['psi_error']),
        omega_settle1=omega_settles[0],
        omega_settle2=omega_settles[1],
    )


__all__ = ['default_window', 'extract_metrics', 'settle_time']
