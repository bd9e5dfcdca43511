"""SVG line charts of the currents, speeds, yaw and phase sums of one run."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use('Agg')

from matplotlib import rcParams  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from applications.simkit.models import TimeSeries  # noqa: E402

# Stable element ids so that identical runs render identical files.
rcParams['svg.hashsalt'] = 'twinwind'

CHARTS: dict[str, tuple[str, tuple[tuple[str, ...], ...]]] = {
    'phase_currents': ('Phase currents (A)', (('i_a1', 'i_b1', 'i_c1'), ('i_a2', 'i_b2', 'i_c2'))),
    'dqh_currents': (
        'dq and homopolar currents (A)',
        (('i_d1', 'i_q1', 'i_h1'), ('i_d2', 'i_q2', 'i_h2')),
    ),
    'rotor_speed': ('Rotor speed (rad/s)', (('omega1',), ('omega2',))),
    'yaw': ('Yaw angle (rad)', (('psi',),)),
    'torques': ('Torques (N·m)', (('gamma_em1', 'gamma_a1'), ('gamma_em2', 'gamma_a2'))),
}


def _plot_panel(axes, series: TimeSeries, names: Sequence[str]) -> None:
    for name in names:
        axes.plot(series.t, series.column(name), linewidth=0.8, label=name)
    axes.grid(True, linewidth=0.3)
    axes.legend(loc='upper right', fontsize='small')


def _save(figure: Figure, path: Path) -> Path:
    figure.savefig(path, format='svg', metadata={'Date': None})
    return path


def render_chart(series: TimeSeries, key: str, directory: Path) -> Path:
    title, panels = CHARTS[key]
    figure = Figure(figsize=(8.0, 2.6 * len(panels)))
    axes_list = figure.subplots(len(panels), 1, sharex=True, squeeze=False)[:, 0]
    for axes, names in zip(axes_list, panels, strict=True):
        _plot_panel(axes, series, names)
    axes_list[0].set_title(title)
    axes_list[-1].set_xlabel('t (s)')
    return _save(figure, Path(directory) / f'{key}.svg')


def render_tracking(series: TimeSeries, directory: Path) -> Path:
    """Outputs against their references: ψ vs α and Ω_i vs Ω_i^ref."""

    figure = Figure(figsize=(8.0, 7.8))
    axes_list = figure.subplots(3, 1, sharex=True)
    psi = series.column('psi')
    axes_list[0].plot(series.t, psi, linewidth=0.8, label='psi')
    axes_list[0].plot(series.t, psi - series.column('y_psi'), '--', linewidth=0.8, label='alpha')
    for axes, turbine in zip(axes_list[1:], (1, 2), strict=True):
        omega = series.column(f'omega{turbine}')
        axes.plot(series.t, omega, linewidth=0.8, label=f'omega{turbine}')
        reference = omega - series.column(f'y_omega{turbine}')
        axes.plot(series.t, reference, '--', linewidth=0.8, label=f'omega_ref{turbine}')
    for axes in axes_list:
        axes.grid(True, linewidth=0.3)
        axes.legend(loc='upper right', fontsize='small')
    axes_list[0].set_title('Tracking')
    axes_list[-1].set_xlabel('t (s)')
    return _save(figure, Path(directory) / 'tracking.svg')


def render_phase_sums(series: TimeSeries, directory: Path) -> Path:
    """Σ i_k and Σ v_kn per machine; both vanish for a balanced, healthy drive."""

    figure = Figure(figsize=(8.0, 5.2))
    current_axes, voltage_axes = figure.subplots(2, 1, sharex=True)
    for turbine in (1, 2):
        currents = sum(series.column(f'i_{phase}{turbine}') for phase in 'abc')
        voltages = sum(series.column(f'v_{phase}n{turbine}') for phase in 'abc')
        current_axes.plot(series.t, currents, linewidth=0.8, label=f'sum i ({turbine})')
        voltage_axes.plot(series.t, voltages, linewidth=0.8, label=f'sum v ({turbine})')
    for axes, label in ((current_axes, 'A'), (voltage_axes, 'V')):
        axes.set_ylabel(label)
        axes.grid(True, linewidth=0.3)
        axes.legend(loc='upper right', fontsize='small')
    current_axes.set_title('Phase sums')
    voltage_axes.set_xlabel('t (s)')
    return _save(figure, Path(directory) / 'phase_sums.svg')


def render_charts(series: TimeSeries, directory: Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = [render_chart(series, key, directory) for key in CHARTS]
    paths.append(render_tracking(series, directory))
    paths.append(render_phase_sums(series, directory))
    return paths


__all__ = ['CHARTS', 'render_chart', 'render_charts', 'render_phase_sums', 'render_tracking']
