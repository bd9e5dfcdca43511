"""Integrator settings, recorded trajectories and run metrics."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields

import numpy as np
from django.db import models

from applications.control.models import OUTPUT_FIELDS
from applications.core.constants import (
    DEFAULT_DT,
    DEFAULT_HORIZON,
    DEFAULT_TURBULENCE,
    DT_FIDELITY_LIMIT,
)
from applications.core.exceptions import DivergedState, SingularDecoupling
from applications.plant.models import INPUT_FIELDS, STATE_FIELDS

logger = logging.getLogger(__name__)

OUTPUT_COLUMNS = tuple(f'y_{name}' for name in OUTPUT_FIELDS)
DERIVED_FIELDS = (
    'i_d1',
    'i_q1',
    'i_h1',
    'i_d2',
    'i_q2',
    'i_h2',
    'gamma_em1',
    'gamma_em2',
    'gamma_a1',
    'gamma_a2',
    'f_drag1',
    'f_drag2',
)
# Frozen column order of the time-series CSV.
COLUMNS = ('t', *STATE_FIELDS, *INPUT_FIELDS, *OUTPUT_COLUMNS, *DERIVED_FIELDS)


class IntegrationMethod(models.TextChoices):
    RK4 = 'rk4', 'Classical fourth-order Runge-Kutta'
    EULER = 'euler', 'Explicit Euler'


class WindProfileKind(models.TextChoices):
    CONSTANT = 'constant', 'Constant wind'
    STEP = 'step', 'Step in speed and/or direction'
    RAMP = 'ramp', 'Linear ramp in speed and/or direction'
    TURBULENCE = 'turbulence', 'Seeded sum-of-sinusoids turbulence'


class Termination(models.TextChoices):
    COMPLETED = 'completed', 'Reached the horizon'
    DIVERGED = 'diverged', 'State left the admissible region'
    SINGULAR = 'singular', 'Model or decoupling matrix became singular'


@dataclass(frozen=True, slots=True)
class IntegratorConfig:
    dt: float = DEFAULT_DT
    t_end: float = DEFAULT_HORIZON
    method: str = IntegrationMethod.RK4
    # Zero-order hold of the control input; None evaluates the law at every step.
    control_period: float | None = None
    # Sample the law at the state predicted half a hold period ahead.
    predictive_hold: bool = True

    def __post_init__(self) -> None:
        if not self.dt > 0.0:
            raise ValueError('dt must be strictly positive')
        if not self.t_end > 0.0:
            raise ValueError('t_end must be strictly positive')
        if self.method not in IntegrationMethod.values:
            raise ValueError(f'unknown integration method {self.method!r}')
        if self.control_period is not None and self.control_period < self.dt:
            raise ValueError('control_period cannot be shorter than dt')
        if self.dt > DT_FIDELITY_LIMIT:
            logger.warning(
                'dt=%g s exceeds %g s; electrical transients will be poorly resolved',
                self.dt,
                DT_FIDELITY_LIMIT,
            )

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def hold_steps(self) -> int:
        if self.control_period is None:
            return 1
        return max(1, int(round(self.control_period / self.dt)))

    def time(self, step: int) -> float:
        return step * self.dt


@dataclass(frozen=True, slots=True)
class WindProfileSpec:
    """Parameters of one wind profile; fields unused by ``kind`` are ignored."""

    kind: str = WindProfileKind.CONSTANT
    vv: float = 8.0
    alpha: float = 0.0
    t_switch: float = 0.0
    vv_after: float | None = None
    alpha_after: float | None = None
    duration: float = 1.0
    intensity: float = DEFAULT_TURBULENCE['intensity']
    components: int = DEFAULT_TURBULENCE['components']
    f_min: float = DEFAULT_TURBULENCE['f_min']
    f_max: float = DEFAULT_TURBULENCE['f_max']
    seed: int = DEFAULT_TURBULENCE['seed']

    def __post_init__(self) -> None:
        if self.kind not in WindProfileKind.values:
            raise ValueError(f'unknown wind profile {self.kind!r}')
        if self.vv < 0.0 or (self.vv_after is not None and self.vv_after < 0.0):
            raise ValueError('wind speed must be non-negative')
        if not self.duration > 0.0:
            raise ValueError('ramp duration must be strictly positive')
        if self.components < 1 or not 0.0 < self.f_min <= self.f_max:
            raise ValueError('turbulence needs at least one component in a valid band')

    @property
    def final_vv(self) -> float:
        return self.vv if self.vv_after is None else self.vv_after

    @property
    def final_alpha(self) -> float:
        return self.alpha if self.alpha_after is None else self.alpha_after


@dataclass(slots=True)
class TimeSeries:
    """Uniformly sampled closed-loop trajectory.

    Row n holds x(t_n), the input applied on [t_n, t_n+1), the tracking
    outputs and the derived machine and rotor quantities at t_n.
    """

    t: np.ndarray
    states: np.ndarray
    inputs: np.ndarray
    outputs: np.ndarray
    derived: np.ndarray
    termination: str = Termination.COMPLETED
    terminated_at: float | None = None
    reason: str = ''
    meta: dict[str, float | str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        rows = len(self.t)
        for name, width in (
            ('states', len(STATE_FIELDS)),
            ('inputs', len(INPUT_FIELDS)),
            ('outputs', len(OUTPUT_COLUMNS)),
            ('derived', len(DERIVED_FIELDS)),
        ):
            block = getattr(self, name)
            if block.shape != (rows, width):
                raise ValueError(f'{name} has shape {block.shape}, expected {(rows, width)}')

    def __len__(self) -> int:
        return len(self.t)

    @property
    def completed(self) -> bool:
        return self.termination == Termination.COMPLETED

    def as_table(self) -> np.ndarray:
        return np.column_stack([self.t, self.states, self.inputs, self.outputs, self.derived])

    @classmethod
    def from_table(cls, table: np.ndarray, **extra) -> TimeSeries:
        table = np.asarray(table, dtype=float).reshape(-1, len(COLUMNS))
        edges = np.cumsum(
            [1, len(STATE_FIELDS), len(INPUT_FIELDS), len(OUTPUT_COLUMNS), len(DERIVED_FIELDS)]
        )
        t, states, inputs, outputs, derived, _ = np.split(table, edges, axis=1)
        return cls(t[:, 0].copy(), states, inputs, outputs, derived, **extra)

    def column(self, name: str) -> np.ndarray:
        if name == 't':
            return self.t
        for block, names in (
            (self.states, STATE_FIELDS),
            (self.inputs, INPUT_FIELDS),
            (self.outputs, OUTPUT_COLUMNS),
            (self.derived, DERIVED_FIELDS),
        ):
            if name in names:
                return block[:, names.index(name)]
        raise KeyError(name)

    def raise_for_termination(self) -> None:
        if self.termination == Termination.DIVERGED:
            raise DivergedState(self.terminated_at, self.reason)
        if self.termination == Termination.SINGULAR:
            raise SingularDecoupling(f'run stopped at t={self.terminated_at:.6f} s: {self.reason}')


@dataclass(frozen=True, slots=True)
class RunMetrics:
    """Figures of merit over the metrics window [window_start, window_end]."""

    window_start: float
    window_end: float
    samples: int
    psi_error: float
    omega_error1: float
    omega_error2: float
    id_max1: float
    id_max2: float
    ih_max1: float
    ih_max2: float
    phase_sum_max1: float
    phase_sum_max2: float
    phase_peak: float
    phase_sum_ratio: float
    diverged: bool
    termination: str
    t_final: float
    psi_settle: float | None
    omega_settle1: float | None
    omega_settle2: float | None

    @property
    def omega_error(self) -> float:
        return max(self.omega_error1, self.omega_error2)

    @property
    def id_max(self) -> float:
        return max(self.id_max1, self.id_max2)

    @property
    def ih_max(self) -> float:
        return max(self.ih_max1, self.ih_max2)

    def as_dict(self) -> dict[str, float | int | bool | str | None]:
        return {item.name: getattr(self, item.name) for item in fields(self)}


__all__ = [
    'COLUMNS',
    'DERIVED_FIELDS',
    'IntegrationMethod',
    'IntegratorConfig',
    'OUTPUT_COLUMNS',
    'RunMetrics',
    'Termination',
    'TimeSeries',
    'WindProfileKind',
    'WindProfileSpec',
]
