"""Machine parameters, stator fault description and electrical state."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from django.db import models

from applications.core.constants import DEFAULT_FAULT_ONSET, DEFAULT_MACHINE, SQRT_THREE_HALVES
from applications.core.exceptions import InvalidSeverity


class FaultPhase(models.TextChoices):
    A = 'a', 'Phase a'
    B = 'b', 'Phase b'
    C = 'c', 'Phase c'

    @property
    def index(self) -> int:
        return 'abc'.index(self.value)


class Turbine(models.IntegerChoices):
    FIRST = 1, 'Turbine 1'
    SECOND = 2, 'Turbine 2'


@dataclass(frozen=True, slots=True)
class MachineParams:
    """Salient PMSM constants.

    The abc inductance profile (ls0, ls2, ms0) is derived from (ld, lq, l0)
    so that the power-invariant Park transform of L(θ) is diag(ld, lq, l0).
    """

    rs: float = DEFAULT_MACHINE['rs']
    phi_f: float = DEFAULT_MACHINE['phi_f']
    p: int = DEFAULT_MACHINE['p']
    ld: float = DEFAULT_MACHINE['ld']
    lq: float = DEFAULT_MACHINE['lq']
    l0: float = DEFAULT_MACHINE['l0']
    j: float = DEFAULT_MACHINE['j']
    fv: float = DEFAULT_MACHINE['fv']

    def __post_init__(self) -> None:
        for name in ('rs', 'phi_f', 'ld', 'lq', 'l0', 'j'):
            if not getattr(self, name) > 0.0:
                raise ValueError(f'MachineParams.{name} must be strictly positive')
        if self.fv < 0.0:
            raise ValueError('MachineParams.fv must be non-negative')
        if int(self.p) != self.p or self.p < 1:
            raise ValueError('MachineParams.p must be an integer >= 1')
        if not self.ls0 > self.ms0 > 0.0:
            raise ValueError('inductance profile requires ls0 > |ms0| > 0 (l0 < (ld + lq) / 2)')

    @property
    def ls0(self) -> float:
        return (self.ld + self.lq + self.l0) / 3.0

    @property
    def ls2(self) -> float:
        return (self.ld - self.lq) / 3.0

    @property
    def ms0(self) -> float:
        return (self.ld + self.lq) / 6.0 - self.l0 / 3.0

    @property
    def dq_flux(self) -> float:
        """Magnet flux on the q axis of the power-invariant Park frame."""

        return SQRT_THREE_HALVES * self.phi_f


@dataclass(frozen=True, slots=True)
class FaultSpec:
    """Inter-turn short circuit on one phase of one turbine's stator."""

    mu_bar: float
    turbine: int = Turbine.FIRST
    phase: str = FaultPhase.B
    t_on: float = DEFAULT_FAULT_ONSET

    def __post_init__(self) -> None:
        if not 0.0 <= self.mu_bar < 1.0:
            raise InvalidSeverity(f'severity {self.mu_bar!r} is outside [0, 1)')
        if self.turbine not in Turbine.values:
            raise ValueError(f'faulted turbine must be 1 or 2, got {self.turbine!r}')
        if self.phase not in FaultPhase.values:
            raise ValueError(f'faulted phase must be a, b or c, got {self.phase!r}')

    @property
    def phase_index(self) -> int:
        return FaultPhase(self.phase).index

    def is_active(self, t: float) -> bool:
        return t >= self.t_on and self.mu_bar > 0.0

    def severity_for(self, turbine: int, t: float) -> float:
        """Severity seen by ``turbine`` at time ``t`` (0 for the healthy machine)."""

        if turbine != self.turbine or not self.is_active(t):
            return 0.0
        return self.mu_bar


@dataclass(frozen=True, slots=True)
class ElectricalState:
    currents: np.ndarray = field(default_factory=lambda: np.zeros(3))
    theta_e: float = 0.0
    omega: float = 0.0


__all__ = ['ElectricalState', 'FaultPhase', 'FaultSpec', 'MachineParams', 'Turbine']
