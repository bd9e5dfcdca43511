"""Outputs, gains, references and the control law selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from django.db import models

from applications.core.constants import DEFAULT_BETA_REF, DEFAULT_GAINS

# Canonical channel order, shared by the stabilizer and the rows of Θ.
OUTPUT_FIELDS = ('psi', 'omega1', 'id1', 'ih1', 'omega2', 'id2', 'ih2')
RELATIVE_DEGREES = (3, 2, 1, 1, 2, 1, 1)
PASSIVE_OUTPUTS = (0, 1, 2, 4, 5)


class ControlMode(models.TextChoices):
    ACTIVE = 'active', 'Active abc-frame fault-tolerant control'
    PASSIVE = 'passive', 'Passive dq-frame robustified control'
    OPEN_LOOP = 'open_loop', 'Controller off'


@dataclass(frozen=True, slots=True)
class OutputVector:
    psi: float
    omega1: float
    id1: float
    ih1: float
    omega2: float
    id2: float
    ih2: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in OUTPUT_FIELDS])

    def as_dict(self) -> dict[str, float]:
        return {f'y_{name}': float(getattr(self, name)) for name in OUTPUT_FIELDS}


@dataclass(frozen=True, slots=True)
class ControllerGains:
    k_psi: float = DEFAULT_GAINS['k_psi']
    k_omega1: float = DEFAULT_GAINS['k_omega1']
    k_id1: float = DEFAULT_GAINS['k_id1']
    k_ih1: float = DEFAULT_GAINS['k_ih1']
    k_omega2: float = DEFAULT_GAINS['k_omega2']
    k_id2: float = DEFAULT_GAINS['k_id2']
    k_ih2: float = DEFAULT_GAINS['k_ih2']
    delta: float = DEFAULT_GAINS['delta']
    eps: tuple[float, ...] = DEFAULT_GAINS['eps']
    psi_surface: tuple[float, float] = DEFAULT_GAINS['psi_surface']
    omega_surface: tuple[float] = DEFAULT_GAINS['omega_surface']
    robust_gain: float = DEFAULT_GAINS['robust_gain']

    def __post_init__(self) -> None:
        if not self.delta > 1.0:
            raise ValueError('homogeneity slope delta must be greater than 1')
        if len(self.eps) != len(OUTPUT_FIELDS) or min(self.eps) <= 0.0:
            raise ValueError('eps needs one strictly positive entry per output')
        if min(self.k_vector) <= 0.0:
            raise ValueError('stabilizer gains must be strictly positive')
        if len(self.psi_surface) != 2 or min(self.psi_surface) <= 0.0:
            raise ValueError('psi_surface needs two positive (Hurwitz) coefficients')
        if len(self.omega_surface) != 1 or self.omega_surface[0] <= 0.0:
            raise ValueError('omega_surface needs one positive (Hurwitz) coefficient')
        if not self.robust_gain > 0.0:
            raise ValueError('robust_gain must be strictly positive')

    @property
    def k_vector(self) -> np.ndarray:
        return np.array(
            [
                self.k_psi,
                self.k_omega1,
                self.k_id1,
                self.k_ih1,
                self.k_omega2,
                self.k_id2,
                self.k_ih2,
            ]
        )

    def surface(self, order: int) -> tuple[float, ...]:
        """Coefficients (c0, …, c_{order-2}) of the sliding surface of a chain."""

        return {1: (), 2: self.omega_surface, 3: self.psi_surface}[order]


@dataclass(frozen=True, slots=True)
class References:
    alpha: float = 0.0
    omega_ref_1: float = 0.0
    omega_ref_2: float = 0.0
    beta_ref: float = DEFAULT_BETA_REF
    alpha_dot: float = 0.0

    def omega_ref(self, turbine: int) -> float:
        return self.omega_ref_1 if turbine == 1 else self.omega_ref_2


@dataclass(frozen=True, slots=True)
class ControlLaw:
    mode: str = ControlMode.ACTIVE
    gains: ControllerGains = field(default_factory=ControllerGains)

    def __post_init__(self) -> None:
        if self.mode not in ControlMode.values:
            raise ValueError(f'unknown control mode {self.mode!r}')


__all__ = [
    'ControlLaw',
    'ControlMode',
    'ControllerGains',
    'OUTPUT_FIELDS',
    'OutputVector',
    'PASSIVE_OUTPUTS',
    'RELATIVE_DEGREES',
    'References',
]
