"""Value types of the aerodynamic and yaw model."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

from applications.core.constants import (
    DEFAULT_AERO,
    DEFAULT_DRAG_POLYNOMIAL,
    DEFAULT_POWER_COEFFICIENT,
)


@dataclass(frozen=True, slots=True)
class AeroParams:
    rho: float = DEFAULT_AERO['rho']
    rp: float = DEFAULT_AERO['rp']
    dr: float = DEFAULT_AERO['dr']
    fr: float = DEFAULT_AERO['fr']
    lever: float = DEFAULT_AERO['lever']
    t_beta: float = DEFAULT_AERO['t_beta']

    def __post_init__(self) -> None:
        for name in ('rho', 'rp', 'dr', 'fr', 'lever', 't_beta'):
            if not getattr(self, name) > 0.0:
                raise ValueError(f'AeroParams.{name} must be strictly positive')

    @property
    def swept_factor(self) -> float:
        """πρ/2·R_p², the factor shared by power and drag."""

        return 0.5 * math.pi * self.rho * self.rp**2


@dataclass(frozen=True, slots=True)
class CdPolynomial:
    """Drag coefficient c_d(λ, β) = A(λ) + B(λ)·β with cubic A and B."""

    a0: float = DEFAULT_DRAG_POLYNOMIAL['a0']
    a1: float = DEFAULT_DRAG_POLYNOMIAL['a1']
    a2: float = DEFAULT_DRAG_POLYNOMIAL['a2']
    a3: float = DEFAULT_DRAG_POLYNOMIAL['a3']
    b0: float = DEFAULT_DRAG_POLYNOMIAL['b0']
    b1: float = DEFAULT_DRAG_POLYNOMIAL['b1']
    b2: float = DEFAULT_DRAG_POLYNOMIAL['b2']
    b3: float = DEFAULT_DRAG_POLYNOMIAL['b3']

    @property
    def a(self) -> tuple[float, float, float, float]:
        return (self.a0, self.a1, self.a2, self.a3)

    @property
    def b(self) -> tuple[float, float, float, float]:
        return (self.b0, self.b1, self.b2, self.b3)


@dataclass(frozen=True, slots=True)
class CpParameters:
    """Coefficients of the exponential power-coefficient surface.

    Substituted surface, not taken from the plant's own documentation:
    Cp = c1·(c2/λi − c3·β° − c4)·exp(−c5/λi) + c6·λ with
    1/λi = 1/(λ + 0.08·β°) − 0.035/(β°³ + 1) and β° the pitch in degrees.
    """

    c1: float = DEFAULT_POWER_COEFFICIENT['c1']
    c2: float = DEFAULT_POWER_COEFFICIENT['c2']
    c3: float = DEFAULT_POWER_COEFFICIENT['c3']
    c4: float = DEFAULT_POWER_COEFFICIENT['c4']
    c5: float = DEFAULT_POWER_COEFFICIENT['c5']
    c6: float = DEFAULT_POWER_COEFFICIENT['c6']


@dataclass(frozen=True, slots=True)
class WindInput:
    """Wind speed and direction sampled at one instant, with time derivatives."""

    vv: float
    alpha: float
    vv_dot: float = 0.0
    alpha_dot: float = 0.0

    def __post_init__(self) -> None:
        if self.vv < 0.0:
            raise ValueError('wind speed must be non-negative')


class WindProfile(Protocol):
    def __call__(self, t: float) -> WindInput: ...


__all__ = ['AeroParams', 'CdPolynomial', 'CpParameters', 'WindInput', 'WindProfile']
