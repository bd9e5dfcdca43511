"""State, input and parameter containers of the coupled twin turbine plant."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from applications.aero.models import AeroParams, CdPolynomial, CpParameters, WindInput
from applications.core.constants import DEFAULT_BETA_REF
from applications.machine.models import MachineParams

STATE_FIELDS = (
    'beta1',
    'beta2',
    'psi',
    'psi_dot',
    'i_a1',
    'i_b1',
    'i_c1',
    'omega1',
    'i_a2',
    'i_b2',
    'i_c2',
    'omega2',
    'theta_e1',
    'theta_e2',
)
INPUT_FIELDS = ('delta_beta', 'v_an1', 'v_bn1', 'v_cn1', 'v_an2', 'v_bn2', 'v_cn2')

STATE_SIZE = len(STATE_FIELDS)
INPUT_SIZE = len(INPUT_FIELDS)

BETA1, BETA2, PSI, PSI_DOT = 0, 1, 2, 3
OMEGA1, OMEGA2 = 7, 11
THETA1, THETA2 = 12, 13
CURRENTS = {1: slice(4, 7), 2: slice(8, 11)}
OMEGA = {1: OMEGA1, 2: OMEGA2}
THETA = {1: THETA1, 2: THETA2}
BETA = {1: BETA1, 2: BETA2}
VOLTAGES = {1: slice(1, 4), 2: slice(4, 7)}
PITCH_SIGN = {1: 1, 2: -1}
TURBINES = (1, 2)


def _as_vector(values, size: int, label: str) -> np.ndarray:
    vector = np.array(values, dtype=float)
    if vector.shape != (size,):
        raise ValueError(f'{label} must have {size} entries, got shape {vector.shape}')
    vector.setflags(write=False)
    return vector


@dataclass(frozen=True, slots=True)
class PlantState:
    """x = [β₁ β₂ ψ ψ̇ i_a1 i_b1 i_c1 Ω₁ i_a2 i_b2 i_c2 Ω₂] plus θ_e1, θ_e2."""

    vector: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, 'vector', _as_vector(self.vector, STATE_SIZE, 'PlantState'))

    @classmethod
    def from_fields(cls, **values: float) -> PlantState:
        unknown = set(values) - set(STATE_FIELDS)
        if unknown:
            raise ValueError(f'unknown state fields: {sorted(unknown)}')
        return cls(np.array([values.get(name, 0.0) for name in STATE_FIELDS]))

    @property
    def psi(self) -> float:
        return float(self.vector[PSI])

    @property
    def psi_dot(self) -> float:
        return float(self.vector[PSI_DOT])

    def beta(self, turbine: int) -> float:
        return float(self.vector[BETA[turbine]])

    def currents(self, turbine: int) -> np.ndarray:
        return self.vector[CURRENTS[turbine]]

    def omega(self, turbine: int) -> float:
        return float(self.vector[OMEGA[turbine]])

    def theta_e(self, turbine: int) -> float:
        return float(self.vector[THETA[turbine]])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(STATE_FIELDS, map(float, self.vector), strict=True))


@dataclass(frozen=True, slots=True)
class PlantInput:
    """u = [Δβ v_an1 v_bn1 v_cn1 v_an2 v_bn2 v_cn2]."""

    vector: np.ndarray = field(default_factory=lambda: np.zeros(INPUT_SIZE))

    def __post_init__(self) -> None:
        object.__setattr__(self, 'vector', _as_vector(self.vector, INPUT_SIZE, 'PlantInput'))

    @property
    def delta_beta(self) -> float:
        return float(self.vector[0])

    def voltages(self, turbine: int) -> np.ndarray:
        return self.vector[VOLTAGES[turbine]]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(INPUT_FIELDS, map(float, self.vector), strict=True))


@dataclass(frozen=True, slots=True)
class PlantParams:
    """Both turbines share one rotor and one machine design."""

    aero: AeroParams = field(default_factory=AeroParams)
    machine: MachineParams = field(default_factory=MachineParams)
    drag: CdPolynomial = field(default_factory=CdPolynomial)
    cp: CpParameters = field(default_factory=CpParameters)


@dataclass(frozen=True, slots=True)
class PlantEnvironment:
    """Exogenous signals at one instant: the wind and the collective pitch reference."""

    wind: WindInput
    beta_ref: float = DEFAULT_BETA_REF


__all__ = [
    'INPUT_FIELDS',
    'INPUT_SIZE',
    'PlantEnvironment',
    'PlantInput',
    'PlantParams',
    'PlantState',
    'STATE_FIELDS',
    'STATE_SIZE',
]
