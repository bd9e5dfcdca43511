"""Active abc-frame fault-tolerant law, passive dq-frame baseline and the open loop."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from applications.core.constants import DECOUPLING_CONDITION_LIMIT
from applications.core.exceptions import SingularDecoupling
from applications.core.numerics import guarded_solve
from applications.machine.models import FaultSpec
from applications.plant.dynamics import PlantEvaluation, evaluate_plant, state_vector
from applications.plant.models import (
    INPUT_SIZE,
    TURBINES,
    VOLTAGES,
    PlantEnvironment,
    PlantInput,
    PlantParams,
    PlantState,
)

from .decoupling import ID_ROW, decompose, output_decomposition
from .homogeneous import exponents, sliding_variables, stabilizer
from .models import (
    OUTPUT_FIELDS,
    PASSIVE_OUTPUTS,
    ControlLaw,
    ControllerGains,
    ControlMode,
    References,
)

ALL_OUTPUTS = tuple(range(len(OUTPUT_FIELDS)))


def stabilizing_target(
    chains: Sequence[Sequence[float]],
    gains: ControllerGains,
    channels: Sequence[int],
    k: np.ndarray,
) -> np.ndarray:
    """z̄ for the selected channels."""

    sigma = sliding_variables(chains, gains)
    return stabilizer(sigma, exponents(chains, gains, channels), k)


def _solve(theta: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    return guarded_solve(
        theta,
        rhs,
        limit=DECOUPLING_CONDITION_LIMIT,
        error=SingularDecoupling,
        label='decoupling matrix',
    )


def active_control(
    x: PlantState | np.ndarray,
    t: float,
    fault: FaultSpec | None,
    env: PlantEnvironment,
    refs: References,
    gains: ControllerGains,
    params: PlantParams,
) -> PlantInput:
    """u = Θ⁻¹·(z̄ − Λ) on the faulted model; the fault is assumed perfectly diagnosed.

    Δβ is not saturated. Where a pitch drops below zero the Cp surface is
    flat in β, so that speed row loses its pitch column; the yaw row keeps
    it through the drag polynomial, which stays affine in β.
    """

    decomposition = output_decomposition(x, t, fault, env, refs, params)
    z_bar = stabilizing_target(decomposition.chains, gains, ALL_OUTPUTS, gains.k_vector)
    return PlantInput(_solve(decomposition.theta, z_bar - decomposition.lam))


def dq_voltage_map(evaluation: PlantEvaluation) -> np.ndarray:
    """7×5 map from (Δβ, v_d1, v_q1, v_d2, v_q2) to u with zero homopolar voltage."""

    mapping = np.zeros((INPUT_SIZE, 1 + 2 * len(TURBINES)))
    mapping[0, 0] = 1.0
    for index, turbine in enumerate(TURBINES):
        park = evaluation.machines[turbine].park
        mapping[VOLTAGES[turbine], 1 + 2 * index : 3 + 2 * index] = park[:2].T
    return mapping


def passive_gains(gains: ControllerGains) -> np.ndarray:
    k = gains.k_vector
    for row in ID_ROW.values():
        k[row] *= gains.robust_gain
    return k[list(PASSIVE_OUTPUTS)]


def passive_control(
    x: PlantState | np.ndarray,
    t: float,
    env: PlantEnvironment,
    refs: References,
    gains: ControllerGains,
    params: PlantParams,
) -> PlantInput:
    """Healthy-model dq law on (ψ, Ω₁, i_d1, Ω₂, i_d2) with robustified i_d gains.

    The fault is ignored by construction: Λ and Θ are evaluated with L^s.
    """

    evaluation = evaluate_plant(state_vector(x), t, None, env, params)
    decomposition = decompose(evaluation, refs)
    rows = list(PASSIVE_OUTPUTS)
    chains = [decomposition.chains[row] for row in rows]
    z_bar = stabilizing_target(chains, gains, PASSIVE_OUTPUTS, passive_gains(gains))
    mapping = dq_voltage_map(evaluation)
    reduced = decomposition.theta[rows] @ mapping
    return PlantInput(mapping @ _solve(reduced, z_bar - decomposition.lam[rows]))


class Controller(Protocol):
    mode: str

    def __call__(
        self, x: np.ndarray, t: float, env: PlantEnvironment, refs: References
    ) -> PlantInput: ...


@dataclass(frozen=True, slots=True)
class ActiveController:
    gains: ControllerGains
    params: PlantParams
    fault: FaultSpec | None = None
    mode: str = ControlMode.ACTIVE

    def __call__(
        self, x: np.ndarray, t: float, env: PlantEnvironment, refs: References
    ) -> PlantInput:
        return active_control(x, t, self.fault, env, refs, self.gains, self.params)


@dataclass(frozen=True, slots=True)
class PassiveController:
    gains: ControllerGains
    params: PlantParams
    mode: str = ControlMode.PASSIVE

    def __call__(
        self, x: np.ndarray, t: float, env: PlantEnvironment, refs: References
    ) -> PlantInput:
        return passive_control(x, t, env, refs, self.gains, self.params)


@dataclass(frozen=True, slots=True)
class OpenLoopController:
    mode: str = ControlMode.OPEN_LOOP

    def __call__(
        self, x: np.ndarray, t: float, env: PlantEnvironment, refs: References
    ) -> PlantInput:
        return PlantInput()


def build_controller(
    law: ControlLaw, params: PlantParams, fault: FaultSpec | None
) -> Controller:
    if law.mode == ControlMode.ACTIVE:
        return ActiveController(law.gains, params, fault)
    if law.mode == ControlMode.PASSIVE:
        return PassiveController(law.gains, params)
    return OpenLoopController()


__all__ = [
    'ActiveController',
    'Controller',
    'OpenLoopController',
    'PassiveController',
    'active_control',
    'build_controller',
    'dq_voltage_map',
    'passive_control',
    'passive_gains',
    'stabilizing_target',
]
