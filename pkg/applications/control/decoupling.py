"""Analytic output chains and the input-output decomposition y^(ε) = Λ(x, t) + Θ(x, t)·u.

Every derivative is obtained by differentiating the plant model symbolically:
the yaw chain from the yaw equation and the drag polynomial, the speed chains
from the rotor equation through Cp and the abc air-gap torque, the current
channels from the stator equations seen through the Park matrix. Θ is the
exact decoupling matrix: the speed rows carry the pitch column (through ∂Cp/∂β)
as well as the voltage columns of their machine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from applications.aero.formulas import drag_coefficient_partials
from applications.core.constants import DECOUPLING_CONDITION_LIMIT, TIP_SPEED_FLOOR
from applications.core.exceptions import SingularDecoupling
from applications.core.numerics import check_condition
from applications.machine.models import FaultSpec
from applications.machine.park import dq_currents, park_transform_derivative
from applications.plant.dynamics import PlantEvaluation, evaluate_plant, state_vector
from applications.plant.models import (
    INPUT_SIZE,
    PITCH_SIGN,
    PSI,
    PSI_DOT,
    TURBINES,
    VOLTAGES,
    PlantEnvironment,
    PlantParams,
    PlantState,
)

from .models import OUTPUT_FIELDS, OutputVector, References

PSI_ROW = 0
OMEGA_ROW = {1: 1, 2: 4}
ID_ROW = {1: 2, 2: 5}
IH_ROW = {1: 3, 2: 6}


def outputs(x: PlantState | np.ndarray, refs: References) -> OutputVector:
    state = x if isinstance(x, PlantState) else PlantState(x)
    i_d1, _, i_h1 = dq_currents(state.currents(1), state.theta_e(1))
    i_d2, _, i_h2 = dq_currents(state.currents(2), state.theta_e(2))
    return OutputVector(
        psi=state.psi - refs.alpha,
        omega1=state.omega(1) - refs.omega_ref_1,
        id1=i_d1,
        ih1=i_h1,
        omega2=state.omega(2) - refs.omega_ref_2,
        id2=i_d2,
        ih2=i_h2,
    )


@dataclass(frozen=True, slots=True)
class Decomposition:
    """Output chains (y, ẏ, …, y^(ε−1)) per channel with Λ and Θ at one instant."""

    chains: tuple[tuple[float, ...], ...]
    lam: np.ndarray
    theta: np.ndarray

    def chain(self, name: str) -> tuple[float, ...]:
        return self.chains[OUTPUT_FIELDS.index(name)]


@dataclass(frozen=True, slots=True)
class _RotorRates:
    drag_free: float
    drag_pitch: float
    torque_free: float
    torque_pitch: float


def _rotor_rates(evaluation: PlantEvaluation, turbine: int) -> _RotorRates:
    """Rates of the drag F_i and the aerodynamic torque Γ_a,i split into u-free and Δβ parts."""

    params = evaluation.params
    aero = params.aero
    machine = evaluation.machines[turbine]
    loads = machine.loads
    if loads.calm or loads.lam < TIP_SPEED_FLOOR:
        # No usable wind: the rotor carries no load and Θ loses its pitch entries.
        return _RotorRates(0.0, 0.0, 0.0, 0.0)

    w, w_dot, lam = loads.facing, evaluation.facing_rate, loads.lam
    k = aero.swept_factor
    lam_dot = (aero.rp * machine.omega_rate - lam * w_dot) / w
    beta_free = evaluation.free_pitch_rate(turbine)
    beta_pitch = PITCH_SIGN[turbine] / aero.t_beta

    cd_lam, cd_beta = drag_coefficient_partials(lam, machine.beta, params.drag)
    cp = loads.cp
    torque_scale = k * aero.rp * w**2 / lam
    return _RotorRates(
        drag_free=k
        * ((cd_lam * lam_dot + cd_beta * beta_free) * w**2 + 2.0 * loads.cd * w * w_dot),
        drag_pitch=k * cd_beta * w**2 * beta_pitch,
        torque_free=torque_scale
        * (
            cp.d_lam * lam_dot
            + cp.d_beta * beta_free
            + 2.0 * cp.value * w_dot / w
            - cp.value * lam_dot / lam
        ),
        torque_pitch=torque_scale * cp.d_beta * beta_pitch,
    )


def decompose(evaluation: PlantEvaluation, refs: References) -> Decomposition:
    params = evaluation.params
    aero, machine_params = params.aero, params.machine
    x = evaluation.x
    lam = np.zeros(len(OUTPUT_FIELDS))
    theta = np.zeros((len(OUTPUT_FIELDS), INPUT_SIZE))
    rates = {turbine: _rotor_rates(evaluation, turbine) for turbine in TURBINES}

    psi_acc = evaluation.psi_acceleration
    psi_chain = (x[PSI] - refs.alpha, x[PSI_DOT] - refs.alpha_dot, psi_acc)
    lam[PSI_ROW] = (
        -aero.fr * psi_acc + aero.lever * (rates[1].drag_free - rates[2].drag_free)
    ) / aero.dr
    theta[PSI_ROW, 0] = aero.lever * (rates[1].drag_pitch - rates[2].drag_pitch) / aero.dr

    chains: dict[str, tuple[float, ...]] = {'psi': psi_chain}
    for turbine in TURBINES:
        machine = evaluation.machines[turbine]
        speed = machine_params.p * machine.omega
        dqh_free = speed * (park_transform_derivative(machine.theta_e) @ machine.currents)
        dqh_free += machine.park @ machine.free_current_rate
        dqh_input = machine.park @ machine.winding.inverse
        torque_gradient = machine.winding.torque_gradient(machine.currents, machine_params.p)
        em_torque_rate = float(torque_gradient @ machine.free_current_rate)
        em_torque_rate += speed * machine.winding.torque_angle_sensitivity(
            machine.currents, machine_params.p
        )

        row, columns = OMEGA_ROW[turbine], VOLTAGES[turbine]
        lam[row] = (
            rates[turbine].torque_free
            - em_torque_rate
            - machine_params.fv * machine.omega_rate
        ) / machine_params.j
        theta[row, 0] = rates[turbine].torque_pitch / machine_params.j
        theta[row, columns] = -(torque_gradient @ machine.winding.inverse) / machine_params.j

        lam[ID_ROW[turbine]] = dqh_free[0]
        theta[ID_ROW[turbine], columns] = dqh_input[0]
        lam[IH_ROW[turbine]] = dqh_free[2]
        theta[IH_ROW[turbine], columns] = dqh_input[2]

        chains[f'omega{turbine}'] = (machine.omega - refs.omega_ref(turbine), machine.omega_rate)
        chains[f'id{turbine}'] = (machine.i_d,)
        chains[f'ih{turbine}'] = (machine.i_h,)

    return Decomposition(
        chains=tuple(chains[name] for name in OUTPUT_FIELDS), lam=lam, theta=theta
    )


def output_decomposition(
    x: PlantState | np.ndarray,
    t: float,
    fault: FaultSpec | None,
    env: PlantEnvironment,
    refs: References,
    params: PlantParams,
) -> Decomposition:
    return decompose(evaluate_plant(state_vector(x), t, fault, env, params), refs)


def lambda_vector(
    x: PlantState | np.ndarray,
    t: float,
    fault: FaultSpec | None,
    env: PlantEnvironment,
    refs: References,
    params: PlantParams,
) -> np.ndarray:
    return output_decomposition(x, t, fault, env, refs, params).lam


def theta_matrix(
    x: PlantState | np.ndarray,
    t: float,
    fault: FaultSpec | None,
    env: PlantEnvironment,
    params: PlantParams,
) -> np.ndarray:
    """Θ(x, t); the references only shift the chains, never Θ."""

    theta = output_decomposition(x, t, fault, env, References(), params).theta
    check_condition(
        theta, limit=DECOUPLING_CONDITION_LIMIT, error=SingularDecoupling, label='decoupling matrix'
    )
    return theta


__all__ = [
    'Decomposition',
    'decompose',
    'lambda_vector',
    'output_decomposition',
    'outputs',
    'theta_matrix',
]
