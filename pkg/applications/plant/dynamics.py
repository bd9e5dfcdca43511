"""Control-affine vector field ẋ = f_μ̄(x, t) + g_μ̄(x, t)·u of the twin turbine."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from applications.aero.formulas import (
    RotorLoads,
    effective_wind_rate,
    pitch_dynamics,
    rotor_loads,
    yaw_acceleration,
)
from applications.aero.models import WindInput
from applications.machine.electrical import (
    WindingModel,
    rotor_acceleration,
    winding_model,
)
from applications.machine.models import FaultPhase, FaultSpec
from applications.machine.park import park_transform

from .models import (
    BETA,
    CURRENTS,
    INPUT_SIZE,
    OMEGA,
    PITCH_SIGN,
    PSI,
    PSI_DOT,
    STATE_SIZE,
    THETA,
    TURBINES,
    VOLTAGES,
    PlantEnvironment,
    PlantInput,
    PlantParams,
    PlantState,
)


def state_vector(x: PlantState | np.ndarray) -> np.ndarray:
    return x.vector if isinstance(x, PlantState) else np.asarray(x, dtype=float)


def input_vector(u: PlantInput | np.ndarray) -> np.ndarray:
    return u.vector if isinstance(u, PlantInput) else np.asarray(u, dtype=float)


def severity(fault: FaultSpec | None, turbine: int, t: float) -> tuple[float, str]:
    if fault is None:
        return 0.0, FaultPhase.B
    return fault.severity_for(turbine, t), fault.phase


@dataclass(frozen=True, slots=True)
class MachineEvaluation:
    """Everything one turbine contributes to the vector field at (x, t)."""

    turbine: int
    mu_bar: float
    currents: np.ndarray
    omega: float
    theta_e: float
    beta: float
    winding: WindingModel
    park: np.ndarray
    dqh: np.ndarray
    gamma_em: float
    loads: RotorLoads
    free_current_rate: np.ndarray
    omega_rate: float

    @property
    def i_d(self) -> float:
        return float(self.dqh[0])

    @property
    def i_q(self) -> float:
        return float(self.dqh[1])

    @property
    def i_h(self) -> float:
        return float(self.dqh[2])


@dataclass(frozen=True, slots=True)
class PlantEvaluation:
    t: float
    x: np.ndarray
    env: PlantEnvironment
    params: PlantParams
    machines: dict[int, MachineEvaluation]
    facing_rate: float
    psi_acceleration: float

    @property
    def wind(self) -> WindInput:
        return self.env.wind

    def free_pitch_rate(self, turbine: int) -> float:
        return pitch_dynamics(
            self.machines[turbine].beta, self.env.beta_ref, 0.0, self.params.aero.t_beta, 1
        )

    def drift(self) -> np.ndarray:
        f = np.zeros(STATE_SIZE)
        p = self.params.machine.p
        for turbine, machine in self.machines.items():
            f[BETA[turbine]] = self.free_pitch_rate(turbine)
            f[CURRENTS[turbine]] = machine.free_current_rate
            f[OMEGA[turbine]] = machine.omega_rate
            f[THETA[turbine]] = p * machine.omega
        f[PSI] = self.x[PSI_DOT]
        f[PSI_DOT] = self.psi_acceleration
        return f

    def input_matrix(self) -> np.ndarray:
        g = np.zeros((STATE_SIZE, INPUT_SIZE))
        for turbine, machine in self.machines.items():
            g[BETA[turbine], 0] = PITCH_SIGN[turbine] / self.params.aero.t_beta
            g[CURRENTS[turbine], VOLTAGES[turbine]] = machine.winding.inverse
        return g


def _evaluate_machine(
    x: np.ndarray,
    turbine: int,
    t: float,
    fault: FaultSpec | None,
    env: PlantEnvironment,
    params: PlantParams,
) -> MachineEvaluation:
    mu_bar, phase = severity(fault, turbine, t)
    machine = params.machine
    currents = x[CURRENTS[turbine]]
    omega = float(x[OMEGA[turbine]])
    theta_e = float(x[THETA[turbine]])
    beta = float(x[BETA[turbine]])

    winding = winding_model(theta_e, machine, mu_bar, phase)
    park = park_transform(theta_e)
    dqh = park @ currents
    gamma_em = winding.torque(currents, machine.p)
    free_rate = -(winding.inverse @ winding.flux_rate_terms(currents, omega, machine.p))
    loads = rotor_loads(
        env.wind, float(x[PSI]), omega, beta, params.aero, params.drag, params.cp
    )
    return MachineEvaluation(
        turbine=turbine,
        mu_bar=mu_bar,
        currents=currents,
        omega=omega,
        theta_e=theta_e,
        beta=beta,
        winding=winding,
        park=park,
        dqh=dqh,
        gamma_em=gamma_em,
        loads=loads,
        free_current_rate=free_rate,
        omega_rate=rotor_acceleration(loads.torque, gamma_em, omega, machine),
    )


def evaluate_plant(
    x: PlantState | np.ndarray,
    t: float,
    fault: FaultSpec | None,
    env: PlantEnvironment,
    params: PlantParams,
) -> PlantEvaluation:
    """Shared evaluation behind the drift, the input matrix and the control laws.

    ``fault`` is applied to its turbine from ``fault.t_on`` on; ``None`` means
    both machines are healthy.
    """

    x = state_vector(x)
    machines = {
        turbine: _evaluate_machine(x, turbine, t, fault, env, params) for turbine in TURBINES
    }
    psi, psi_dot = float(x[PSI]), float(x[PSI_DOT])
    return PlantEvaluation(
        t=t,
        x=x,
        env=env,
        params=params,
        machines=machines,
        facing_rate=effective_wind_rate(env.wind, psi, psi_dot),
        psi_acceleration=yaw_acceleration(
            psi_dot, machines[1].loads.drag, machines[2].loads.drag, params.aero
        ),
    )


def drift_field(
    x: PlantState | np.ndarray,
    t: float,
    fault: FaultSpec | None,
    env: PlantEnvironment,
    params: PlantParams,
) -> np.ndarray:
    return evaluate_plant(x, t, fault, env, params).drift()


def input_matrix(
    x: PlantState | np.ndarray,
    t: float,
    fault: FaultSpec | None,
    params: PlantParams,
) -> np.ndarray:
    """g_μ̄(x, t); only the inductance blocks depend on the state."""

    x = state_vector(x)
    g = np.zeros((STATE_SIZE, INPUT_SIZE))
    for turbine in TURBINES:
        mu_bar, phase = severity(fault, turbine, t)
        winding = winding_model(float(x[THETA[turbine]]), params.machine, mu_bar, phase)
        g[BETA[turbine], 0] = PITCH_SIGN[turbine] / params.aero.t_beta
        g[CURRENTS[turbine], VOLTAGES[turbine]] = winding.inverse
    return g


def full_derivative(
    x: PlantState | np.ndarray,
    u: PlantInput | np.ndarray,
    t: float,
    fault: FaultSpec | None,
    env: PlantEnvironment,
    params: PlantParams,
) -> np.ndarray:
    evaluation = evaluate_plant(x, t, fault, env, params)
    return evaluation.drift() + evaluation.input_matrix() @ input_vector(u)


__all__ = [
    'MachineEvaluation',
    'PlantEvaluation',
    'drift_field',
    'evaluate_plant',
    'full_derivative',
    'input_matrix',
    'input_vector',
    'severity',
    'state_vector',
]
