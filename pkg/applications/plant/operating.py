"""Healthy operating point used as the default initial condition."""

from __future__ import annotations

import numpy as np

from applications.aero.formulas import rotor_loads
from applications.aero.models import WindInput
from applications.core.constants import SQRT_TWO_THIRDS
from applications.machine.park import inverse_park

from .models import (
    BETA,
    CURRENTS,
    OMEGA,
    PSI,
    STATE_SIZE,
    THETA,
    TURBINES,
    PlantParams,
    PlantState,
)


def steady_state(
    params: PlantParams,
    wind: WindInput,
    omega_refs: tuple[float, float],
    beta_ref: float,
    theta_e: float = 0.0,
) -> PlantState:
    """ψ = α, Ω_i = Ω_i^ref, β_i = β_ref, i_d = i_h = 0 and i_q balancing the rotor torque.

    A generating machine carries i_q < 0 with motor-convention stator currents.
    """

    machine = params.machine
    x = np.zeros(STATE_SIZE)
    x[PSI] = wind.alpha
    for turbine, omega in zip(TURBINES, omega_refs, strict=True):
        loads = rotor_loads(wind, wind.alpha, omega, beta_ref, params.aero, params.drag, params.cp)
        i_q = -(loads.torque - machine.fv * omega) / (machine.p * machine.dq_flux)
        x[BETA[turbine]] = beta_ref
        x[OMEGA[turbine]] = omega
        x[THETA[turbine]] = theta_e
        x[CURRENTS[turbine]] = inverse_park(np.array([0.0, i_q, 0.0]), theta_e)
    return PlantState(x)


def phase_current_peak(state: PlantState, turbine: int) -> float:
    """Amplitude of the balanced phase currents that carry the state's (i_d, i_q)."""

    currents = state.currents(turbine)
    balanced = currents - currents.mean()
    return SQRT_TWO_THIRDS * float(np.linalg.norm(balanced))


__all__ = ['phase_current_peak', 'steady_state']
