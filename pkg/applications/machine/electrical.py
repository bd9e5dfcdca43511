"""abc-frame electrical model of a salient PMSM, healthy or with an inter-turn short circuit.

The fault is the reduced-order (1 − μ̄) scaling of the faulted phase: its
resistance, its EMF, and its row and column of the inductance matrix (the
diagonal entry is scaled once). No separate short-circuit loop current is
carried.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from applications.core.constants import INDUCTANCE_CONDITION_LIMIT
from applications.core.exceptions import InvalidSeverity, SingularInductance
from applications.core.numerics import guarded_inverse

from .models import ElectricalState, FaultPhase, FaultSpec, MachineParams
from .park import PHASE_OFFSETS

PAIR_OFFSETS = PHASE_OFFSETS[:, None] + PHASE_OFFSETS[None, :]
MUTUAL_PATTERN = np.ones((3, 3)) - np.eye(3)


def _check_severity(mu_bar: float) -> None:
    if not 0.0 <= mu_bar < 1.0:
        raise InvalidSeverity(f'severity {mu_bar!r} is outside [0, 1)')


def fault_scaling(mu_bar: float, phase_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Return the per-phase scale vector and the matching inductance mask."""

    _check_severity(mu_bar)
    scale = np.ones(3)
    scale[phase_index] = 1.0 - mu_bar
    mask = np.outer(scale, scale)
    mask[phase_index, phase_index] = scale[phase_index]
    return scale, mask


def inductance_matrix(theta_e: float, params: MachineParams) -> np.ndarray:
    """Salient two-harmonic profile; P(θ)·L(θ)·P(θ)ᵀ = diag(L_d, L_q, L_0)."""

    constant = params.ls0 * np.eye(3) - params.ms0 * MUTUAL_PATTERN
    return constant + params.ls2 * np.cos(2.0 * theta_e + PAIR_OFFSETS)


def inductance_derivative(theta_e: float, params: MachineParams) -> np.ndarray:
    """∂L/∂θ_e; dL/dt is p·Ω times this."""

    return -2.0 * params.ls2 * np.sin(2.0 * theta_e + PAIR_OFFSETS)


def inductance_curvature(theta_e: float, params: MachineParams) -> np.ndarray:
    return -4.0 * params.ls2 * np.cos(2.0 * theta_e + PAIR_OFFSETS)


def fault_inductance_matrix(
    theta_e: float, mu_bar: float, faulted_phase: str, params: MachineParams
) -> np.ndarray:
    _, mask = fault_scaling(mu_bar, FaultPhase(faulted_phase).index)
    return mask * inductance_matrix(theta_e, params)


def emf_vector(theta_e: float, params: MachineParams) -> np.ndarray:
    return params.phi_f * np.cos(theta_e + PHASE_OFFSETS)


def emf_rate(theta_e: float, omega: float, params: MachineParams) -> np.ndarray:
    """dE_m/dt along θ̇_e = p·Ω."""

    return -params.p * omega * params.phi_f * np.sin(theta_e + PHASE_OFFSETS)


@dataclass(frozen=True, slots=True)
class WindingModel:
    """Effective electrical matrices of one machine at one electrical angle."""

    inductance: np.ndarray
    inverse: np.ndarray
    d_inductance: np.ndarray
    resistance: np.ndarray
    emf_gradient: np.ndarray
    d2_inductance: np.ndarray
    emf_curvature: np.ndarray

    def flux_rate_terms(self, currents: np.ndarray, omega: float, p: int) -> np.ndarray:
        """R·I + (dL/dt)·I + dE/dt, everything the voltage has to overcome."""

        speed = p * omega
        return (
            self.resistance * currents
            + speed * (self.d_inductance @ currents)
            + speed * self.emf_gradient
        )

    def torque(self, currents: np.ndarray, p: int) -> float:
        """Γ_em = −p·(∂E/∂θ_eᵀ·I + ½·Iᵀ·∂L/∂θ_e·I).

        The torque the stator opposes to the rotor; Γ_em·Ω is the power the
        windings draw from the shaft. Holds for the faulted windings too.
        """

        return -p * float(
            self.emf_gradient @ currents + 0.5 * currents @ self.d_inductance @ currents
        )

    def torque_gradient(self, currents: np.ndarray, p: int) -> np.ndarray:
        """∂Γ_em/∂I."""

        return -p * (self.emf_gradient + self.d_inductance @ currents)

    def torque_angle_sensitivity(self, currents: np.ndarray, p: int) -> float:
        """∂Γ_em/∂θ_e at fixed currents."""

        return -p * float(
            self.emf_curvature @ currents + 0.5 * currents @ self.d2_inductance @ currents
        )


def winding_model(
    theta_e: float,
    params: MachineParams,
    mu_bar: float = 0.0,
    faulted_phase: str = FaultPhase.B,
) -> WindingModel:
    scale, mask = fault_scaling(mu_bar, FaultPhase(faulted_phase).index)
    inductance = mask * inductance_matrix(theta_e, params)
    inverse = guarded_inverse(
        inductance,
        limit=INDUCTANCE_CONDITION_LIMIT,
        error=SingularInductance,
        label='stator inductance matrix',
    )
    return WindingModel(
        inductance=inductance,
        inverse=inverse,
        d_inductance=mask * inductance_derivative(theta_e, params),
        resistance=params.rs * scale,
        emf_gradient=-scale * params.phi_f * np.sin(theta_e + PHASE_OFFSETS),
        d2_inductance=mask * inductance_curvature(theta_e, params),
        emf_curvature=-scale * params.phi_f * np.cos(theta_e + PHASE_OFFSETS),
    )


def electrical_derivative(
    state: ElectricalState,
    voltages: np.ndarray,
    fault: FaultSpec | None,
    params: MachineParams,
) -> np.ndarray:
    """dI/dt = L⁻¹·(V − R·I − (dL/dt)·I − dE/dt).

    ``fault`` is taken as active; pass ``None`` for the healthy machine.
    """

    mu_bar, phase = (fault.mu_bar, fault.phase) if fault is not None else (0.0, FaultPhase.B)
    winding = winding_model(state.theta_e, params, mu_bar, phase)
    currents = np.asarray(state.currents, dtype=float)
    rhs = np.asarray(voltages, dtype=float) - winding.flux_rate_terms(
        currents, state.omega, params.p
    )
    return winding.inverse @ rhs


def electromagnetic_torque(i_d: float, i_q: float, params: MachineParams) -> float:
    """Healthy-machine torque in (d, q): −p·((L_d − L_q)·i_d + √(3/2)·φ_f)·i_q.

    Same value as ``WindingModel.torque`` for the healthy windings. The
    stator currents are counted positive into the machine, so a generating
    machine (positive Γ_em) runs with i_q < 0.
    """

    return -params.p * ((params.ld - params.lq) * i_d + params.dq_flux) * i_q


def rotor_acceleration(
    gamma_a: float, gamma_em: float, omega: float, params: MachineParams
) -> float:
    return (gamma_a - gamma_em - params.fv * omega) / params.j


__all__ = [
    'WindingModel',
    'electrical_derivative',
    'electromagnetic_torque',
    'emf_rate',
    'emf_vector',
    'fault_inductance_matrix',
    'fault_scaling',
    'inductance_curvature',
    'inductance_derivative',
    'inductance_matrix',
    'rotor_acceleration',
    'winding_model',
]
