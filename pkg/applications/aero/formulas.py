"""Aerodynamic power, torque and drag of each rotor and the yaw/pitch dynamics."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from applications.core.constants import BETZ_LIMIT, ORIENTATION_FLOOR, TIP_SPEED_FLOOR
from applications.core.exceptions import DegenerateTipSpeed, SingularOrientation

from .models import AeroParams, CdPolynomial, CpParameters, WindInput

DEGREES_PER_RADIAN = 180.0 / math.pi
# Largest representable Cp strictly below the Betz limit.
CP_CEILING = math.nextafter(BETZ_LIMIT, 0.0)


def effective_wind(wind: WindInput, psi: float) -> float:
    """Wind speed component facing the rotor plane, V_v·cos(ψ−α)."""

    return wind.vv * math.cos(psi - wind.alpha)


def effective_wind_rate(wind: WindInput, psi: float, psi_dot: float) -> float:
    angle = psi - wind.alpha
    return wind.vv_dot * math.cos(angle) - wind.vv * math.sin(angle) * (psi_dot - wind.alpha_dot)


def tip_speed_ratio(rp: float, omega: float, vv: float, psi: float, alpha: float) -> float:
    facing = vv * math.cos(psi - alpha)
    if abs(facing) < ORIENTATION_FLOOR:
        raise SingularOrientation(
            f'effective wind speed {facing:.3e} m/s is below {ORIENTATION_FLOOR:.0e} m/s'
        )
    return rp * omega / facing


def _horner(coefficients: Sequence[float], x: float) -> float:
    value = 0.0
    for coefficient in reversed(coefficients):
        value = value * x + coefficient
    return value


def _horner_derivative(coefficients: Sequence[float], x: float) -> float:
    value = 0.0
    for power in range(len(coefficients) - 1, 0, -1):
        value = value * x + power * coefficients[power]
    return value


def drag_coefficient(lam: float, beta: float, poly: CdPolynomial | None = None) -> float:
    poly = poly or CdPolynomial()
    return _horner(poly.a, lam) + _horner(poly.b, lam) * beta


def drag_coefficient_partials(
    lam: float, beta: float, poly: CdPolynomial | None = None
) -> tuple[float, float]:
    """Return (∂Cd/∂λ, ∂Cd/∂β) = (A'(λ) + B'(λ)·β, B(λ))."""

    poly = poly or CdPolynomial()
    d_lam = _horner_derivative(poly.a, lam) + _horner_derivative(poly.b, lam) * beta
    return d_lam, _horner(poly.b, lam)


def drag_force(wind: WindInput, psi: float, cd: float, params: AeroParams) -> float:
    facing = effective_wind(wind, psi)
    return params.swept_factor * cd * facing**2


def mechanical_power(wind: WindInput, psi: float, cp: float, params: AeroParams) -> float:
    facing = effective_wind(wind, psi)
    return params.swept_factor * cp * facing**3


def aerodynamic_torque(
    wind: WindInput,
    psi: float,
    lam: float,
    cp: float,
    params: AeroParams,
    *,
    clamp: bool = False,
) -> float:
    """Rotor torque P/Ω written in terms of λ.

    With ``clamp`` the tip speed ratio is floored instead of rejected, which
    is what the plant needs around standstill.
    """

    if lam < TIP_SPEED_FLOOR:
        if not clamp:
            raise DegenerateTipSpeed(f'tip speed ratio {lam:.3e} is below {TIP_SPEED_FLOOR:.0e}')
        lam = TIP_SPEED_FLOOR
    facing = effective_wind(wind, psi)
    return params.swept_factor * params.rp * cp * facing**2 / lam


@dataclass(frozen=True, slots=True)
class CpEvaluation:
    value: float
    d_lam: float
    d_beta: float


def evaluate_power_coefficient(
    lam: float, beta: float, cp: CpParameters | None = None
) -> CpEvaluation:
    """Cp and its partial derivatives in λ and β (β in radians).

    The surface is defined for feathering only: pitch below zero evaluates as
    zero with ∂Cp/∂β = 0, and at β = 0 the one-sided (feathering) partial is
    returned. Values are clipped into [0, 16/27) with both partials 0.
    """

    cp = cp or CpParameters()
    if lam <= 0.0:
        return CpEvaluation(0.0, 0.0, 0.0)

    beta_deg = max(beta * DEGREES_PER_RADIAN, 0.0)
    beta_scale = DEGREES_PER_RADIAN if beta >= 0.0 else 0.0
    shifted = lam + 0.08 * beta_deg
    cubic = beta_deg**3 + 1.0
    inverse_lambda_i = 1.0 / shifted - 0.035 / cubic
    shape = cp.c2 * inverse_lambda_i - cp.c3 * beta_deg - cp.c4
    decay = math.exp(-cp.c5 * inverse_lambda_i)
    value = cp.c1 * shape * decay + cp.c6 * lam
    if value <= 0.0:
        return CpEvaluation(0.0, 0.0, 0.0)
    if value >= CP_CEILING:
        return CpEvaluation(CP_CEILING, 0.0, 0.0)

    d_inverse = cp.c1 * decay * (cp.c2 - cp.c5 * shape)
    d_lam = -d_inverse / shifted**2 + cp.c6
    d_beta_deg = d_inverse * (-0.08 / shifted**2 + 0.105 * beta_deg**2 / cubic**2)
    d_beta_deg -= cp.c1 * cp.c3 * decay
    return CpEvaluation(value, d_lam, d_beta_deg * beta_scale)


def power_coefficient(lam: float, beta: float, cp: CpParameters | None = None) -> float:
    return evaluate_power_coefficient(lam, beta, cp).value


def optimal_tip_speed_ratio(
    cp: CpParameters | None = None, beta: float = 0.0, upper: float = 15.0
) -> tuple[float, float]:
    """Locate argmax_λ Cp(λ, β) by a coarse grid followed by a local refinement."""

    coarse = np.linspace(0.01, upper, 1500)
    values = np.array([power_coefficient(float(lam), beta, cp) for lam in coarse])
    best = int(np.argmax(values))
    step = coarse[1] - coarse[0]
    fine = np.linspace(max(coarse[best] - step, 0.01), min(coarse[best] + step, upper), 401)
    fine_values = np.array([power_coefficient(float(lam), beta, cp) for lam in fine])
    best_fine = int(np.argmax(fine_values))
    return float(fine[best_fine]), float(fine_values[best_fine])


def yaw_acceleration(psi_dot: float, f1: float, f2: float, params: AeroParams) -> float:
    return (-params.fr * psi_dot + (f1 - f2) * params.lever) / params.dr


def pitch_dynamics(
    beta_i: float, beta_ref: float, delta_beta: float, t_beta: float, sign: int
) -> float:
    """First-order pitch actuator; turbine 1 takes +Δβ, turbine 2 takes −Δβ."""

    return (beta_ref + sign * delta_beta - beta_i) / t_beta


@dataclass(frozen=True, slots=True)
class RotorLoads:
    facing: float
    lam: float
    lam_clamped: bool
    cp: CpEvaluation
    cd: float
    torque: float
    drag: float

    @property
    def calm(self) -> bool:
        return abs(self.facing) < ORIENTATION_FLOOR


CALM_CP = CpEvaluation(0.0, 0.0, 0.0)


def rotor_loads(
    wind: WindInput,
    psi: float,
    omega: float,
    beta: float,
    params: AeroParams,
    poly: CdPolynomial,
    cp_params: CpParameters,
) -> RotorLoads:
    """Torque and drag of one rotor; a calm (or side-on) wind produces no load."""

    facing = effective_wind(wind, psi)
    if abs(facing) < ORIENTATION_FLOOR:
        return RotorLoads(facing, 0.0, True, CALM_CP, 0.0, 0.0, 0.0)

    lam = tip_speed_ratio(params.rp, omega, wind.vv, psi, wind.alpha)
    lam_clamped = lam < TIP_SPEED_FLOOR
    cp = evaluate_power_coefficient(lam, beta, cp_params)
    cd = drag_coefficient(lam, beta, poly)
    torque = aerodynamic_torque(wind, psi, lam, cp.value, params, clamp=True)
    return RotorLoads(
        facing=facing,
        lam=lam,
        lam_clamped=lam_clamped,
        cp=cp,
        cd=cd,
        torque=torque,
        drag=drag_force(wind, psi, cd, params),
    )


__all__ = [
    'CP_CEILING',
    'CpEvaluation',
    'RotorLoads',
    'aerodynamic_torque',
    'drag_coefficient',
    'drag_coefficient_partials',
    'drag_force',
    'effective_wind',
    'effective_wind_rate',
    'evaluate_power_coefficient',
    'mechanical_power',
    'optimal_tip_speed_ratio',
    'pitch_dynamics',
    'power_coefficient',
    'rotor_loads',
    'tip_speed_ratio',
    'yaw_acceleration',
]
