"""Fixed-step explicit integrators for ẋ = F(t, x)."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from .models import IntegrationMethod

VectorField = Callable[[float, np.ndarray], np.ndarray]


def euler_step(field: VectorField, t: float, x: np.ndarray, dt: float) -> np.ndarray:
    return x + dt * field(t, x)


def rk4_step(field: VectorField, t: float, x: np.ndarray, dt: float) -> np.ndarray:
    half = 0.5 * dt
    k1 = field(t, x)
    k2 = field(t + half, x + half * k1)
    k3 = field(t + half, x + half * k2)
    k4 = field(t + dt, x + dt * k3)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


STEPPERS: dict[str, Callable[[VectorField, float, np.ndarray, float], np.ndarray]] = {
    IntegrationMethod.RK4: rk4_step,
    IntegrationMethod.EULER: euler_step,
}


def stepper(method: str):
    return STEPPERS[IntegrationMethod(method)]


def integrate_field(
    field: VectorField, x0: np.ndarray, dt: float, steps: int, method: str = IntegrationMethod.RK4
) -> np.ndarray:
    """Trajectory of an autonomous-or-not field on the grid t_n = n·dt, x0 included."""

    step = stepper(method)
    trajectory = np.empty((steps + 1, len(x0)))
    trajectory[0] = x0
    for n in range(steps):
        trajectory[n + 1] = step(field, n * dt, trajectory[n], dt)
    return trajectory


__all__ = ['STEPPERS', 'VectorField', 'euler_step', 'integrate_field', 'rk4_step', 'stepper']
