"""Power-invariant Park transform between abc and (d, q, homopolar) coordinates."""

from __future__ import annotations

import numpy as np

from applications.core.constants import SQRT_ONE_THIRD, SQRT_TWO_THIRDS, TWO_PI_OVER_THREE

PHASE_OFFSETS = np.array([0.0, -TWO_PI_OVER_THREE, TWO_PI_OVER_THREE])


def park_transform(theta_e: float) -> np.ndarray:
    """Orthonormal Park matrix P(θ_e); rows are d, q and homopolar."""

    angles = theta_e + PHASE_OFFSETS
    return np.array(
        [
            SQRT_TWO_THIRDS * np.cos(angles),
            -SQRT_TWO_THIRDS * np.sin(angles),
            np.full(3, SQRT_ONE_THIRD),
        ]
    )


def park_transform_derivative(theta_e: float) -> np.ndarray:
    """∂P/∂θ_e; the homopolar row does not depend on the angle."""

    angles = theta_e + PHASE_OFFSETS
    return np.array(
        [
            -SQRT_TWO_THIRDS * np.sin(angles),
            -SQRT_TWO_THIRDS * np.cos(angles),
            np.zeros(3),
        ]
    )


def dq_currents(currents: np.ndarray, theta_e: float) -> tuple[float, float, float]:
    i_d, i_q, i_h = park_transform(theta_e) @ np.asarray(currents, dtype=float)
    return float(i_d), float(i_q), float(i_h)


def homopolar_current(currents: np.ndarray) -> float:
    return SQRT_ONE_THIRD * float(np.sum(currents))


def inverse_park(dqh: np.ndarray, theta_e: float) -> np.ndarray:
    """Map (d, q, h) components back to abc; Pᵀ is the inverse."""

    return park_transform(theta_e).T @ np.asarray(dqh, dtype=float)


__all__ = [
    'PHASE_OFFSETS',
    'dq_currents',
    'homopolar_current',
    'inverse_park',
    'park_transform',
    'park_transform_derivative',
]
