"""Sliding surfaces and the homogeneous stabilizer feeding the linearized channels."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .models import ControllerGains


def sliding_variable(chain: Sequence[float], coefficients: Sequence[float]) -> float:
    """σ = y^(ε−1) + c_{ε−2}·y^(ε−2) + … + c_0·y."""

    *lower, top = chain
    if len(lower) != len(coefficients):
        raise ValueError(
            f'chain of order {len(chain)} needs {len(chain) - 1} surface coefficients'
        )
    return float(top + sum(c * value for c, value in zip(coefficients, lower, strict=True)))


def sliding_variables(
    chains: Sequence[Sequence[float]], gains: ControllerGains
) -> np.ndarray:
    return np.array([sliding_variable(chain, gains.surface(len(chain))) for chain in chains])


def homogeneity_exponent(z_window: Sequence[float], delta: float, eps: float) -> float:
    """μ = max(1 − δ·Σ|z_l| / (|z_l| + ε), 0)."""

    magnitudes = np.abs(np.asarray(z_window, dtype=float))
    saturation = float(np.sum(magnitudes / (magnitudes + eps)))
    return max(1.0 - delta * saturation, 0.0)


def exponents(
    chains: Sequence[Sequence[float]], gains: ControllerGains, channels: Sequence[int]
) -> np.ndarray:
    """One exponent per channel, each computed over the channel's own chain."""

    return np.array(
        [
            homogeneity_exponent(chain, gains.delta, gains.eps[channel])
            for chain, channel in zip(chains, channels, strict=True)
        ]
    )


def stabilizer(
    sigma: Sequence[float], exponents: Sequence[float], gains: ControllerGains | Sequence[float]
) -> np.ndarray:
    """z̄_i = −K_i·|σ_i|^μ_i·sign(σ_i)."""

    k = gains.k_vector if isinstance(gains, ControllerGains) else np.asarray(gains, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    return -k * np.abs(sigma) ** np.asarray(exponents, dtype=float) * np.sign(sigma)


__all__ = [
    'exponents',
    'homogeneity_exponent',
    'sliding_variable',
    'sliding_variables',
    'stabilizer',
]
