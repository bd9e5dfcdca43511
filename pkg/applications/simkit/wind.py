"""Wind speed and direction profiles with analytic time derivatives."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, fields
from typing import Any

import numpy as np

from applications.aero.models import WindInput, WindProfile

from .models import WindProfileKind, WindProfileSpec


@dataclass(frozen=True, slots=True)
class ConstantWind:
    vv: float
    alpha: float

    def __call__(self, t: float) -> WindInput:
        return WindInput(vv=self.vv, alpha=self.alpha)


@dataclass(frozen=True, slots=True)
class StepWind:
    """Jump from (vv, alpha) to (vv_after, alpha_after) at t_switch; rates are zero."""

    vv: float
    alpha: float
    t_switch: float
    vv_after: float
    alpha_after: float

    def __call__(self, t: float) -> WindInput:
        if t >= self.t_switch:
            return WindInput(vv=self.vv_after, alpha=self.alpha_after)
        return WindInput(vv=self.vv, alpha=self.alpha)


@dataclass(frozen=True, slots=True)
class RampWind:
    vv: float
    alpha: float
    t_switch: float
    duration: float
    vv_after: float
    alpha_after: float

    def __call__(self, t: float) -> WindInput:
        if t < self.t_switch:
            return WindInput(vv=self.vv, alpha=self.alpha)
        if t >= self.t_switch + self.duration:
            return WindInput(vv=self.vv_after, alpha=self.alpha_after)
        share = (t - self.t_switch) / self.duration
        vv_rate = (self.vv_after - self.vv) / self.duration
        alpha_rate = (self.alpha_after - self.alpha) / self.duration
        return WindInput(
            vv=self.vv + share * (self.vv_after - self.vv),
            alpha=self.alpha + share * (self.alpha_after - self.alpha),
            vv_dot=vv_rate,
            alpha_dot=alpha_rate,
        )


@dataclass(frozen=True, slots=True)
class TurbulentWind:
    """Mean speed plus a seeded sum of sinusoids with standard deviation intensity·vv.

    The direction stays constant; a negative instantaneous speed is clipped to zero.
    """

    vv: float
    alpha: float
    amplitudes: np.ndarray
    frequencies: np.ndarray
    phases: np.ndarray

    @classmethod
    def seeded(
        cls,
        vv: float,
        alpha: float,
        *,
        intensity: float,
        components: int,
        f_min: float,
        f_max: float,
        seed: int,
    ) -> TurbulentWind:
        rng = np.random.default_rng(seed)
        frequencies = rng.uniform(f_min, f_max, components)
        phases = rng.uniform(0.0, 2.0 * math.pi, components)
        amplitudes = np.full(components, intensity * vv * math.sqrt(2.0 / components))
        return cls(vv, alpha, amplitudes, frequencies, phases)

    def __call__(self, t: float) -> WindInput:
        angular = 2.0 * math.pi * self.frequencies
        arguments = angular * t + self.phases
        vv = self.vv + float(np.sum(self.amplitudes * np.sin(arguments)))
        if vv <= 0.0:
            return WindInput(vv=0.0, alpha=self.alpha)
        rate = float(np.sum(self.amplitudes * angular * np.cos(arguments)))
        return WindInput(vv=vv, alpha=self.alpha, vv_dot=rate)


def build_wind_profile(spec: WindProfileSpec) -> WindProfile:
    kind = WindProfileKind(spec.kind)
    if kind == WindProfileKind.STEP:
        return StepWind(spec.vv, spec.alpha, spec.t_switch, spec.final_vv, spec.final_alpha)
    if kind == WindProfileKind.RAMP:
        return RampWind(
            spec.vv, spec.alpha, spec.t_switch, spec.duration, spec.final_vv, spec.final_alpha
        )
    if kind == WindProfileKind.TURBULENCE:
        return TurbulentWind.seeded(
            spec.vv,
            spec.alpha,
            intensity=spec.intensity,
            components=spec.components,
            f_min=spec.f_min,
            f_max=spec.f_max,
            seed=spec.seed,
        )
    return ConstantWind(spec.vv, spec.alpha)


def wind_profile(kind: str, params: Mapping[str, Any], t: float) -> WindInput:
    """Sample the profile ``kind`` built from ``params`` at time ``t``."""

    known = {item.name for item in fields(WindProfileSpec)} - {'kind'}
    unknown = set(params) - known
    if unknown:
        raise ValueError(f'unknown wind profile parameters: {sorted(unknown)}')
    return build_wind_profile(WindProfileSpec(kind=kind, **params))(t)


__all__ = [
    'ConstantWind',
    'RampWind',
    'StepWind',
    'TurbulentWind',
    'build_wind_profile',
    'wind_profile',
]
