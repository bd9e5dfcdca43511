"""Closed-loop simulation: sampled control, fault scheduling and batch execution."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from applications.aero.models import WindInput, WindProfile
from applications.control.decoupling import outputs
from applications.control.laws import Controller, build_controller
from applications.control.models import References
from applications.core.constants import CURRENT_LIMIT_FLOOR, DIVERGENCE_FACTOR
from applications.core.exceptions import (
    DegenerateTipSpeed,
    DivergedState,
    SingularDecoupling,
    SingularInductance,
    SingularOrientation,
)
from applications.machine.models import FaultSpec
from applications.plant.dynamics import PlantEvaluation, evaluate_plant, full_derivative
from applications.plant.models import (
    CURRENTS,
    INPUT_SIZE,
    STATE_SIZE,
    TURBINES,
    PlantEnvironment,
    PlantParams,
    PlantState,
)
from applications.plant.operating import phase_current_peak, steady_state

from .integrator import stepper
from .metrics import extract_metrics
from .models import (
    DERIVED_FIELDS,
    OUTPUT_COLUMNS,
    IntegratorConfig,
    RunMetrics,
    Termination,
    TimeSeries,
)
from .wind import build_wind_profile

if TYPE_CHECKING:
    from applications.scenarios.models import ScenarioConfig

logger = logging.getLogger(__name__)

SINGULARITIES = (SingularDecoupling, SingularInductance, SingularOrientation, DegenerateTipSpeed)


def active_fault(fault: FaultSpec | None, t: float) -> FaultSpec | None:
    """The fault applied over the step starting at ``t``: switched on at grid points only."""

    if fault is not None and fault.is_active(t):
        return fault
    return None


def current_limit(x0: np.ndarray, factor: float = DIVERGENCE_FACTOR) -> float:
    state = PlantState(x0)
    peak = max(phase_current_peak(state, turbine) for turbine in TURBINES)
    return max(factor * peak, CURRENT_LIMIT_FLOOR)


def check_state(x: np.ndarray, t: float, limit: float) -> None:
    if not np.all(np.isfinite(x)):
        raise DivergedState(t, 'non-finite state')
    peak = max(float(np.max(np.abs(x[CURRENTS[turbine]]))) for turbine in TURBINES)
    if peak > limit:
        raise DivergedState(t, f'phase current {peak:.4g} A above the {limit:.4g} A limit')


def references_at(
    wind: WindInput,
    omega_refs: tuple[float, float],
    beta_ref: float,
    alpha_ref: float | None = None,
) -> References:
    """Yaw follows the wind direction unless a fixed heading is requested."""

    if alpha_ref is None:
        alpha, alpha_dot = wind.alpha, wind.alpha_dot
    else:
        alpha, alpha_dot = alpha_ref, 0.0
    return References(
        alpha=alpha,
        omega_ref_1=omega_refs[0],
        omega_ref_2=omega_refs[1],
        beta_ref=beta_ref,
        alpha_dot=alpha_dot,
    )


def sample_control(
    controller: Controller,
    x: np.ndarray,
    t: float,
    held: np.ndarray | None,
    *,
    lead: float,
    fault: FaultSpec | None,
    params: PlantParams,
    wind: WindProfile,
    omega_refs: tuple[float, float],
    beta_ref: float,
    alpha_ref: float | None = None,
) -> np.ndarray:
    """Control input held from ``t``, sampled at the state predicted ``lead`` seconds ahead.

    The prediction is one Euler step with the previous held input.
    ``lead=0`` samples the law at (x, t).
    """

    env = PlantEnvironment(wind=wind(t), beta_ref=beta_ref)
    refs = references_at(env.wind, omega_refs, beta_ref, alpha_ref)
    if lead <= 0.0:
        return controller(x, t, env, refs).vector
    if held is None:
        held = controller(x, t, env, refs).vector
    x_ahead = x + lead * full_derivative(x, held, t, fault, env, params)
    env_ahead = PlantEnvironment(wind=wind(t + lead), beta_ref=beta_ref)
    refs_ahead = references_at(env_ahead.wind, omega_refs, beta_ref, alpha_ref)
    return controller(x_ahead, t + lead, env_ahead, refs_ahead).vector


def derived_row(evaluation: PlantEvaluation) -> list[float]:
    machines = evaluation.machines
    row = [float(value) for turbine in TURBINES for value in machines[turbine].dqh]
    row += [float(machines[turbine].gamma_em) for turbine in TURBINES]
    row += [float(machines[turbine].loads.torque) for turbine in TURBINES]
    row += [float(machines[turbine].loads.drag) for turbine in TURBINES]
    return row


@dataclass(slots=True)
class _Recorder:
    t: list[float] = field(default_factory=list)
    states: list[np.ndarray] = field(default_factory=list)
    inputs: list[np.ndarray] = field(default_factory=list)
    outputs: list[np.ndarray] = field(default_factory=list)
    derived: list[list[float]] = field(default_factory=list)

    def append(self, t, x, u, y, evaluation) -> None:
        self.t.append(t)
        self.states.append(np.array(x))
        self.inputs.append(np.array(u))
        self.outputs.append(y)
        self.derived.append(derived_row(evaluation))

    def series(self, **extra) -> TimeSeries:
        def block(rows, width):
            return np.array(rows, dtype=float).reshape(len(self.t), width)

        return TimeSeries(
            t=np.array(self.t, dtype=float),
            states=block(self.states, STATE_SIZE),
            inputs=block(self.inputs, INPUT_SIZE),
            outputs=block(self.outputs, len(OUTPUT_COLUMNS)),
            derived=block(self.derived, len(DERIVED_FIELDS)),
            **extra,
        )


def simulate(
    x0: PlantState | np.ndarray,
    *,
    params: PlantParams,
    controller: Controller,
    wind: WindProfile,
    omega_refs: tuple[float, float],
    beta_ref: float,
    integrator: IntegratorConfig,
    fault: FaultSpec | None = None,
    alpha_ref: float | None = None,
    limit: float | None = None,
    label: str = '',
) -> TimeSeries:
    """Integrate the closed loop on t_n = n·dt with a zero-order-held control input.

    With ``integrator.predictive_hold`` the law is sampled half a hold period
    ahead of the grid point it is applied from.

    A divergence or a singular model stops the run; the samples recorded so
    far are returned with the termination reason.
    """

    x = np.array(x0.vector if isinstance(x0, PlantState) else x0, dtype=float)
    limit = current_limit(x) if limit is None else limit
    step = stepper(integrator.method)
    hold, steps, dt = integrator.hold_steps, integrator.steps, integrator.dt
    lead = 0.5 * hold * dt if integrator.predictive_hold else 0.0
    recorder = _Recorder()
    termination, terminated_at, reason = Termination.COMPLETED, None, ''
    u = None
    faulted = False

    logger.info(
        'run %s: %s control, %d steps of %g s (%s)',
        label or '-',
        getattr(controller, 'mode', 'custom'),
        steps,
        dt,
        integrator.method,
    )
    for n in range(steps + 1):
        t = integrator.time(n)
        fault_now = active_fault(fault, t)
        if fault_now is not None and not faulted:
            faulted = True
            logger.info(
                'run %s: fault mu=%g on turbine %d phase %s from t=%g s',
                label or '-',
                fault_now.mu_bar,
                fault_now.turbine,
                fault_now.phase,
                t,
            )
        env = PlantEnvironment(wind=wind(t), beta_ref=beta_ref)
        refs = references_at(env.wind, omega_refs, beta_ref, alpha_ref)
        try:
            if u is None or n % hold == 0:
                u = sample_control(
                    controller,
                    x,
                    t,
                    u,
                    lead=lead,
                    fault=fault_now,
                    params=params,
                    wind=wind,
                    omega_refs=omega_refs,
                    beta_ref=beta_ref,
                    alpha_ref=alpha_ref,
                )
            evaluation = evaluate_plant(x, t, fault_now, env, params)
            recorder.append(t, x, u, outputs(x, refs).as_array(), evaluation)
            if n == steps:
                break

            def vector_field(time, state, u=u, fault_now=fault_now):
                environment = PlantEnvironment(wind=wind(time), beta_ref=beta_ref)
                return full_derivative(state, u, time, fault_now, environment, params)

            x_next = step(vector_field, t, x, dt)
            check_state(x_next, integrator.time(n + 1), limit)
        except DivergedState as exc:
            termination, terminated_at, reason = Termination.DIVERGED, exc.time, exc.reason
            logger.warning('run %s: %s', label or '-', exc)
            break
        except SINGULARITIES as exc:
            termination, terminated_at, reason = Termination.SINGULAR, t, str(exc)
            logger.warning('run %s stopped at t=%g s: %s', label or '-', t, exc)
            break
        x = x_next

    series = recorder.series(
        termination=termination,
        terminated_at=terminated_at,
        reason=reason,
        meta={
            'scenario_id': label,
            'method': str(integrator.method),
            'dt': dt,
            'current_limit': limit,
        },
    )
    logger.info('run %s: %s after %d samples', label or '-', termination, len(series))
    return series


def initial_state(scenario: ScenarioConfig) -> PlantState:
    if scenario.initial is not None:
        return scenario.initial
    wind = build_wind_profile(scenario.wind)(0.0)
    return steady_state(scenario.params, wind, scenario.omega_refs, scenario.beta_ref)


def integrate(scenario: ScenarioConfig) -> TimeSeries:
    """Deterministic trajectory of one scenario; same config, same bits."""

    x0 = initial_state(scenario)
    return simulate(
        x0,
        params=scenario.params,
        controller=build_controller(scenario.control, scenario.params, scenario.fault),
        wind=build_wind_profile(scenario.wind),
        omega_refs=scenario.omega_refs,
        beta_ref=scenario.beta_ref,
        integrator=scenario.integrator,
        fault=scenario.fault,
        alpha_ref=scenario.alpha_ref,
        label=scenario.scenario_id,
    )


@dataclass(frozen=True, slots=True)
class ScenarioOutcome:
    scenario: ScenarioConfig
    series: TimeSeries
    metrics: RunMetrics

    @property
    def scenario_id(self) -> str:
        return self.scenario.scenario_id


def execute_scenario(scenario: ScenarioConfig) -> ScenarioOutcome:
    series = integrate(scenario)
    metrics = extract_metrics(series, scenario.metrics_window, scenario.thresholds)
    return ScenarioOutcome(scenario, series, metrics)


def run_batch(scenarios: Sequence[ScenarioConfig], workers: int = 1) -> list[ScenarioOutcome]:
    """Run independent scenarios, in parallel when ``workers`` > 1, ordered by scenario id."""

    ids = [scenario.scenario_id for scenario in scenarios]
    if len(set(ids)) != len(ids):
        raise ValueError(f'scenario ids must be unique, got {ids}')
    if workers <= 1 or len(scenarios) <= 1:
        outcomes = [execute_scenario(scenario) for scenario in scenarios]
    else:
        logger.info('running %d scenarios on %d workers', len(scenarios), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(execute_scenario, scenarios))
    return sorted(outcomes, key=lambda outcome: outcome.scenario_id)


__all__ = [
    'ScenarioOutcome',
    'active_fault',
    'check_state',
    'current_limit',
    'execute_scenario',
    'initial_state',
    'integrate',
    'references_at',
    'run_batch',
    'sample_control',
    'simulate',
]
