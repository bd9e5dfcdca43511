"""Validated scenario description and comparison report containers."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from applications.control.models import ControlLaw, ControlMode
from applications.core.constants import DEFAULT_BETA_REF, DEFAULT_THRESHOLDS
from applications.machine.models import FaultSpec
from applications.plant.models import PlantParams, PlantState
from applications.simkit.models import IntegratorConfig, RunMetrics, Termination, WindProfileSpec


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    """Everything one closed-loop run needs, already validated."""

    scenario_id: str
    params: PlantParams = field(default_factory=PlantParams)
    wind: WindProfileSpec = field(default_factory=WindProfileSpec)
    omega_refs: tuple[float, float] = (0.0, 0.0)
    beta_ref: float = DEFAULT_BETA_REF
    # None: the yaw reference follows the wind direction.
    alpha_ref: float | None = None
    control: ControlLaw = field(default_factory=ControlLaw)
    fault: FaultSpec | None = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    initial: PlantState | None = None
    metrics_window: tuple[float, float | None] | None = None
    thresholds: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    description: str = ''
    out_dir: Path | None = None
    plot: bool = False
    source: Path | None = None

    @property
    def mode(self) -> str:
        return self.control.mode

    @property
    def severity(self) -> float:
        return self.fault.mu_bar if self.fault is not None else 0.0

    def renamed(self, scenario_id: str) -> ScenarioConfig:
        return replace(self, scenario_id=scenario_id)

    def with_seed(self, seed: int) -> ScenarioConfig:
        return replace(self, wind=replace(self.wind, seed=seed))

    def with_dt(self, dt: float) -> ScenarioConfig:
        return replace(self, integrator=replace(self.integrator, dt=dt))

    def with_severity(self, mu_bar: float) -> ScenarioConfig:
        """Same scenario with the fault severity replaced; a missing fault uses the defaults."""

        fault = self.fault if self.fault is not None else FaultSpec(mu_bar=0.0)
        suffix = f'{self.mode}_mu{mu_bar:g}'
        return replace(
            self,
            scenario_id=f'{self.scenario_id}__{suffix}',
            fault=replace(fault, mu_bar=mu_bar),
        )

    def with_mode(self, mode: str) -> ScenarioConfig:
        return replace(self, control=ControlLaw(mode=ControlMode(mode), gains=self.control.gains))


@dataclass(frozen=True, slots=True)
class ReportRow:
    scenario_id: str
    mode: str
    severity: float
    metrics: RunMetrics
    passed: bool
    failures: tuple[str, ...]

    @property
    def completed(self) -> bool:
        return self.metrics.termination == Termination.COMPLETED


@dataclass(frozen=True, slots=True)
class ComparisonReport:
    """Side-by-side metrics of completed runs with their threshold verdicts."""

    rows: tuple[ReportRow, ...]

    def __post_init__(self) -> None:
        ids = [row.scenario_id for row in self.rows]
        if len(set(ids)) != len(ids):
            raise ValueError('report rows must have distinct scenario ids')

    @property
    def verdicts(self) -> tuple[bool, ...]:
        return tuple(row.passed for row in self.rows)

    def row(self, scenario_id: str) -> ReportRow:
        for row in self.rows:
            if row.scenario_id == scenario_id:
                return row
        raise KeyError(scenario_id)


@dataclass(frozen=True, slots=True)
class SweepResult:
    """Verdicts of one scenario swept over severities, per control mode."""

    severities: tuple[float, ...]
    report: ComparisonReport
    tolerated: dict[str, float | None]
    unstable: dict[str, float | None] = field(default_factory=dict)


__all__ = ['ComparisonReport', 'ReportRow', 'ScenarioConfig', 'SweepResult']
