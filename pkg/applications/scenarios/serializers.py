"""Serializers validating scenario files section by section."""

from __future__ import annotations

from pathlib import Path
from typing import Any

from rest_framework import serializers

from applications.aero.formulas import optimal_tip_speed_ratio
from applications.aero.models import AeroParams, CdPolynomial, CpParameters
from applications.control.models import ControlLaw, ControllerGains, ControlMode
from applications.core.constants import DEFAULT_BETA_REF, DEFAULT_THRESHOLDS
from applications.machine.models import FaultPhase, FaultSpec, MachineParams, Turbine
from applications.plant.models import STATE_FIELDS, PlantParams, PlantState
from applications.simkit.models import (
    IntegrationMethod,
    IntegratorConfig,
    WindProfileKind,
    WindProfileSpec,
)

from .models import ScenarioConfig


class StrictSerializer(serializers.Serializer):
    """Rejects keys the serializer does not declare."""

    def to_internal_value(self, data: Any) -> dict[str, Any]:
        unknown = sorted(set(data) - set(self.fields)) if isinstance(data, dict) else []
        errors = {key: ['Unknown key.'] for key in unknown}
        try:
            value = super().to_internal_value(data)
        except serializers.ValidationError as exc:
            if not errors or not isinstance(exc.detail, dict):
                raise
            raise serializers.ValidationError({**exc.detail, **errors}) from exc
        if errors:
            raise serializers.ValidationError(errors)
        return value


def _build(factory, attrs: dict[str, Any]):
    """Instantiate a domain value, turning its own checks into validation errors."""

    try:
        return factory(**attrs)
    except ValueError as exc:
        raise serializers.ValidationError(str(exc)) from exc


def optional_float(**kwargs) -> serializers.FloatField:
    return serializers.FloatField(required=False, **kwargs)


class AeroSerializer(StrictSerializer):
    rho = optional_float(min_value=0.0)
    rp = optional_float(min_value=0.0)
    dr = optional_float(min_value=0.0)
    fr = optional_float(min_value=0.0)
    lever = optional_float(min_value=0.0)
    t_beta = optional_float(min_value=0.0)

    def validate(self, attrs: dict[str, Any]) -> AeroParams:
        return _build(AeroParams, attrs)


class DragSerializer(StrictSerializer):
    a0 = serializers.FloatField(required=False)
    a1 = serializers.FloatField(required=False)
    a2 = serializers.FloatField(required=False)
    a3 = serializers.FloatField(required=False)
    b0 = serializers.FloatField(required=False)
    b1 = serializers.FloatField(required=False)
    b2 = serializers.FloatField(required=False)
    b3 = serializers.FloatField(required=False)

    def validate(self, attrs: dict[str, Any]) -> CdPolynomial:
        return _build(CdPolynomial, attrs)


class PowerCoefficientSerializer(StrictSerializer):
    c1 = serializers.FloatField(required=False)
    c2 = serializers.FloatField(required=False)
    c3 = serializers.FloatField(required=False)
    c4 = serializers.FloatField(required=False)
    c5 = serializers.FloatField(required=False)
    c6 = serializers.FloatField(required=False)

    def validate(self, attrs: dict[str, Any]) -> CpParameters:
        return _build(CpParameters, attrs)


class MachineSerializer(StrictSerializer):
    rs = optional_float(min_value=0.0)
    phi_f = optional_float(min_value=0.0)
    p = serializers.IntegerField(required=False, min_value=1)
    ld = optional_float(min_value=0.0)
    lq = optional_float(min_value=0.0)
    l0 = optional_float(min_value=0.0)
    j = optional_float(min_value=0.0)
    fv = optional_float(min_value=0.0)

    def validate(self, attrs: dict[str, Any]) -> MachineParams:
        return _build(MachineParams, attrs)


class PlantSerializer(StrictSerializer):
    aero = AeroSerializer(required=False)
    machine = MachineSerializer(required=False)
    drag = DragSerializer(required=False)
    cp = PowerCoefficientSerializer(required=False)

    def validate(self, attrs: dict[str, Any]) -> PlantParams:
        return PlantParams(**attrs)


class WindSerializer(StrictSerializer):
    kind = serializers.ChoiceField(
        choices=WindProfileKind.choices, default=WindProfileKind.CONSTANT
    )
    vv = serializers.FloatField(min_value=0.0)
    alpha = serializers.FloatField(default=0.0)
    t_switch = serializers.FloatField(required=False, min_value=0.0)
    vv_after = serializers.FloatField(required=False, min_value=0.0)
    alpha_after = serializers.FloatField(required=False)
    duration = serializers.FloatField(required=False)
    intensity = serializers.FloatField(required=False, min_value=0.0)
    components = serializers.IntegerField(required=False, min_value=1)
    f_min = serializers.FloatField(required=False)
    f_max = serializers.FloatField(required=False)
    seed = serializers.IntegerField(required=False, min_value=0)

    def validate(self, attrs: dict[str, Any]) -> WindProfileSpec:
        kind = attrs['kind']
        if kind in (WindProfileKind.STEP, WindProfileKind.RAMP) and 't_switch' not in attrs:
            raise serializers.ValidationError({'t_switch': f'Required by a {kind} profile.'})
        return _build(WindProfileSpec, attrs)


class ReferencesSerializer(StrictSerializer):
    omega_ref_1 = serializers.FloatField(required=False, min_value=0.0)
    omega_ref_2 = serializers.FloatField(required=False, min_value=0.0)
    beta_ref = serializers.FloatField(default=DEFAULT_BETA_REF)
    alpha = serializers.FloatField(required=False, allow_null=True)


class GainsSerializer(StrictSerializer):
    k_psi = optional_float()
    k_omega1 = optional_float()
    k_id1 = optional_float()
    k_ih1 = optional_float()
    k_omega2 = optional_float()
    k_id2 = optional_float()
    k_ih2 = optional_float()
    delta = optional_float()
    eps = serializers.ListField(child=serializers.FloatField(), required=False)
    psi_surface = serializers.ListField(child=serializers.FloatField(), required=False)
    omega_surface = serializers.ListField(child=serializers.FloatField(), required=False)
    robust_gain = optional_float()

    def validate(self, attrs: dict[str, Any]) -> ControllerGains:
        for name in ('eps', 'psi_surface', 'omega_surface'):
            if name in attrs:
                attrs[name] = tuple(attrs[name])
        return _build(ControllerGains, attrs)


class ControlSerializer(StrictSerializer):
    mode = serializers.ChoiceField(choices=ControlMode.choices, default=ControlMode.ACTIVE)
    gains = GainsSerializer(required=False)

    def validate(self, attrs: dict[str, Any]) -> ControlLaw:
        return ControlLaw(
            mode=ControlMode(attrs['mode']), gains=attrs.get('gains') or ControllerGains()
        )


class FaultSerializer(StrictSerializer):
    mu_bar = serializers.FloatField(min_value=0.0, max_value=1.0)
    turbine = serializers.ChoiceField(choices=Turbine.choices, default=Turbine.FIRST)
    phase = serializers.ChoiceField(choices=FaultPhase.choices, default=FaultPhase.B)
    t_on = serializers.FloatField(required=False, min_value=0.0)

    def validate(self, attrs: dict[str, Any]) -> FaultSpec:
        if attrs['mu_bar'] >= 1.0:
            raise serializers.ValidationError({'mu_bar': 'Severity must be below 1.'})
        return _build(FaultSpec, attrs)


class IntegratorSerializer(StrictSerializer):
    dt = serializers.FloatField(required=False)
    t_end = serializers.FloatField(required=False)
    method = serializers.ChoiceField(choices=IntegrationMethod.choices, required=False)
    control_period = serializers.FloatField(required=False)
    predictive_hold = serializers.BooleanField(required=False)

    def validate(self, attrs: dict[str, Any]) -> IntegratorConfig:
        return _build(IntegratorConfig, attrs)


class InitialStateSerializer(serializers.DictField):
    child = serializers.FloatField()

    def to_internal_value(self, data: Any) -> PlantState:
        values = super().to_internal_value(data)
        unknown = sorted(set(values) - set(STATE_FIELDS))
        if unknown:
            raise serializers.ValidationError(
                {key: ['Unknown state field.'] for key in unknown}
            )
        return PlantState.from_fields(**values)


class ThresholdsSerializer(StrictSerializer):
    psi_error = optional_float(min_value=0.0)
    omega_error = optional_float(min_value=0.0)
    id_max = optional_float(min_value=0.0)
    ih_max = optional_float(min_value=0.0)
    phase_sum_ratio = optional_float(min_value=0.0)


class MetricsSerializer(StrictSerializer):
    window = serializers.ListField(
        child=serializers.FloatField(min_value=0.0), min_length=1, max_length=2, required=False
    )
    thresholds = ThresholdsSerializer(required=False)


class OutputSerializer(StrictSerializer):
    directory = serializers.CharField(required=False)
    plot = serializers.BooleanField(default=False)


class ScenarioSerializer(StrictSerializer):
    """Root of a scenario file; ``save()`` returns a :class:`ScenarioConfig`."""

    id = serializers.RegexField(r'^[A-Za-z0-9_.-]+$', required=False)
    description = serializers.CharField(required=False, allow_blank=True)
    plant = PlantSerializer(required=False)
    wind = WindSerializer()
    references = ReferencesSerializer(required=False)
    control = ControlSerializer(required=False)
    fault = FaultSerializer(required=False)
    integrator = IntegratorSerializer(required=False)
    initial = InitialStateSerializer(required=False)
    metrics = MetricsSerializer(required=False)
    output = OutputSerializer(required=False)

    def validate(self, attrs: dict[str, Any]) -> dict[str, Any]:
        integrator = attrs.get('integrator') or IntegratorConfig()
        window = (attrs.get('metrics') or {}).get('window')
        if window:
            start = window[0]
            end = window[1] if len(window) == 2 else integrator.t_end
            if not start < end <= integrator.t_end + 1e-12:
                raise serializers.ValidationError(
                    {'metrics': {'window': ['Expected start < end <= integrator.t_end.']}}
                )
        fault = attrs.get('fault')
        if fault is not None and fault.t_on > integrator.t_end:
            raise serializers.ValidationError(
                {'fault': {'t_on': ['Fault onset lies beyond the horizon.']}}
            )
        return attrs

    def create(self, validated_data: dict[str, Any]) -> ScenarioConfig:
        source: Path | None = self.context.get('source')
        params = validated_data.get('plant') or PlantParams()
        wind = validated_data['wind']
        references = validated_data.get('references') or {}
        beta_ref = references.get('beta_ref', DEFAULT_BETA_REF)
        metrics = validated_data.get('metrics') or {}
        output = validated_data.get('output') or {}
        window = metrics.get('window')
        thresholds = {**DEFAULT_THRESHOLDS, **metrics.get('thresholds', {})}
        directory = output.get('directory')

        return ScenarioConfig(
            scenario_id=validated_data.get('id') or (source.stem if source else 'scenario'),
            description=validated_data.get('description', ''),
            params=params,
            wind=wind,
            omega_refs=default_speed_references(params, wind, beta_ref, references),
            beta_ref=beta_ref,
            alpha_ref=references.get('alpha'),
            control=validated_data.get('control') or ControlLaw(),
            fault=validated_data.get('fault'),
            integrator=validated_data.get('integrator') or IntegratorConfig(),
            initial=validated_data.get('initial'),
            metrics_window=(window[0], window[1] if len(window) == 2 else None) if window else None,
            thresholds=thresholds,
            out_dir=Path(directory) if directory else None,
            plot=output.get('plot', False),
            source=source,
        )


def default_speed_references(
    params: PlantParams, wind: WindProfileSpec, beta_ref: float, references: dict[str, Any]
) -> tuple[float, float]:
    """Ω_ref = λ_opt·V_v/R_p at the pitch reference unless the file sets it."""

    if 'omega_ref_1' in references and 'omega_ref_2' in references:
        return references['omega_ref_1'], references['omega_ref_2']
    lam_opt, _ = optimal_tip_speed_ratio(params.cp, beta=beta_ref)
    optimal = lam_opt * wind.vv / params.aero.rp
    return references.get('omega_ref_1', optimal), references.get('omega_ref_2', optimal)


__all__ = ['ScenarioSerializer', 'StrictSerializer', 'default_speed_references']
