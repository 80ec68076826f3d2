"""Kerosene-to-battery conversion, weight-limit exceedance and sensitivity."""

from __future__ import annotations

import dataclasses
import enum
from collections.abc import Iterable
from dataclasses import dataclass

from .params import DEFAULT_PARAMS, ModelParameters
from .registry import AircraftModel


class LimitKind(str, enum.Enum):
    MLW = "mlw"
    MTOW = "mtow"


class StructuralImpossibility(ValueError):
    """Empty plus passenger mass already meets the weight limit."""


@dataclass(frozen=True)
class BatteryRequirement:
    fuel_energy_mj: float
    propulsive_energy_mj: float
    #: energy the electric powertrain must draw, before unit conversion
    electric_energy_mj: float
    battery_energy_wh: float
    battery_mass_kg: float


@dataclass(frozen=True)
class ExceedanceResult:
    code: str
    battery_mass_kg: float
    landing_mass_kg: float
    limit_kg: float
    limit_kind: LimitKind
    ratio: float
    battery_share: float


@dataclass(frozen=True)
class SensitivityRow:
    code: str
    parameter: str
    base_ratio: float
    new_ratio: float

    @property
    def relative_change_pct(self) -> float:
        return 100.0 * (self.new_ratio / self.base_ratio - 1.0)


#: one-at-a-time perturbations, in table column order
SENSITIVITY_PARAMETERS = ("pax_mass", "eta_fossil", "eta_electric", "density", "mlw")
PERTURBATION = 0.05


def battery_requirement(fuel_kg: float, params: ModelParameters = DEFAULT_PARAMS) -> BatteryRequirement:
    if fuel_kg < 0:
        raise ValueError(f"fuel mass must be non-negative, got {fuel_kg}")
    fuel_energy = fuel_kg * params.lhv_mj_per_kg
    propulsive = fuel_energy * params.eta_fossil
    electric = propulsive / params.eta_electric
    energy_wh = electric * params.wh_per_mj
    return BatteryRequirement(
        fuel_energy_mj=fuel_energy,
        propulsive_energy_mj=propulsive,
        electric_energy_mj=electric,
        battery_energy_wh=energy_wh,
        battery_mass_kg=energy_wh / params.battery_density_wh_per_kg,
    )


def _limit(model: AircraftModel, limit_kind: LimitKind | str) -> tuple[LimitKind, float]:
    kind = LimitKind(limit_kind)
    limit = model.mlw_kg if kind is LimitKind.MLW else model.mtow_kg
    if not limit > 0:
        raise ValueError(f"{model.code}: non-positive {kind.value} limit {limit}")
    return kind, limit


def payload_mass(model: AircraftModel, params: ModelParameters = DEFAULT_PARAMS) -> float:
    """Operating empty mass plus a full cabin at the per-passenger mass."""
    return model.empty_weight_kg + model.seats * params.pax_mass_kg


def exceedance(
    model: AircraftModel,
    params: ModelParameters = DEFAULT_PARAMS,
    limit_kind: LimitKind | str = LimitKind.MLW,
) -> ExceedanceResult:
    return _exceedance(model, params, limit_kind, 1.0)


def _exceedance(model, params, limit_kind, energy_scale: float) -> ExceedanceResult:
    kind, limit = _limit(model, limit_kind)
    battery = battery_requirement(model.fuel_200nm_kg, params).battery_mass_kg * energy_scale
    landing = payload_mass(model, params) + battery
    return ExceedanceResult(
        code=model.code,
        battery_mass_kg=battery,
        landing_mass_kg=landing,
        limit_kg=limit,
        limit_kind=kind,
        ratio=landing / limit,
        battery_share=battery / limit,
    )


def requisite_density(
    model: AircraftModel,
    params: ModelParameters = DEFAULT_PARAMS,
    limit_kind: LimitKind | str = LimitKind.MLW,
) -> float:
    """Battery energy density [Wh/kg] at which the exceedance ratio is exactly 1."""
    kind, limit = _limit(model, limit_kind)
    allowance = limit - payload_mass(model, params)
    if allowance <= 0:
        raise StructuralImpossibility(
            f"{model.code}: no battery allowance under {kind.value} ({allowance:.1f} kg)"
        )
    return battery_requirement(model.fuel_200nm_kg, params).battery_energy_wh / allowance


def reserve_stress(
    model: AircraftModel,
    params: ModelParameters = DEFAULT_PARAMS,
    reserve_factor: float = 0.0,
    limit_kind: LimitKind | str = LimitKind.MLW,
) -> ExceedanceResult:
    """Exceedance with mission energy inflated by ``1 + reserve_factor``."""
    if reserve_factor < 0:
        raise ValueError(f"reserve factor must be non-negative, got {reserve_factor}")
    return _exceedance(model, params, limit_kind, 1.0 + reserve_factor)


def _perturbed(model: AircraftModel, params: ModelParameters, parameter: str):
    down, up = 1.0 - PERTURBATION, 1.0 + PERTURBATION
    if parameter == "pax_mass":
        return model, params.replace(pax_mass_kg=params.pax_mass_kg * down)
    if parameter == "eta_fossil":
        return model, params.replace(eta_fossil=params.eta_fossil * down)
    if parameter == "eta_electric":
        return model, params.replace(eta_electric=params.eta_electric * up)
    if parameter == "density":
        return model, params.replace(battery_density_wh_per_kg=params.battery_density_wh_per_kg * up)
    if parameter == "mlw":
        return dataclasses.replace(model, mlw_kg=model.mlw_kg * up), params
    raise ValueError(f"unknown sensitivity parameter {parameter!r}")


def sensitivity_table(model: AircraftModel, params: ModelParameters = DEFAULT_PARAMS) -> list[SensitivityRow]:
    base = exceedance(model, params, LimitKind.MLW).ratio
    rows = []
    for name in SENSITIVITY_PARAMETERS:
        m, p = _perturbed(model, params, name)
        rows.append(SensitivityRow(model.code, name, base, exceedance(m, p, LimitKind.MLW).ratio))
    return rows


def fleet_sensitivity(models: Iterable[AircraftModel], params: ModelParameters = DEFAULT_PARAMS) -> list[SensitivityRow]:
    return [row for m in models for row in sensitivity_table(m, params)]
