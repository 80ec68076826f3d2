"""Global physical and policy constants shared by every calculation."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParameters:
    #: lower heating value of kerosene [MJ/kg]
    lhv_mj_per_kg: float = 43.1
    #: thermal efficiency of the combustion powertrain
    eta_fossil: float = 0.40
    #: efficiency of the electric powertrain
    eta_electric: float = 0.80
    #: exact 1000/3.6; pass 277.0 to use the rounded constant
    wh_per_mj: float = 1000.0 / 3.6
    #: battery gravimetric energy density [Wh/kg]
    battery_density_wh_per_kg: float = 300.0
    #: passenger plus baggage mass [kg]
    pax_mass_kg: float = 95.0
    #: kg CO2e emitted per kg of kerosene burned
    ci_fuel_kg_per_kg: float = 3.16
    #: short-haul threshold [nm], strict
    short_haul_nm: float = 200.0
    #: clean/dirty comparator [gCO2e/kWh], strict
    dirty_grid_g_per_kwh: float = 530.0

    def __post_init__(self) -> None:
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not value > 0:
                raise ParameterError(f"{f.name} must be strictly positive, got {value!r}")
        if not self.eta_fossil < 1:
            raise ParameterError(f"eta_fossil must be < 1, got {self.eta_fossil}")
        if not self.eta_electric <= 1:
            raise ParameterError(f"eta_electric must be <= 1, got {self.eta_electric}")

    def replace(self, **changes: float) -> ModelParameters:
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)

    @property
    def wh_per_kg_fuel(self) -> float:
        """Battery energy that replaces one kilogram of kerosene [Wh/kg]."""
        return self.lhv_mj_per_kg * (self.eta_fossil / self.eta_electric) * self.wh_per_mj

    @property
    def closed_form_tipping_g_per_kwh(self) -> float:
        # fuel-side gCO2e per kg over kWh per kg; flight mix cancels
        return self.ci_fuel_kg_per_kg * 1e6 / self.wh_per_kg_fuel


DEFAULT_PARAMS = ModelParameters()
