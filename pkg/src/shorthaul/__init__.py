"""Battery-electric feasibility and grid-emissions accounting for short-haul flights."""

from .curves import ElectricEnergyCurve, FuelBurnCurve, electric_curve, fit_fuel_curve, predict
from .emissions import (
    CountryFlights,
    GridProfile,
    LedgerRow,
    aggregate,
    classify,
    decompose_pair,
    electric_emissions,
    fuel_emissions,
    improvement_scenario,
    rank,
    tipping_point,
)
from .params import DEFAULT_PARAMS, ModelParameters, ParameterError
from .propulsion import (
    BatteryRequirement,
    ExceedanceResult,
    battery_requirement,
    exceedance,
    requisite_density,
    reserve_stress,
    sensitivity_table,
)
from .registry import AircraftCategory, AircraftModel, Registry, bundled_registry, category_summary, load_registry
from .schedule import FilterStats, deployment_stats, filter_commercial, great_circle_nm, ingest, short_haul

__version__ = "0.1.0"
