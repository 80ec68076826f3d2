"""Kerosene versus battery-electric emissions per country and their roll-ups.

Emission sums are formed in grams with ``math.fsum`` (correctly rounded,
hence independent of summation order) and converted to kilograms once.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .curves import FuelBurnCurve, electric_curve
from .params import DEFAULT_PARAMS, ModelParameters
from .schedule import FlightRecord

CLEAN, DIRTY = "clean", "dirty"


class MissingCurveError(KeyError):
    pass


class DegenerateRecovery(ValueError):
    """Grid intensity equals the tipping point; electric energy is unrecoverable."""


@dataclass(frozen=True)
class GridProfile:
    country: str
    continent: str
    intensity_g_per_kwh: float

    def __post_init__(self) -> None:
        if not self.intensity_g_per_kwh >= 0:
            raise ValueError(f"{self.country}: grid intensity must be non-negative")


@dataclass
class CountryFlights:
    """Flights departing one country: ``routes[code] = [(distance_nm, departures), ...]``."""

    country: str
    routes: dict[str, list[tuple[float, int]]] = field(default_factory=dict)

    @property
    def flights(self) -> int:
        return sum(n for legs in self.routes.values() for _, n in legs)

    @property
    def miles(self) -> float:
        return math.fsum(d * n for legs in self.routes.values() for d, n in legs)

    def add(self, code: str, distance_nm: float, departures: int) -> None:
        self.routes.setdefault(code, []).append((distance_nm, departures))

    @classmethod
    def from_totals(cls, country: str, totals: Mapping[str, tuple[int, float]]) -> CountryFlights:
        """Collapse per-aircraft (flights, miles) totals into one average leg each.

        Exact for affine fuel curves.
        """
        cf = cls(country)
        for code, (flights, miles) in totals.items():
            if flights > 0:
                cf.add(code, miles / flights, flights)
        return cf

    def per_aircraft(self) -> dict[str, tuple[int, float]]:
        return {
            code: (sum(n for _, n in legs), math.fsum(d * n for d, n in legs))
            for code, legs in sorted(self.routes.items())
        }


@dataclass(frozen=True)
class LedgerRow:
    country: str
    continent: str
    intensity_g_per_kwh: float
    miles: float
    fuel_emissions_kg: float
    electric_energy_wh: float
    electric_emissions_kg: float
    savings_kg: float
    tipping_g_per_kwh: float
    classification: str
    flights: int | None = None


@dataclass(frozen=True)
class GroupSummary:
    countries: int
    miles: float
    mean_intensity_g_per_kwh: float | None
    savings_kg: float
    electric_energy_wh: float

    @property
    def savings_per_mile(self) -> float | None:
        return self.savings_kg / self.miles if self.miles else None


@dataclass(frozen=True)
class ContinentSummary:
    continent: str
    aggregate: GroupSummary
    clean: GroupSummary
    dirty: GroupSummary


@dataclass(frozen=True)
class LedgerSummary:
    continents: dict[str, ContinentSummary]
    net_savings_kg: float
    miles: float
    avoided_kg: float
    produced_kg: float


@dataclass(frozen=True)
class ScenarioResult:
    country: str
    improvement_fraction: float
    absolute_delta_kg: float
    relative_delta_pct: float


@dataclass(frozen=True)
class DecompositionResult:
    pair: tuple[str, str]
    gap_kg: float
    contributions_kg: dict[str, float]
    mirrored_intensity_g_per_kwh: float
    steps_kg: dict[str, float]

    @property
    def contributions_pct(self) -> dict[str, float]:
        if self.gap_kg == 0:
            return {k: math.nan for k in self.contributions_kg}
        return {k: 100.0 * v / self.gap_kg for k, v in self.contributions_kg.items()}


# --------------------------------------------------------------------------
# loading


def load_grid(path) -> dict[str, GridProfile]:
    grid: dict[str, GridProfile] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"country", "continent", "intensity_g_per_kwh"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"grid file missing column(s): {', '.join(sorted(missing))}")
        for line, row in enumerate(reader, start=2):
            try:
                profile = GridProfile(row["country"], row["continent"], float(row["intensity_g_per_kwh"]))
            except ValueError as exc:
                raise ValueError(f"grid row {line}: {exc}") from None
            if profile.country in grid:
                raise ValueError(f"grid row {line}: duplicate country {profile.country!r}")
            grid[profile.country] = profile
    return grid


def load_country_ledger(path, params: ModelParameters = DEFAULT_PARAMS) -> list[LedgerRow]:
    """Read per-country summaries (intensity, tipping, miles, savings).

    Electric energy and emissions are recovered from savings and the gap
    between tipping point and grid intensity.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            rows.append(
                ledger_row_from_summary(
                    r["country"],
                    r["continent"],
                    float(r["intensity_g_per_kwh"]),
                    float(r["tipping_g_per_kwh"]),
                    float(r["miles_nm"]),
                    float(r["savings_kg"]),
                    params,
                )
            )
    return rows


# --------------------------------------------------------------------------
# per-country emissions


def country_flights(records: Iterable[FlightRecord]) -> dict[str, CountryFlights]:
    out: dict[str, CountryFlights] = {}
    for r in records:
        cf = out.get(r.origin_country)
        if cf is None:
            cf = out[r.origin_country] = CountryFlights(r.origin_country)
        cf.add(r.aircraft_code, r.distance_nm, r.departures)
    return out


def _curve(curves: Mapping[str, FuelBurnCurve], code: str) -> FuelBurnCurve:
    try:
        return curves[code]
    except KeyError:
        raise MissingCurveError(f"no fuel curve for aircraft {code!r}") from None


def fuel_mass_kg(cf: CountryFlights, curves: Mapping[str, FuelBurnCurve]) -> float:
    terms = []
    for code, legs in cf.routes.items():
        c = _curve(curves, code)
        terms.extend((c.slope_kg_per_nm * d + c.intercept_kg) * n for d, n in legs)
    return math.fsum(terms)


def fuel_emissions(cf: CountryFlights, curves: Mapping[str, FuelBurnCurve], params: ModelParameters = DEFAULT_PARAMS) -> float:
    """Kerosene CO2e [kg] of every flight in ``cf``."""
    grams_per_kg = params.ci_fuel_kg_per_kg * 1000.0
    terms = []
    for code, legs in cf.routes.items():
        c = _curve(curves, code)
        terms.extend((c.slope_kg_per_nm * d + c.intercept_kg) * grams_per_kg * n for d, n in legs)
    return math.fsum(terms) / 1000.0


def electric_energy_wh(cf: CountryFlights, curves: Mapping[str, FuelBurnCurve], params: ModelParameters = DEFAULT_PARAMS) -> float:
    terms = []
    for code, legs in cf.routes.items():
        e = electric_curve(_curve(curves, code), params)
        terms.extend((e.slope_wh_per_nm * d + e.intercept_wh) * n for d, n in legs)
    return math.fsum(terms)


def electric_emissions(
    cf: CountryFlights,
    curves: Mapping[str, FuelBurnCurve],
    grid: GridProfile,
    params: ModelParameters = DEFAULT_PARAMS,
) -> tuple[float, float]:
    """(energy [Wh], CO2e [kg]) of flying ``cf`` on batteries charged at departure."""
    if grid is None:
        raise KeyError(f"no grid profile for {cf.country!r}")
    energy = electric_energy_wh(cf, curves, params)
    return energy, energy / 1000.0 * grid.intensity_g_per_kwh / 1000.0


def tipping_from_totals(fuel_emissions_kg: float, energy_wh: float) -> float:
    """Grid intensity [g/kWh] at which electric and kerosene emissions are equal."""
    if energy_wh == 0:
        raise ZeroDivisionError("tipping point undefined for zero electric energy")
    return fuel_emissions_kg * 1000.0 / (energy_wh / 1000.0)


def tipping_point(cf: CountryFlights, curves: Mapping[str, FuelBurnCurve], params: ModelParameters = DEFAULT_PARAMS) -> float:
    return tipping_from_totals(fuel_emissions(cf, curves, params), electric_energy_wh(cf, curves, params))


def classify(intensity_g_per_kwh: float | GridProfile, params: ModelParameters = DEFAULT_PARAMS) -> str:
    """``dirty`` iff intensity is strictly above the comparator."""
    if isinstance(intensity_g_per_kwh, GridProfile):
        intensity_g_per_kwh = intensity_g_per_kwh.intensity_g_per_kwh
    return DIRTY if intensity_g_per_kwh > params.dirty_grid_g_per_kwh else CLEAN


def ledger_row(
    cf: CountryFlights,
    curves: Mapping[str, FuelBurnCurve],
    grid: GridProfile,
    params: ModelParameters = DEFAULT_PARAMS,
) -> LedgerRow:
    fuel = fuel_emissions(cf, curves, params)
    energy, elec = electric_emissions(cf, curves, grid, params)
    return LedgerRow(
        country=cf.country,
        continent=grid.continent,
        intensity_g_per_kwh=grid.intensity_g_per_kwh,
        miles=cf.miles,
        fuel_emissions_kg=fuel,
        electric_energy_wh=energy,
        electric_emissions_kg=elec,
        savings_kg=fuel - elec,
        tipping_g_per_kwh=tipping_from_totals(fuel, energy),
        classification=classify(grid.intensity_g_per_kwh, params),
        flights=cf.flights,
    )


def ledger_row_from_summary(
    country: str,
    continent: str,
    intensity_g_per_kwh: float,
    tipping_g_per_kwh: float,
    miles: float,
    savings_kg: float,
    params: ModelParameters = DEFAULT_PARAMS,
) -> LedgerRow:
    """Rebuild a ledger row when only savings, intensity and tipping point are known."""
    gap = tipping_g_per_kwh - intensity_g_per_kwh
    if gap == 0:
        raise DegenerateRecovery(f"{country}: intensity equals tipping point, energy cannot be recovered")
    energy_kwh = savings_kg * 1000.0 / gap
    if energy_kwh < 0:
        raise ValueError(f"{country}: sign of savings contradicts intensity vs tipping point")
    elec = energy_kwh * intensity_g_per_kwh / 1000.0
    return LedgerRow(
        country=country,
        continent=continent,
        intensity_g_per_kwh=intensity_g_per_kwh,
        miles=miles,
        fuel_emissions_kg=savings_kg + elec,
        electric_energy_wh=energy_kwh * 1000.0,
        electric_emissions_kg=elec,
        savings_kg=savings_kg,
        tipping_g_per_kwh=tipping_g_per_kwh,
        classification=classify(intensity_g_per_kwh, params),
    )


def build_ledger(
    flights_by_country: Mapping[str, CountryFlights],
    curves: Mapping[str, FuelBurnCurve],
    grid: Mapping[str, GridProfile],
    params: ModelParameters = DEFAULT_PARAMS,
) -> list[LedgerRow]:
    """One row per country that has a grid profile, sorted by country."""
    return [
        ledger_row(flights_by_country[c], curves, grid[c], params)
        for c in sorted(flights_by_country)
        if c in grid
    ]


# --------------------------------------------------------------------------
# roll-ups


def _group(rows: Sequence[LedgerRow]) -> GroupSummary:
    return GroupSummary(
        countries=len(rows),
        miles=math.fsum(r.miles for r in rows),
        mean_intensity_g_per_kwh=math.fsum(r.intensity_g_per_kwh for r in rows) / len(rows) if rows else None,
        savings_kg=math.fsum(r.savings_kg for r in rows),
        electric_energy_wh=math.fsum(r.electric_energy_wh for r in rows),
    )


def aggregate(rows: Iterable[LedgerRow]) -> LedgerSummary:
    """Continent totals split by clean/dirty grid, plus the global net.

    Mean intensity is the unweighted mean over countries in the group.
    """
    rows = list(rows)
    by_continent: dict[str, list[LedgerRow]] = defaultdict(list)
    for r in rows:
        by_continent[r.continent].append(r)
    continents = {
        name: ContinentSummary(
            continent=name,
            aggregate=_group(members),
            clean=_group([r for r in members if r.classification == CLEAN]),
            dirty=_group([r for r in members if r.classification == DIRTY]),
        )
        for name, members in sorted(by_continent.items())
    }
    return LedgerSummary(
        continents=continents,
        net_savings_kg=math.fsum(c.aggregate.savings_kg for c in continents.values()),
        miles=math.fsum(r.miles for r in rows),
        avoided_kg=math.fsum(r.savings_kg for r in rows if r.savings_kg > 0),
        produced_kg=-math.fsum(r.savings_kg for r in rows if r.savings_kg < 0),
    )


RANK_KEYS = ("savings", "miles", "intensity", "electric_emissions", "scenario_absolute", "scenario_relative")


def rank(rows: Iterable[LedgerRow], key: str = "savings", fraction: float = 0.05) -> list[LedgerRow]:
    """Descending by ``key``; ties broken by country name."""
    if key == "savings":
        value = lambda r: r.savings_kg  # noqa: E731
    elif key == "miles":
        value = lambda r: r.miles  # noqa: E731
    elif key == "intensity":
        value = lambda r: r.intensity_g_per_kwh  # noqa: E731
    elif key == "electric_emissions":
        value = lambda r: r.electric_emissions_kg  # noqa: E731
    elif key == "scenario_absolute":
        value = lambda r: improvement_scenario(r, fraction).absolute_delta_kg  # noqa: E731
    elif key == "scenario_relative":
        value = lambda r: improvement_scenario(r, fraction).relative_delta_pct  # noqa: E731
    else:
        raise ValueError(f"unknown rank key {key!r}; choose from {', '.join(RANK_KEYS)}")
    return sorted(rows, key=lambda r: (-value(r), r.country))


def improvement_scenario(row: LedgerRow, fraction: float) -> ScenarioResult:
    """Emissions change if the country's grid intensity drops by ``fraction``."""
    if not 0 <= fraction <= 1:
        raise ValueError(f"improvement fraction must lie in [0, 1], got {fraction}")
    delta = fraction * row.electric_emissions_kg
    if row.savings_kg:
        rel = 100.0 * delta / abs(row.savings_kg)
    else:
        rel = 0.0 if delta == 0 else math.inf
    return ScenarioResult(row.country, fraction, delta, rel)


def fig3b_rows(rows: Iterable[LedgerRow]) -> list[dict[str, object]]:
    return [
        {
            "country": r.country,
            "intensity_g_per_kwh": r.intensity_g_per_kwh,
            "ln_miles": math.log(r.miles) if r.miles > 0 else None,
            "savings_kg": r.savings_kg,
            "classification": r.classification,
        }
        for r in rows
    ]


# --------------------------------------------------------------------------
# two-country decomposition


def _mix(cf: CountryFlights) -> tuple[dict[str, float], dict[str, float], int, float]:
    per = cf.per_aircraft()
    n = sum(f for f, _ in per.values())
    d = math.fsum(m for _, m in per.values())
    if n == 0 or d == 0:
        raise ValueError(f"{cf.country}: no flights to decompose")
    return {c: f / n for c, (f, _) in per.items()}, {c: m / d for c, (_, m) in per.items()}, n, d


def _mix_fuel(curves, flight_frac, mile_frac, flights, miles) -> float:
    return math.fsum(
        _curve(curves, c).slope_kg_per_nm * mile_frac[c] * miles + _curve(curves, c).intercept_kg * flight_frac[c] * flights
        for c in flight_frac
    )


def _savings(fuel_kg: float, intensity: float, params: ModelParameters) -> float:
    return fuel_kg * (params.ci_fuel_kg_per_kg - params.wh_per_kg_fuel / 1000.0 * intensity / 1000.0)


def decompose_pair(
    a: CountryFlights,
    grid_a: GridProfile,
    b: CountryFlights,
    grid_b: GridProfile,
    curves: Mapping[str, FuelBurnCurve],
    params: ModelParameters = DEFAULT_PARAMS,
) -> DecompositionResult:
    """Attribute the gap between ``|savings(b)|`` and ``|savings(a)|``.

    ``b`` is moved toward ``a`` one factor at a time: grid intensity (b gets
    a's relative offset from the tipping point, mirrored to the other side),
    then total flights, then total miles. What remains is aircraft mix.
    A positive contribution narrows the gap.
    """
    fa, ga, na, da = _mix(a)
    fb, gb, nb, db = _mix(b)
    tip_a = tipping_point(a, curves, params)
    offset = (grid_a.intensity_g_per_kwh - tip_a) / tip_a
    mirrored = tip_a * (1.0 - offset)

    target = abs(_savings(_mix_fuel(curves, fa, ga, na, da), grid_a.intensity_g_per_kwh, params))
    s0 = abs(_savings(_mix_fuel(curves, fb, gb, nb, db), grid_b.intensity_g_per_kwh, params))
    s1 = abs(_savings(_mix_fuel(curves, fb, gb, nb, db), mirrored, params))
    s2 = abs(_savings(_mix_fuel(curves, fb, gb, na, db), mirrored, params))
    s3 = abs(_savings(_mix_fuel(curves, fb, gb, na, da), mirrored, params))

    gap = s0 - target
    grid_c, flights_c, dist_c = s0 - s1, s1 - s2, s2 - s3
    contributions = {
        "grid": grid_c,
        "flight_count": flights_c,
        "distance": dist_c,
        "composition": gap - (grid_c + flights_c + dist_c),
    }
    return DecompositionResult(
        pair=(a.country, b.country),
        gap_kg=gap,
        contributions_kg=contributions,
        mirrored_intensity_g_per_kwh=mirrored,
        steps_kg={"b": s0, "grid": s1, "flight_count": s2, "distance": s3, "a": target},
    )
