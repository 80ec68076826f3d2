"""Streaming schedule ingestion, exclusion taxonomy and deployment statistics.

Every row carries a ``departures`` multiplier; all counters in this module
are flight counts (sums of departures), never row counts, unless the name
says ``rows``.
"""

from __future__ import annotations

import csv
import json
import math
import random
from collections import Counter, defaultdict
from collections.abc import Collection, Iterable, Iterator, Mapping
from dataclasses import asdict, dataclass, field
from typing import IO

from .registry import Registry

SCHEDULE_COLUMNS = (
    "record_id",
    "service_class",
    "aircraft_code",
    "origin_airport",
    "origin_country",
    "destination_airport",
    "distance_nm",
    "departures",
)

SERVICE_CLASSES = ("passenger_flight", "limo", "bus", "train", "helicopter", "road_feeder", "freighter")
NON_PASSENGER_CLASSES = SERVICE_CLASSES[1:]
_FLIGHT_CLASSES = {"passenger_flight", "freighter", "helicopter"}

EXCLUSION_REASONS = NON_PASSENGER_CLASSES + ("uncommon_model", "no_fuel_data", "ambiguous_label", "no_grid_data")

#: Published 2019 funnel. Proprietary source; kept for documentation only.
REFERENCE_FUNNEL = {
    "total_trips": 48_203_125,
    "limo": 1_926,
    "bus": 485_770,
    "train": 2_844_077,
    "helicopter": 594_663,
    "road_feeder": 5_255_037,
    "freighter": 602_374,
    "after_mode_exclusions": 38_419_278,
    "uncommon_model": 2_436_131,
    "no_fuel_data": 453_600,
    "ambiguous_label": 2_028_052,
    "final_flights": 33_501_495,
    "short_haul_flights": 4_364_491,
    "candidate_short_haul_flights": 885_894,
    "candidate_flights_with_grid": 879_530,
}

NM_PER_KM = 1 / 1.852
EARTH_RADIUS_KM = 6371.0


class SchemaError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class RawRecord:
    record_id: str
    service_class: str
    aircraft_code: str
    origin_airport: str
    origin_country: str
    destination_airport: str
    distance_nm: float
    departures: int


@dataclass(frozen=True, slots=True)
class FlightRecord:
    record_id: str
    aircraft_code: str
    origin_country: str
    distance_nm: float
    departures: int


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    record_id: str
    message: str

    def __str__(self) -> str:
        return f"line {self.line} (record {self.record_id or '?'}): {self.message}"


@dataclass
class FilterStats:
    total_in: int = 0
    excluded: dict[str, int] = field(default_factory=lambda: dict.fromkeys(EXCLUSION_REASONS, 0))
    kept: int = 0
    kept_short_haul: int = 0

    def balances(self) -> bool:
        return self.kept + sum(self.excluded.values()) == self.total_in

    def merge(self, other: FilterStats) -> FilterStats:
        return FilterStats(
            total_in=self.total_in + other.total_in,
            excluded={r: self.excluded[r] + other.excluded[r] for r in EXCLUSION_REASONS},
            kept=self.kept + other.kept,
            kept_short_haul=self.kept_short_haul + other.kept_short_haul,
        )

    def as_dict(self) -> dict[str, object]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def great_circle_nm(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Haversine distance on a 6,371 km sphere, in nautical miles."""
    for lat in (lat1, lat2):
        if not -90 <= lat <= 90:
            raise ValueError(f"latitude out of range: {lat}")
    for lon in (lon1, lon2):
        if not -180 <= lon <= 180:
            raise ValueError(f"longitude out of range: {lon}")
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp, dl = p2 - p1, math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a))) * NM_PER_KM


def _parse(row: list[str], line: int, airports: Mapping[str, tuple[float, float]] | None) -> RawRecord:
    if len(row) != len(SCHEDULE_COLUMNS):
        raise ValueError(f"expected {len(SCHEDULE_COLUMNS)} fields, got {len(row)}")
    rid, cls, code, o_ap, o_cc, d_ap, dist, deps = (v.strip() for v in row)
    if cls not in SERVICE_CLASSES:
        raise ValueError(f"unknown service class {cls!r}")
    departures = int(deps)
    if departures < 1:
        raise ValueError(f"departures must be >= 1, got {departures}")
    if dist:
        distance = float(dist)
    elif airports and o_ap in airports and d_ap in airports:
        distance = great_circle_nm(*airports[o_ap], *airports[d_ap])
    else:
        distance = math.nan if cls in _FLIGHT_CLASSES else 0.0
    if cls in _FLIGHT_CLASSES and not distance > 0:
        raise ValueError(f"flight row needs a positive distance, got {dist!r}")
    return RawRecord(rid, cls, code, o_ap, o_cc, d_ap, distance, departures)


def iter_records(
    stream: IO[str],
    diagnostics: list[ParseDiagnostic],
    airports: Mapping[str, tuple[float, float]] | None = None,
) -> Iterator[RawRecord]:
    """Yield parsed rows; malformed rows are appended to ``diagnostics``.

    ``airports`` maps airport code to (lat, lon) and fills in blank distances.
    """
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("schedule is empty (no header)") from None
    if tuple(h.strip() for h in header) != SCHEDULE_COLUMNS:
        raise SchemaError(f"schedule header mismatch: expected {','.join(SCHEDULE_COLUMNS)}")
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            yield _parse(row, line, airports)
        except ValueError as exc:
            diagnostics.append(ParseDiagnostic(line, row[0] if row else "", str(exc)))


def ingest(stream: IO[str], airports=None) -> tuple[list[RawRecord], list[ParseDiagnostic]]:
    diagnostics: list[ParseDiagnostic] = []
    records = list(iter_records(stream, diagnostics, airports))
    return records, diagnostics


def read_label_list(path) -> frozenset[str]:
    """One label per line; blank lines and ``#`` comments ignored."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(s.strip() for s in fh if s.strip() and not s.lstrip().startswith("#"))


def filter_commercial(
    records: Iterable[RawRecord],
    registry: Registry | Collection[str],
    ambiguous_labels: Collection[str] = (),
    uncommon_models: Collection[str] = (),
    grid: Collection[str] | None = None,
    threshold_nm: float = 200.0,
) -> tuple[list[FlightRecord], FilterStats]:
    """Apply the exclusion taxonomy in order and tally every excluded flight.

    Order: service class, uncommon model, no fuel data, ambiguous label, and,
    when ``grid`` (a set of country names) is given, missing grid data.
    ``no_fuel_data`` covers specific model labels absent from the registry;
    labels on the ambiguous deny-list fall through to ``ambiguous_label``.
    """
    known = set(registry)
    ambiguous = set(ambiguous_labels)
    uncommon = set(uncommon_models)
    stats = FilterStats()
    excluded = stats.excluded
    kept: list[FlightRecord] = []
    for r in records:
        n = r.departures
        stats.total_in += n
        code = r.aircraft_code
        if r.service_class != "passenger_flight":
            excluded[r.service_class] += n
        elif code in uncommon:
            excluded["uncommon_model"] += n
        elif code not in known and code not in ambiguous:
            excluded["no_fuel_data"] += n
        elif code in ambiguous:
            excluded["ambiguous_label"] += n
        elif grid is not None and r.origin_country not in grid:
            excluded["no_grid_data"] += n
        else:
            stats.kept += n
            if r.distance_nm < threshold_nm:
                stats.kept_short_haul += n
            kept.append(FlightRecord(r.record_id, code, r.origin_country, r.distance_nm, n))
    return kept, stats


def exclude_no_grid(
    flights: Iterable[FlightRecord], stats: FilterStats, grid: Collection[str], threshold_nm: float = 200.0
) -> tuple[list[FlightRecord], FilterStats]:
    """Second-stage grid filter: moves flights without a grid profile to ``no_grid_data``."""
    out = FilterStats(stats.total_in, dict(stats.excluded), stats.kept, stats.kept_short_haul)
    kept = []
    for f in flights:
        if f.origin_country in grid:
            kept.append(f)
        else:
            out.excluded["no_grid_data"] += f.departures
            out.kept -= f.departures
            if f.distance_nm < threshold_nm:
                out.kept_short_haul -= f.departures
    return kept, out


def short_haul(records: Iterable[FlightRecord], threshold_nm: float = 200.0) -> list[FlightRecord]:
    """Flights strictly below ``threshold_nm``."""
    if threshold_nm < 0:
        raise ValueError(f"threshold must be non-negative, got {threshold_nm}")
    return [r for r in records if r.distance_nm < threshold_nm]


@dataclass
class DeploymentStats:
    flights: int
    flights_by_model: dict[str, int]
    model_set: frozenset[str]
    set_flights: int
    miles_by_model_country: dict[tuple[str, str], float]

    @property
    def share_of_flights(self) -> float:
        """Share of all flights flown by the model set (0 for empty input)."""
        return self.set_flights / self.flights if self.flights else 0.0

    @property
    def share_by_model(self) -> dict[str, float]:
        if not self.flights:
            return {}
        return {m: n / self.flights for m, n in sorted(self.flights_by_model.items())}

    def miles_by_country(self) -> dict[str, float]:
        grouped: dict[str, list[float]] = defaultdict(list)
        for (_, country), miles in self.miles_by_model_country.items():
            grouped[country].append(miles)
        return {c: math.fsum(v) for c, v in sorted(grouped.items())}


def deployment_stats(records: Iterable[FlightRecord], model_set: Collection[str]) -> DeploymentStats:
    """Flight counts for every model and miles flown by the model set.

    Pass short-haul-filtered records to get short-haul shares.
    """
    models = frozenset(model_set)
    by_model: Counter[str] = Counter()
    terms: dict[tuple[str, str], list[float]] = defaultdict(list)
    for r in records:
        by_model[r.aircraft_code] += r.departures
        if r.aircraft_code in models:
            terms[(r.aircraft_code, r.origin_country)].append(r.distance_nm * r.departures)
    total = sum(by_model.values())
    return DeploymentStats(
        flights=total,
        flights_by_model=dict(by_model),
        model_set=models,
        set_flights=sum(by_model[m] for m in models),
        # fsum is correctly rounded, so miles do not depend on record order
        miles_by_model_country={k: math.fsum(v) for k, v in sorted(terms.items())},
    )


# --------------------------------------------------------------------------
# synthetic corpus

_UNKNOWN_COUNTRIES = ("Macau", "Jersey", "Guernsey")


def generate_corpus(
    out: IO[str],
    n_rows: int,
    seed: int,
    registry: Registry,
    countries: Collection[str],
    model_set: Collection[str] = ("A319-100", "A320-200", "A321-200"),
    ambiguous_labels: Collection[str] = ("A320 family",),
    uncommon_models: Collection[str] = ("Concorde",),
    short_haul_share: float = 0.13,
    threshold_nm: float = 200.0,
    class_weights: Mapping[str, float] | None = None,
    no_grid_share: float = 0.01,
    malformed_share: float = 0.0,
) -> dict[str, object]:
    """Write a seeded ``schedule.csv`` to ``out`` and return its manifest.

    The manifest records what was planted: per-reason excluded flights, kept
    and short-haul flights, candidate-model flights and miles per country.
    Distances are whole nautical miles so miles sums are exact.
    """
    rng = random.Random(seed)
    weights = dict(class_weights or {
        "passenger_flight": 0.70, "limo": 0.01, "bus": 0.02, "train": 0.06,
        "helicopter": 0.01, "road_feeder": 0.10, "freighter": 0.10,
    })
    classes = list(weights)
    cum = list(_cumulative(weights[c] for c in classes))
    codes = list(registry)
    candidates = [c for c in codes if c in set(model_set)]
    others = [c for c in codes if c not in set(model_set)]
    country_list = sorted(countries)
    unknown_fuel = ("Tu-134", "Beech 1900D", "Saab 2000")
    ambiguous = sorted(ambiguous_labels)
    uncommon = sorted(uncommon_models)

    excluded = dict.fromkeys(EXCLUSION_REASONS, 0)
    kept = kept_short = 0
    set_short_flights = set_short_no_grid = 0
    short_flights_by_model: Counter[str] = Counter()
    candidate_miles: dict[str, int] = defaultdict(int)
    malformed = 0
    th = int(threshold_nm)

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SCHEDULE_COLUMNS)
    for i in range(n_rows):
        rid = f"R{i:08d}"
        if malformed_share and rng.random() < malformed_share:
            writer.writerow([rid, "passenger_flight", codes[0], "AAA", country_list[0], "BBB", "n/a", 1])
            malformed += 1
            continue
        cls = classes[_pick(cum, rng.random())]
        deps = rng.randint(1, 5)
        country = rng.choice(country_list)
        if cls != "passenger_flight":
            dist = rng.randint(5, 1500)
            writer.writerow([rid, cls, "BUS" if cls in ("bus", "limo", "road_feeder") else rng.choice(codes),
                             "AAA", country, "BBB", dist, deps])
            excluded[cls] += deps
            continue
        u = rng.random()
        if u < 0.03:
            code, reason = rng.choice(uncommon), "uncommon_model"
        elif u < 0.05:
            code, reason = rng.choice(unknown_fuel), "no_fuel_data"
        elif u < 0.09:
            code, reason = rng.choice(ambiguous), "ambiguous_label"
        else:
            code = rng.choice(candidates) if rng.random() < 0.3 else rng.choice(others)
            reason = None
            if rng.random() < no_grid_share:
                country = rng.choice(_UNKNOWN_COUNTRIES)
                reason = "no_grid_data"
        is_short = rng.random() < short_haul_share
        dist = rng.randint(20, th - 1) if is_short else rng.randint(th, 3000)
        writer.writerow([rid, cls, code, "AAA", country, "BBB", dist, deps])
        if reason == "no_grid_data" and is_short and code in candidates:
            set_short_no_grid += deps
        if reason:
            excluded[reason] += deps
            continue
        kept += deps
        if is_short:
            kept_short += deps
            short_flights_by_model[code] += deps
            if code in candidates:
                set_short_flights += deps
                candidate_miles[country] += dist * deps
    return {
        "seed": seed,
        "rows": n_rows,
        "malformed_rows": malformed,
        "parsed_rows": n_rows - malformed,
        "total_in": sum(excluded.values()) + kept,
        "excluded": excluded,
        "kept": kept,
        "kept_short_haul": kept_short,
        "model_set": sorted(model_set),
        "set_short_haul_flights": set_short_flights,
        "set_short_haul_flights_before_grid": set_short_flights + set_short_no_grid,
        "short_haul_flights_by_model": dict(sorted(short_flights_by_model.items())),
        "candidate_short_haul_miles_by_country": dict(sorted(candidate_miles.items())),
    }


def _cumulative(values: Iterable[float]) -> Iterator[float]:
    acc = 0.0
    vals = list(values)
    total = sum(vals)
    for v in vals:
        acc += v / total
        yield acc


def _pick(cum: list[float], u: float) -> int:
    for i, c in enumerate(cum):
        if u < c:
            return i
    return len(cum) - 1
