"""End-to-end schedule processing: ingest, filter, short-haul, ledger.

Records are read by a single ordered reader and processed in chunks, possibly
on a thread pool. Chunk results merge with integer counters and
order-independent float sums, so the outcome does not depend on chunking or
worker count.
"""

from __future__ import annotations

import itertools
from collections.abc import Collection, Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO

from .curves import FuelBurnCurve
from .emissions import CountryFlights, GridProfile, LedgerRow, LedgerSummary, aggregate, build_ledger
from .params import DEFAULT_PARAMS, ModelParameters
from .registry import Registry
from .schedule import (
    DeploymentStats,
    FilterStats,
    FlightRecord,
    ParseDiagnostic,
    RawRecord,
    deployment_stats,
    exclude_no_grid,
    filter_commercial,
    iter_records,
)

DEFAULT_MODEL_SET = ("A319-100", "A320-200", "A321-200")


class InvariantViolation(RuntimeError):
    pass


@dataclass
class ChunkResult:
    stats: FilterStats
    short_haul: list[FlightRecord]
    candidates: dict[str, CountryFlights]
    no_grid_rows: list[tuple[str, str]]


@dataclass
class PipelineResult:
    stats: FilterStats
    diagnostics: list[ParseDiagnostic]
    deployment: DeploymentStats
    no_grid_rows: list[tuple[str, str]]
    flights_by_country: dict[str, CountryFlights]
    ledger: list[LedgerRow] = field(default_factory=list)
    summary: LedgerSummary | None = None


def process_chunk(
    records: Iterable[RawRecord],
    registry: Registry,
    grid: Collection[str],
    model_set: Collection[str],
    ambiguous: Collection[str],
    uncommon: Collection[str],
    threshold_nm: float,
) -> ChunkResult:
    flights, stats = filter_commercial(records, registry, ambiguous, uncommon, threshold_nm=threshold_nm)
    short = [f for f in flights if f.distance_nm < threshold_nm]
    with_grid, stats = exclude_no_grid(flights, stats, grid, threshold_nm)
    no_grid = [(f.record_id, f.origin_country) for f in flights if f.origin_country not in grid]
    candidates: dict[str, CountryFlights] = {}
    models = set(model_set)
    for f in with_grid:
        if f.distance_nm < threshold_nm and f.aircraft_code in models:
            candidates.setdefault(f.origin_country, CountryFlights(f.origin_country)).add(
                f.aircraft_code, f.distance_nm, f.departures
            )
    return ChunkResult(stats, short, candidates, no_grid)


def _chunks(it: Iterable[RawRecord], size: int):
    it = iter(it)
    while chunk := list(itertools.islice(it, size)):
        yield chunk


def run_pipeline(
    stream: IO[str],
    registry: Registry,
    curves: Mapping[str, FuelBurnCurve],
    grid: Mapping[str, GridProfile],
    model_set: Collection[str] = DEFAULT_MODEL_SET,
    ambiguous: Collection[str] = (),
    uncommon: Collection[str] = (),
    params: ModelParameters = DEFAULT_PARAMS,
    workers: int = 1,
    chunk_size: int = 50_000,
) -> PipelineResult:
    diagnostics: list[ParseDiagnostic] = []
    records = iter_records(stream, diagnostics)
    args = (registry, set(grid), tuple(model_set), frozenset(ambiguous), frozenset(uncommon), params.short_haul_nm)

    if workers <= 1:
        results = [process_chunk(c, *args) for c in _chunks(records, chunk_size)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(process_chunk, c, *args) for c in _chunks(records, chunk_size)]
            results = [f.result() for f in futures]

    stats = FilterStats()
    short: list[FlightRecord] = []
    no_grid: list[tuple[str, str]] = []
    merged: dict[str, CountryFlights] = {}
    for r in results:
        stats = stats.merge(r.stats)
        short.extend(r.short_haul)
        no_grid.extend(r.no_grid_rows)
        for country, cf in r.candidates.items():
            target = merged.setdefault(country, CountryFlights(country))
            for code, legs in cf.routes.items():
                target.routes.setdefault(code, []).extend(legs)
    if not stats.balances():
        raise InvariantViolation(f"filter stats do not balance: {stats.as_dict()}")

    missing = {c for cf in merged.values() for c in cf.routes} - set(curves)
    if missing:
        raise KeyError(f"no fuel curve for candidate aircraft: {', '.join(sorted(missing))}")
    ledger = build_ledger(merged, curves, grid, params)
    return PipelineResult(
        stats=stats,
        diagnostics=diagnostics,
        deployment=deployment_stats(short, model_set),
        no_grid_rows=sorted(no_grid),
        flights_by_country=dict(sorted(merged.items())),
        ledger=ledger,
        summary=aggregate(ledger),
    )

