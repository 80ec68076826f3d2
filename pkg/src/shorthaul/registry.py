"""Aircraft performance dataset: loading, validation and category roll-ups."""

from __future__ import annotations

import csv
import enum
import functools
import io
import json
import os
import statistics
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass
from importlib import resources
from typing import IO, Union

COLUMNS = ("code", "category", "seats", "empty_kg", "pax_kg", "fuel_200nm_kg", "mtow_kg", "mlw_kg")
_MASS_COLUMNS = ("empty_kg", "pax_kg", "fuel_200nm_kg", "mtow_kg", "mlw_kg")

Source = Union[str, os.PathLike, IO[str]]


class RegistryError(ValueError):
    pass


class AircraftCategory(str, enum.Enum):
    TURBOPROP = "Turboprop"
    REGIONAL_JET = "RegionalJet"
    NARROWBODY = "Narrowbody"
    WIDEBODY = "Widebody"


@dataclass(frozen=True)
class AircraftModel:
    code: str
    category: AircraftCategory
    seats: int
    empty_weight_kg: float
    pax_weight_kg: float
    fuel_200nm_kg: float
    mtow_kg: float
    mlw_kg: float

    def as_row(self) -> dict[str, object]:
        return {
            "code": self.code,
            "category": self.category.value,
            "seats": self.seats,
            "empty_kg": self.empty_weight_kg,
            "pax_kg": self.pax_weight_kg,
            "fuel_200nm_kg": self.fuel_200nm_kg,
            "mtow_kg": self.mtow_kg,
            "mlw_kg": self.mlw_kg,
        }


class Registry(Mapping[str, AircraftModel]):
    """Immutable, ordered collection of aircraft models keyed by code."""

    def __init__(self, models: Iterable[AircraftModel]):
        self._models = tuple(models)
        self._index = {m.code: m for m in self._models}
        if len(self._index) != len(self._models):
            raise RegistryError("duplicate aircraft code in registry")

    def __getitem__(self, code: str) -> AircraftModel:
        try:
            return self._index[code]
        except KeyError:
            raise KeyError(f"unknown aircraft code {code!r}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._index)

    def __len__(self) -> int:
        return len(self._models)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Registry):
            return self._models == other._models
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    @property
    def models(self) -> tuple[AircraftModel, ...]:
        return self._models

    def category_of(self, code: str) -> AircraftCategory:
        return self[code].category

    def by_category(self) -> dict[AircraftCategory, list[AircraftModel]]:
        out: dict[AircraftCategory, list[AircraftModel]] = {c: [] for c in AircraftCategory}
        for m in self._models:
            out[m.category].append(m)
        return out

    def to_json(self) -> str:
        return json.dumps([m.as_row() for m in self._models], indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        for m in self._models:
            writer.writerow(m.as_row())
        return buf.getvalue()


def _open(source: Source) -> tuple[IO[str], bool]:
    if hasattr(source, "read"):
        return source, False  # type: ignore[return-value]
    return open(source, newline="", encoding="utf-8"), True


def _parse_row(row: Mapping[str, str], line: int) -> AircraftModel:
    code = (row.get("code") or "").strip()
    if not code:
        raise RegistryError(f"row {line}: empty aircraft code")
    try:
        category = AircraftCategory(row["category"].strip())
    except ValueError:
        raise RegistryError(f"row {line} ({code}): unknown category {row['category']!r}") from None
    try:
        seats = int(row["seats"])
        masses = {c: float(row[c]) for c in _MASS_COLUMNS}
    except (TypeError, ValueError) as exc:
        raise RegistryError(f"row {line} ({code}): non-numeric value ({exc})") from None
    if seats <= 0:
        raise RegistryError(f"row {line} ({code}): seats must be positive")
    for col, value in masses.items():
        if not value > 0:
            raise RegistryError(f"row {line} ({code}): non-positive mass in {col} ({value})")
    if masses["mlw_kg"] > masses["mtow_kg"]:
        raise RegistryError(f"row {line} ({code}): MLW {masses['mlw_kg']} exceeds MTOW {masses['mtow_kg']}")
    if masses["empty_kg"] + masses["pax_kg"] >= masses["mtow_kg"]:
        raise RegistryError(f"row {line} ({code}): empty + passenger mass reaches MTOW")
    return AircraftModel(
        code=code,
        category=category,
        seats=seats,
        empty_weight_kg=masses["empty_kg"],
        pax_weight_kg=masses["pax_kg"],
        fuel_200nm_kg=masses["fuel_200nm_kg"],
        mtow_kg=masses["mtow_kg"],
        mlw_kg=masses["mlw_kg"],
    )


def _models_from_rows(rows: Iterable[Mapping[str, str]], first_line: int) -> list[AircraftModel]:
    models: list[AircraftModel] = []
    seen: dict[str, int] = {}
    for line, row in enumerate(rows, start=first_line):
        model = _parse_row(row, line)
        if model.code in seen:
            raise RegistryError(f"row {line}: duplicate code {model.code!r} (first seen on row {seen[model.code]})")
        seen[model.code] = line
        models.append(model)
    if not models:
        raise RegistryError("no aircraft rows")
    return models


def load_registry(source: Source) -> Registry:
    """Read and validate an ``aircraft.csv`` table.

    Validation is strict: the first bad row rejects the whole file.
    """
    fh, owned = _open(source)
    try:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise RegistryError("no aircraft rows")
        missing = [c for c in COLUMNS if c not in reader.fieldnames]
        if missing:
            raise RegistryError(f"missing column(s): {', '.join(missing)}")
        return Registry(_models_from_rows(reader, first_line=2))
    finally:
        if owned:
            fh.close()


def load_registry_json(text: str) -> Registry:
    rows = json.loads(text)
    if not isinstance(rows, list):
        raise RegistryError("registry JSON must be an array")
    return Registry(_models_from_rows(({k: str(v) for k, v in r.items()} for r in rows), first_line=1))


def data_path(name: str):
    return resources.files("shorthaul") / "data" / name


@functools.lru_cache(maxsize=None)
def bundled_registry() -> Registry:
    with data_path("aircraft.csv").open("r", encoding="utf-8", newline="") as fh:
        return load_registry(fh)


def category_of(code: str, registry: Registry | None = None) -> AircraftCategory:
    return (registry or bundled_registry()).category_of(code)


def category_summary(
    registry: Registry,
    metric: Callable[[AircraftModel], float] | Mapping[str, float],
) -> dict[str, float]:
    """Arithmetic mean of ``metric`` per category, plus an ``"overall"`` entry."""
    if isinstance(metric, Mapping):
        values = {code: float(metric[code]) for code in registry}
    else:
        values = {m.code: float(metric(m)) for m in registry.models}
    out: dict[str, float] = {}
    for category, members in registry.by_category().items():
        if members:
            out[category.value] = statistics.fmean(values[m.code] for m in members)
    out["overall"] = statistics.fmean(values.values())
    return out

