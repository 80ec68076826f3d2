from __future__ import annotations

import csv
from pathlib import Path

import pytest

from shorthaul.curves import fit_all, load_fuel_points
from shorthaul.emissions import load_country_ledger, load_grid
from shorthaul.registry import bundled_registry, data_path

TEST_DATA = Path(__file__).parent / "data"


def read_table(name: str) -> list[dict[str, str]]:
    with open(TEST_DATA / name, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="session")
def registry():
    return bundled_registry()


@pytest.fixture(scope="session")
def aircraft_rows():
    with open(data_path("aircraft.csv"), newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for k in ("seats", "empty_kg", "pax_kg", "fuel_200nm_kg", "mtow_kg", "mlw_kg"):
            r[k] = float(r[k])
    return rows


@pytest.fixture(scope="session")
def curves():
    return fit_all(load_fuel_points(data_path("fuel_points.csv")))


@pytest.fixture(scope="session")
def grid():
    return load_grid(data_path("grid.csv"))


@pytest.fixture(scope="session")
def ledger_rows():
    return load_country_ledger(data_path("country_ledger.csv"))


@pytest.fixture(scope="session")
def ref_sensitivity():
    return {r["code"]: r for r in read_table("reference_sensitivity.csv")}


#: one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
