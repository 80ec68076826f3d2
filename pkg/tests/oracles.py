"""Independent reference computations, written without the package's helpers."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

WH_PER_MJ = Fraction(10000, 36)  # 1000 / 3.6
DENSITY = 300
PAX = 95


def battery_mass_kg(fuel_kg: float) -> float:
    """Exact rational evaluation of the fuel -> battery chain."""
    chain = Fraction(fuel_kg) * Fraction("43.1") * Fraction(2, 5) / Fraction(4, 5) * WH_PER_MJ / DENSITY
    return float(chain)


def wh_per_kg_fuel() -> float:
    return float(Fraction("43.1") * Fraction(1, 2) * WH_PER_MJ)


def ols(points):
    """Affine least squares from the 2x2 normal equations, in exact rationals."""
    n = len(points)
    xs = [Fraction(x) for x, _ in points]
    ys = [Fraction(y) for _, y in points]
    sx, sy = sum(xs), sum(ys)
    sxx = sum(x * x for x in xs)
    sxy = sum(x * y for x, y in zip(xs, ys))
    det = n * sxx - sx * sx
    slope = (n * sxy - sx * sy) / det
    intercept = (sy * sxx - sx * sxy) / det
    return float(slope), float(intercept)


def haversine_nm(lat1, lon1, lat2, lon2, radius_km=6371.0):
    """Spherical law of haversines written in the atan2 form."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    c = 2 * math.atan2(math.sqrt(h), math.sqrt(1 - h))
    return radius_km * c / 1.852


def exceedance_ratio(row, limit="mlw"):
    battery = battery_mass_kg(row["fuel_200nm_kg"])
    lim = row["mlw_kg"] if limit == "mlw" else row["mtow_kg"]
    return (row["empty_kg"] + row["seats"] * PAX + battery) / lim


def best_small_aircraft_grouping(rows, small, turboprop_mean, regional_mean, n_turbo=4):
    """Brute-force every ``n_turbo``-subset of ``small`` as turboprops.

    The remaining small aircraft join the fixed regional jets. Returns the
    subset whose category means lie closest to the published pair.
    """
    ratio = {r["code"]: exceedance_ratio(r) for r in rows}
    jets = [r["code"] for r in rows if r["category"] == "RegionalJet" and r["code"] not in small]
    best = None
    for turbo in itertools.combinations(small, n_turbo):
        regional = jets + [c for c in small if c not in turbo]
        tm = sum(ratio[c] for c in turbo) / len(turbo)
        rm = sum(ratio[c] for c in regional) / len(regional)
        err = max(abs(tm - turboprop_mean), abs(rm - regional_mean))
        if best is None or err < best[0]:
            best = (err, frozenset(turbo))
    return best


def hand_fuel_emissions_kg(legs, curves):
    """Term-by-term sum of (slope * D + intercept) * 3.16 * N."""
    total = 0.0
    for code, d, n in legs:
        c = curves[code]
        total += (c[0] * d + c[1]) * 3.16 * n
    return total
