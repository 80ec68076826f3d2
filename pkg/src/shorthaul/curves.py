"""Affine fuel-burn curves and the battery-energy curves derived from them."""

from __future__ import annotations

import csv
import math
import warnings
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Union

import numpy as np

from .params import DEFAULT_PARAMS, ModelParameters

CURVE_COLUMNS = ("code", "slope_kg_per_nm", "intercept_kg", "slope_wh_per_nm", "intercept_wh", "fit_points", "rmse_kg")


class CurveFitError(ValueError):
    pass


@dataclass(frozen=True)
class FuelBurnCurve:
    code: str
    slope_kg_per_nm: float
    intercept_kg: float
    fit_points: int
    rmse_kg: float
    through_origin: bool = False


@dataclass(frozen=True)
class ElectricEnergyCurve:
    code: str
    slope_wh_per_nm: float
    intercept_wh: float


Curve = Union[FuelBurnCurve, ElectricEnergyCurve]


def fit_fuel_curve(
    code: str,
    points: Sequence[tuple[float, float]],
    through_origin: bool = False,
) -> FuelBurnCurve:
    """Least-squares line through ``(distance_nm, fuel_kg)`` observations.

    ``through_origin=True`` forces a zero intercept, allows a single point, and
    is flagged on the returned curve and with a warning.
    """
    if not points:
        raise CurveFitError(f"{code}: no fuel observations")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise CurveFitError(f"{code}: points must be (distance_nm, fuel_kg) pairs")
    if not np.all(pts > 0):
        raise CurveFitError(f"{code}: distances and fuel masses must be positive")
    d, fuel = pts[:, 0], pts[:, 1]

    if through_origin:
        warnings.warn(f"{code}: fitting a through-origin fuel curve", stacklevel=2)
        slope = float(d @ fuel / (d @ d))
        intercept = 0.0
    else:
        if len(np.unique(d)) < 2:
            raise CurveFitError(f"{code}: need at least 2 distinct distances, got {len(np.unique(d))}")
        design = np.column_stack([d, np.ones_like(d)])
        (slope, intercept), *_ = np.linalg.lstsq(design, fuel, rcond=None)
        slope, intercept = float(slope), float(intercept)
        # exact data can land a hair below zero
        if abs(intercept) <= 1e-9 * max(1.0, float(np.max(np.abs(fuel)))):
            intercept = 0.0

    if slope <= 0:
        raise CurveFitError(f"{code}: fitted slope {slope:.6g} kg/nm is not positive")
    if intercept < 0:
        raise CurveFitError(f"{code}: fitted intercept {intercept:.6g} kg is negative")
    resid = fuel - (slope * d + intercept)
    rmse = float(math.sqrt(np.mean(resid**2)))
    return FuelBurnCurve(code, slope, intercept, len(pts), rmse, through_origin)


def electric_curve(curve: FuelBurnCurve, params: ModelParameters = DEFAULT_PARAMS) -> ElectricEnergyCurve:
    k = params.wh_per_kg_fuel
    return ElectricEnergyCurve(curve.code, curve.slope_kg_per_nm * k, curve.intercept_kg * k)


def predict(curve: Curve, distance_nm: float) -> float:
    """Fuel [kg] or battery energy [Wh] for a flight of ``distance_nm``."""
    if distance_nm < 0:
        raise ValueError(f"distance must be non-negative, got {distance_nm}")
    if isinstance(curve, ElectricEnergyCurve):
        return curve.slope_wh_per_nm * distance_nm + curve.intercept_wh
    return curve.slope_kg_per_nm * distance_nm + curve.intercept_kg


def load_fuel_points(path) -> dict[str, list[tuple[float, float]]]:
    points: dict[str, list[tuple[float, float]]] = defaultdict(list)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"code", "distance_nm", "fuel_kg"} - set(reader.fieldnames or ())
        if missing:
            raise CurveFitError(f"fuel points file missing column(s): {', '.join(sorted(missing))}")
        for line, row in enumerate(reader, start=2):
            try:
                points[row["code"]].append((float(row["distance_nm"]), float(row["fuel_kg"])))
            except ValueError:
                raise CurveFitError(f"fuel points row {line}: non-numeric value") from None
    return dict(points)


def fit_all(points: Mapping[str, Sequence[tuple[float, float]]]) -> dict[str, FuelBurnCurve]:
    return {code: fit_fuel_curve(code, pts) for code, pts in points.items()}


def curve_rows(curves: Iterable[FuelBurnCurve], params: ModelParameters = DEFAULT_PARAMS) -> list[dict[str, object]]:
    rows = []
    for c in curves:
        e = electric_curve(c, params)
        rows.append(
            {
                "code": c.code,
                "slope_kg_per_nm": c.slope_kg_per_nm,
                "intercept_kg": c.intercept_kg,
                "slope_wh_per_nm": e.slope_wh_per_nm,
                "intercept_wh": e.intercept_wh,
                "fit_points": c.fit_points,
                "rmse_kg": c.rmse_kg,
            }
        )
    return rows
