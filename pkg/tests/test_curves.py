import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from shorthaul.curves import (
    CurveFitError,
    ElectricEnergyCurve,
    FuelBurnCurve,
    curve_rows,
    electric_curve,
    fit_fuel_curve,
    load_fuel_points,
    predict,
)
from shorthaul.propulsion import battery_requirement

EMB170_POINTS = [(100, 600), (200, 1091)]


def test_two_point_interpolation():
    c = fit_fuel_curve("EMB170", EMB170_POINTS)
    assert c.slope_kg_per_nm == pytest.approx(4.91)
    assert c.intercept_kg == pytest.approx(109)
    assert c.rmse_kg == pytest.approx(0, abs=1e-9)
    assert c.fit_points == 2


def test_emb170_predictions():
    c = fit_fuel_curve("EMB170", EMB170_POINTS)
    assert predict(c, 200) == pytest.approx(1091)
    assert predict(c, 150) == pytest.approx(845.5)
    assert predict(c, 0) == c.intercept_kg


def test_collinear_recovery():
    pts = [(d, 3.5 * d + 40) for d in (30, 90, 170)]
    c = fit_fuel_curve("X", pts)
    assert (c.slope_kg_per_nm, c.intercept_kg) == pytest.approx((3.5, 40), rel=1e-12)
    assert c.rmse_kg == pytest.approx(0, abs=1e-9)


def test_noisy_fit_matches_normal_equations():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = rng.integers(3, 12)
        d = rng.uniform(10, 300, n)
        fuel = 5.0 * d + 300 + rng.normal(0, 20, n)
        c = fit_fuel_curve("X", list(zip(d, fuel)))
        slope, intercept = oracles.ols(list(zip(d, fuel)))
        assert c.slope_kg_per_nm == pytest.approx(slope, rel=1e-9)
        assert c.intercept_kg == pytest.approx(intercept, rel=1e-9)
        resid = fuel - (slope * d + intercept)
        assert c.rmse_kg == pytest.approx(np.sqrt(np.mean(resid**2)), rel=1e-6)


@pytest.mark.parametrize(
    "points, message",
    [
        ([], "no fuel"),
        ([(200, 1091)], "2 distinct"),
        ([(200, 1091), (200, 1000)], "2 distinct"),
        ([(100, 600), (200, -5)], "positive"),
        ([(100, 900), (200, 600)], "slope"),
        ([(100, 100), (200, 1000)], "intercept"),
    ],
)
def test_fit_rejections(points, message):
    with pytest.raises(CurveFitError, match=message):
        fit_fuel_curve("X", points)


def test_through_origin_is_flagged():
    with pytest.warns(UserWarning, match="through-origin"):
        c = fit_fuel_curve("X", [(200, 1000)], through_origin=True)
    assert c.through_origin and c.intercept_kg == 0 and c.slope_kg_per_nm == 5


def test_electric_curve_unit_slope():
    e = electric_curve(FuelBurnCurve("U", 1.0, 0.0, 2, 0.0))
    assert e.slope_wh_per_nm == pytest.approx(5986.11, abs=0.01)
    assert e.slope_wh_per_nm == pytest.approx(oracles.wh_per_kg_fuel(), rel=1e-14)
    assert e.intercept_wh == 0.0


def test_electric_curve_matches_battery_chain():
    c = fit_fuel_curve("EMB170", EMB170_POINTS)
    e = electric_curve(c)
    assert predict(e, 200) == pytest.approx(battery_requirement(1091).battery_energy_wh, rel=1e-12)


def test_predict_negative_distance():
    with pytest.raises(ValueError):
        predict(ElectricEnergyCurve("X", 1.0, 0.0), -1)


def test_refit_of_converted_points_commutes():
    pts = [(d, 2.2 * d + 150) for d in (50, 100, 150, 200)]
    c = fit_fuel_curve("X", pts)
    k = oracles.wh_per_kg_fuel()
    refit = fit_fuel_curve("X", [(d, f * k) for d, f in pts])
    e = electric_curve(c)
    assert refit.slope_kg_per_nm == pytest.approx(e.slope_wh_per_nm, rel=1e-9)
    assert refit.intercept_kg == pytest.approx(e.intercept_wh, rel=1e-9)


def test_bundled_curves_anchor(curves, registry):
    assert set(curves) == set(registry)
    for code, c in curves.items():
        assert predict(c, 200) == pytest.approx(registry[code].fuel_200nm_kg, rel=1e-9)
        assert c.slope_kg_per_nm > 0 and c.intercept_kg >= 0


def test_load_fuel_points_errors(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("code,distance_nm\nX,1\n")
    with pytest.raises(CurveFitError, match="missing column"):
        load_fuel_points(p)
    p.write_text("code,distance_nm,fuel_kg\nX,1,abc\n")
    with pytest.raises(CurveFitError, match="row 2"):
        load_fuel_points(p)


def test_curve_rows_columns(curves):
    rows = curve_rows(curves.values())
    assert len(rows) == 47
    r = rows[0]
    assert r["slope_wh_per_nm"] == pytest.approx(r["slope_kg_per_nm"] * oracles.wh_per_kg_fuel())


@settings(max_examples=200, deadline=None)
@given(
    slope=st.floats(0.5, 50),
    intercept=st.floats(0, 2000),
    d=st.floats(0, 1000),
)
def test_electric_prediction_is_scaled_fuel(slope, intercept, d):
    c = FuelBurnCurve("X", slope, intercept, 2, 0.0)
    k = oracles.wh_per_kg_fuel()
    assert predict(electric_curve(c), d) == pytest.approx(predict(c, d) * k, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    shift=st.floats(0, 45),
    noise=st.lists(st.floats(-5, 5), min_size=4, max_size=4),
)
def test_slope_invariant_under_translation(shift, noise):
    ds = [50.0, 100.0, 150.0, 200.0]
    pts = [(d, 4 * d + 400 + e) for d, e in zip(ds, noise)]
    moved = [(d - shift, f) for d, f in pts]  # intercept stays positive
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        a, b = fit_fuel_curve("X", pts), fit_fuel_curve("X", moved)
    assert b.slope_kg_per_nm == pytest.approx(a.slope_kg_per_nm, rel=1e-9)
    assert b.rmse_kg == pytest.approx(a.rmse_kg, rel=1e-6, abs=1e-9)


def test_load_fuel_points_stream_roundtrip(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("code,distance_nm,fuel_kg\nA,100,600\nA,200,1091\nB,50,100\nB,150,300\n")
    pts = load_fuel_points(p)
    assert pts == {"A": [(100.0, 600.0), (200.0, 1091.0)], "B": [(50.0, 100.0), (150.0, 300.0)]}
