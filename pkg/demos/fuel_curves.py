"""Distance-to-fuel curves and the electric energy they imply.

Fits the bundled fuel points, predicts a few legs, and shows that the
electric curve is the fuel curve times one constant.
"""

from shorthaul.curves import electric_curve, fit_all, load_fuel_points, predict
from shorthaul.params import DEFAULT_PARAMS
from shorthaul.registry import data_path

curves = fit_all(load_fuel_points(data_path("fuel_points.csv")))
print(f"fitted {len(curves)} curves; every kg of kerosene maps to {DEFAULT_PARAMS.wh_per_kg_fuel:,.1f} Wh of battery energy\n")

for code in ("ATR 72", "A320-200", "B777-300"):
    c = curves[code]
    e = electric_curve(c)
    print(f"{code:<11} fuel = {c.slope_kg_per_nm:6.3f} kg/nm x D + {c.intercept_kg:6.1f} kg   (rmse {c.rmse_kg:.2g})")
    for d in (50, 120, 199):
        print(f"    {d:>3} nm: {predict(c, d):8,.1f} kg kerosene  or {predict(e, d) / 1e6:6.2f} MWh electric")
