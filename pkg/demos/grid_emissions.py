"""Where electrifying short hops helps the climate, and where it backfires.

Uses the bundled per-country ledger: continent roll-up, the single
tipping intensity, a 5% greener-grid scenario, and a two-country gap
broken into its causes.
"""

from shorthaul.curves import fit_all, load_fuel_points
from shorthaul.emissions import (
    CountryFlights,
    GridProfile,
    aggregate,
    decompose_pair,
    improvement_scenario,
    load_country_ledger,
    rank,
)
from shorthaul.params import DEFAULT_PARAMS
from shorthaul.registry import data_path

rows = load_country_ledger(data_path("country_ledger.csv"))
summary = aggregate(rows)
print(f"electric beats kerosene below {DEFAULT_PARAMS.closed_form_tipping_g_per_kwh:.2f} gCO2e/kWh for any flight mix\n")

print(f"{'continent':<14} {'net kg CO2e':>14} {'kg/nm':>7}")
for name, c in sorted(summary.continents.items(), key=lambda kv: -kv[1].aggregate.savings_kg):
    print(f"{name:<14} {c.aggregate.savings_kg:>14,.0f} {c.aggregate.savings_per_mile:>7.2f}")
print(f"{'world':<14} {summary.net_savings_kg:>14,.0f}\n")

best, worst = rank(rows, "savings")[0], rank(rows, "savings")[-1]
print(f"biggest win {best.country} ({best.savings_kg:,.0f} kg); biggest loss {worst.country} ({worst.savings_kg:,.0f} kg)")

print("\nA 5% cleaner grid, largest absolute gains:")
for r in rank(rows, "scenario_absolute", fraction=0.05)[:3]:
    s = improvement_scenario(r, 0.05)
    print(f"  {r.country:<12} {s.absolute_delta_kg:>12,.0f} kg ({s.relative_delta_pct:.1f}%)")

curves = fit_all(load_fuel_points(data_path("fuel_points.csv")))
india = CountryFlights.from_totals("India", {"A320-200": (63_199, 9_495_447)})
brazil = CountryFlights.from_totals("Brazil", {"A320-200": (49_640, 9_208_587)})
res = decompose_pair(india, GridProfile("India", "Asia", 713.44), brazil, GridProfile("Brazil", "South America", 98.35), curves)
print(f"\nWhy Brazil saves more than India loses ({res.gap_kg:,.0f} kg gap):")
for k, v in res.contributions_pct.items():
    print(f"  {k:<13} {v:+7.1f}%")
