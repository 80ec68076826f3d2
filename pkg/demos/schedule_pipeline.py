"""From a raw schedule file to per-country electrification miles.

Generates a seeded synthetic schedule (real schedule data is proprietary),
runs it through the filtering funnel, and checks the books balance.
"""

import io
import time

from shorthaul import bundled_registry
from shorthaul.curves import fit_all, load_fuel_points
from shorthaul.emissions import load_grid
from shorthaul.pipeline import run_pipeline
from shorthaul.registry import data_path
from shorthaul.schedule import generate_corpus, great_circle_nm

print(f"JFK to LHR is {great_circle_nm(40.6413, -73.7781, 51.4700, -0.4543):,.0f} nm along the great circle\n")

registry = bundled_registry()
grid = load_grid(data_path("grid.csv"))
curves = fit_all(load_fuel_points(data_path("fuel_points.csv")))

buf = io.StringIO()
manifest = generate_corpus(buf, 200_000, seed=42, registry=registry, countries=sorted(grid), malformed_share=0.0005)

t0 = time.perf_counter()
res = run_pipeline(io.StringIO(buf.getvalue()), registry, curves, grid,
                   ambiguous={"A320 family"}, uncommon={"Concorde"}, workers=4, chunk_size=25_000)
print(f"processed 200,000 rows in {time.perf_counter() - t0:.1f} s, {len(res.diagnostics)} malformed rows reported")

s = res.stats
print(f"{s.total_in:,} flights in")
for reason, n in s.excluded.items():
    if n:
        print(f"  - {n:>9,} {reason}")
print(f"  = {s.kept:,} kept, of which {s.kept_short_haul:,} under 200 nm")
print(f"books balance: {s.balances()}; matches generator manifest: {s.excluded == manifest['excluded']}")

dep = res.deployment
print(f"\nA319/A320/A321 fly {dep.share_of_flights:.1%} of short-haul flights")
top = sorted(res.flights_by_country.values(), key=lambda cf: -cf.miles)[:5]
for cf in top:
    print(f"  {cf.country:<20} {cf.miles:>10,.0f} nm over {cf.flights:,} flights")
