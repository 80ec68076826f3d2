"""How far today's batteries are from carrying a full cabin 200 nm.

Walks one regional jet through the energy chain, then looks at the whole
fleet: exceedance of the landing limit, the density that would close the
gap, and which assumption moves the answer most.
"""

from shorthaul import bundled_registry
from shorthaul.params import DEFAULT_PARAMS
from shorthaul.propulsion import battery_requirement, exceedance, fleet_sensitivity, requisite_density, reserve_stress
from shorthaul.registry import category_summary

registry = bundled_registry()

# One aircraft, step by step.
emb = registry["EMB170"]
req = battery_requirement(emb.fuel_200nm_kg)
print(f"EMB170 burns {emb.fuel_200nm_kg:,.0f} kg of kerosene over 200 nm")
print(f"  fuel energy      {req.fuel_energy_mj:>9,.0f} MJ")
print(f"  propulsive work  {req.propulsive_energy_mj:>9,.0f} MJ")
print(f"  from the battery {req.electric_energy_mj:>9,.0f} MJ")
print(f"  battery mass     {req.battery_mass_kg:>9,.0f} kg at {DEFAULT_PARAMS.battery_density_wh_per_kg:.0f} Wh/kg")
res = exceedance(emb)
print(f"  landing mass is {res.ratio:.2f} x the certified limit\n")

# The fleet, by category.
ratios = category_summary(registry, lambda m: exceedance(m).ratio)
dens = category_summary(registry, requisite_density)
print(f"{'category':<12} {'exceedance':>10} {'needed Wh/kg':>13}")
for cat in ("Turboprop", "RegionalJet", "Narrowbody", "Widebody", "overall"):
    print(f"{cat:<12} {ratios[cat]:>10.2f} {dens[cat]:>13,.0f}")

# Reserves make it worse in proportion to the battery share.
print("\nA320-200 with energy reserves:")
for f in (0.0, 0.33, 0.66, 1.0):
    print(f"  +{f:>4.0%} reserve -> exceedance {reserve_stress(registry['A320-200'], reserve_factor=f).ratio:.2f}")

# Which 5% change helps most?
rows = [r for r in fleet_sensitivity(registry.models) if r.code == "EMB-120"]
print("\nEMB-120, effect of a favourable 5% change in each input:")
for r in rows:
    print(f"  {r.parameter:<13} {r.relative_change_pct:+.2f}%")
