"""Command-line entry point.

Exit codes: 0 success, 2 input or validation error, 3 internal invariant
violation. All outputs are computed before any file is written, and each file
is written atomically.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Mapping, Sequence
from pathlib import Path

from . import curves as curves_mod
from . import emissions as em
from . import propulsion as prop
from .output import render_csv, render_json, write_atomic
from .params import ModelParameters, ParameterError
from .pipeline import DEFAULT_MODEL_SET, InvariantViolation, run_pipeline
from .registry import RegistryError, bundled_registry, category_summary, data_path, load_registry
from .schedule import SchemaError, filter_commercial, generate_corpus, ingest, read_label_list

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 2, 3

#: flag dest -> ModelParameters field
PARAM_FLAGS = {
    "lhv": "lhv_mj_per_kg",
    "eta_fossil": "eta_fossil",
    "eta_electric": "eta_electric",
    "wh_per_mj": "wh_per_mj",
    "density": "battery_density_wh_per_kg",
    "pax_mass": "pax_mass_kg",
    "ci_fuel": "ci_fuel_kg_per_kg",
    "threshold": "short_haul_nm",
    "dirty_grid": "dirty_grid_g_per_kwh",
}
INPUT_FLAGS = ("aircraft", "fuel_points", "schedule", "grid", "ledger", "ambiguous", "uncommon", "aggregates")


class InputError(Exception):
    pass


# --------------------------------------------------------------------------
# configuration


def _resolve(args: argparse.Namespace) -> dict:
    """flag > config file > built-in default."""
    file_cfg: dict = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
    file_params = file_cfg.get("parameters", {})
    unknown = set(file_params) - set(PARAM_FLAGS.values())
    if unknown:
        raise InputError(f"unknown parameter(s) in config: {', '.join(sorted(unknown))}")
    overrides = dict(file_params)
    for flag, name in PARAM_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[name] = value
    params = ModelParameters(**overrides)
    inputs = {}
    for name in INPUT_FLAGS:
        value = getattr(args, name, None)
        if value is None:
            value = file_cfg.get("inputs", {}).get(name)
        if value is not None:
            inputs[name] = str(value)
    return {
        "subcommand": args.command,
        "parameters": params.as_dict(),
        "inputs": inputs,
        "format": args.format,
        "out_dir": str(args.out_dir),
        "workers": getattr(args, "workers", 1),
        "seed": getattr(args, "seed", None),
        "_params": params,
    }


def _public(cfg: Mapping) -> dict:
    return {k: v for k, v in cfg.items() if not k.startswith("_") and v is not None}


def _existing(path: str | None, what: str) -> str | None:
    if path is not None and not Path(path).is_file():
        raise InputError(f"{what} file not found: {path}")
    return path


def _registry(cfg):
    path = _existing(cfg["inputs"].get("aircraft"), "aircraft")
    return load_registry(path) if path else bundled_registry()


def _curves(cfg):
    path = _existing(cfg["inputs"].get("fuel_points"), "fuel points") or str(data_path("fuel_points.csv"))
    return curves_mod.fit_all(curves_mod.load_fuel_points(path))


def _grid(cfg):
    path = _existing(cfg["inputs"].get("grid"), "grid") or str(data_path("grid.csv"))
    return em.load_grid(path)


def _labels(cfg, key: str, default: str):
    path = _existing(cfg["inputs"].get(key), key) or str(data_path(default))
    return read_label_list(path)


def _ledger_rows(cfg) -> list[em.LedgerRow]:
    """Rows from a schedule run when ``--schedule`` is given, otherwise from a summary ledger."""
    if cfg["inputs"].get("schedule"):
        return _pipeline(cfg).ledger
    path = _existing(cfg["inputs"].get("ledger"), "ledger") or str(data_path("country_ledger.csv"))
    return em.load_country_ledger(path, cfg["_params"])


def _pipeline(cfg):
    path = _existing(cfg["inputs"]["schedule"], "schedule")
    with open(path, newline="", encoding="utf-8") as fh:
        return run_pipeline(
            fh,
            _registry(cfg),
            _curves(cfg),
            _grid(cfg),
            model_set=cfg["models"],
            ambiguous=_labels(cfg, "ambiguous", "ambiguous_labels.txt"),
            uncommon=_labels(cfg, "uncommon", "uncommon_models.txt"),
            params=cfg["_params"],
            workers=cfg["workers"],
        )


# --------------------------------------------------------------------------
# outputs


class Outputs:
    def __init__(self, cfg):
        self.cfg = cfg
        self.files: dict[str, str] = {}

    def table(self, stem: str, rows: Sequence[Mapping], columns: Sequence[str]) -> None:
        if self.cfg["format"] == "json":
            self.files[f"{stem}.json"] = render_json([{c: r.get(c) for c in columns} for r in rows], _public(self.cfg))
        else:
            self.files[f"{stem}.csv"] = render_csv(rows, columns, _public(self.cfg))

    def document(self, name: str, payload) -> None:
        self.files[name] = render_json(payload, _public(self.cfg))

    def flush(self) -> list[Path]:
        out_dir = Path(self.cfg["out_dir"])
        written = []
        for name, text in self.files.items():
            write_atomic(out_dir / name, text)
            written.append(out_dir / name)
        return written


def _ledger_dicts(rows) -> list[dict]:
    return [
        {
            "country": r.country,
            "continent": r.continent,
            "intensity_g_per_kwh": r.intensity_g_per_kwh,
            "flights": r.flights,
            "miles": r.miles,
            "fuel_emissions_kg": r.fuel_emissions_kg,
            "electric_energy_wh": r.electric_energy_wh,
            "electric_emissions_kg": r.electric_emissions_kg,
            "savings_kg": r.savings_kg,
            "tipping_g_per_kwh": r.tipping_g_per_kwh,
            "classification": r.classification,
        }
        for r in rows
    ]


LEDGER_COLUMNS = (
    "country", "continent", "intensity_g_per_kwh", "flights", "miles", "fuel_emissions_kg",
    "electric_energy_wh", "electric_emissions_kg", "savings_kg", "tipping_g_per_kwh", "classification",
)
CONTINENT_COLUMNS = ("continent", "group", "countries", "miles", "mean_intensity_g_per_kwh", "savings_kg", "savings_per_mile")
FIG3B_COLUMNS = ("country", "intensity_g_per_kwh", "ln_miles", "savings_kg", "classification")


def _continent_dicts(summary: em.LedgerSummary) -> list[dict]:
    rows = []
    for name, c in summary.continents.items():
        for group in ("aggregate", "clean", "dirty"):
            g = getattr(c, group)
            rows.append(
                {
                    "continent": name,
                    "group": group,
                    "countries": g.countries,
                    "miles": g.miles,
                    "mean_intensity_g_per_kwh": g.mean_intensity_g_per_kwh,
                    "savings_kg": g.savings_kg,
                    "savings_per_mile": g.savings_per_mile,
                }
            )
    rows.append(
        {"continent": "World", "group": "net", "countries": sum(c.aggregate.countries for c in summary.continents.values()),
         "miles": summary.miles, "mean_intensity_g_per_kwh": None, "savings_kg": summary.net_savings_kg,
         "savings_per_mile": summary.net_savings_kg / summary.miles if summary.miles else None}
    )
    return rows


# --------------------------------------------------------------------------
# subcommands


def cmd_exceedance(cfg, out: Outputs) -> str:
    params, kind = cfg["_params"], cfg["limit"]
    rows = []
    for m in _registry(cfg).models:
        ex = prop.reserve_stress(m, params, cfg["reserve_factor"], kind)
        try:
            dens = prop.requisite_density(m, params.replace(), kind) * (1 + cfg["reserve_factor"])
        except prop.StructuralImpossibility:
            dens = None
        rows.append(
            {"code": m.code, "category": m.category.value, "battery_mass_kg": ex.battery_mass_kg,
             "landing_mass_kg": ex.landing_mass_kg, "limit_kind": ex.limit_kind.value, "ratio": ex.ratio,
             "battery_share": ex.battery_share, "requisite_density_wh_kg": dens}
        )
    out.table("exceedance", rows, ("code", "category", "battery_mass_kg", "landing_mass_kg", "limit_kind",
                                   "ratio", "battery_share", "requisite_density_wh_kg"))
    above = sum(r["ratio"] > 1.0 for r in rows)
    return f"{len(rows)} models, {above} above {kind} limit"


def cmd_density(cfg, out: Outputs) -> str:
    params, kind = cfg["_params"], cfg["limit"]
    reg = _registry(cfg)
    values = {m.code: prop.requisite_density(m, params, kind) for m in reg.models}
    rows = [
        {"code": m.code, "category": m.category.value, "limit_kind": kind,
         "requisite_density_wh_kg": values[m.code],
         "increase_pct": 100.0 * (values[m.code] / params.battery_density_wh_per_kg - 1)}
        for m in reg.models
    ]
    summary = category_summary(reg, values)
    rows += [{"code": f"mean:{k}", "category": k, "limit_kind": kind, "requisite_density_wh_kg": v,
              "increase_pct": 100.0 * (v / params.battery_density_wh_per_kg - 1)} for k, v in summary.items()]
    out.table("density", rows, ("code", "category", "limit_kind", "requisite_density_wh_kg", "increase_pct"))
    return f"fleet mean requisite density ({kind}): {summary['overall']:.2f} Wh/kg"


def cmd_sensitivity(cfg, out: Outputs) -> str:
    rows = [
        {"code": r.code, "parameter": r.parameter, "base_ratio": r.base_ratio, "new_ratio": r.new_ratio,
         "relative_change_pct": r.relative_change_pct}
        for r in prop.fleet_sensitivity(_registry(cfg).models, cfg["_params"])
    ]
    out.table("sensitivity", rows, ("code", "parameter", "base_ratio", "new_ratio", "relative_change_pct"))
    return f"{len(rows)} sensitivity rows"


def cmd_ingest(cfg, out: Outputs) -> str:
    path = _existing(cfg["inputs"].get("schedule"), "schedule")
    if not path:
        raise InputError("ingest requires --schedule")
    with open(path, newline="", encoding="utf-8") as fh:
        records, diags = ingest(fh)
    grid = set(_grid(cfg))
    _, stats = filter_commercial(
        records, _registry(cfg), _labels(cfg, "ambiguous", "ambiguous_labels.txt"),
        _labels(cfg, "uncommon", "uncommon_models.txt"), grid=grid, threshold_nm=cfg["_params"].short_haul_nm,
    )
    if not stats.balances():
        raise InvariantViolation(f"filter stats do not balance: {stats.as_dict()}")
    out.document("filter_stats.json", {**stats.as_dict(), "rows": len(records), "malformed_rows": len(diags)})
    out.table("diagnostics", [{"line": d.line, "record_id": d.record_id, "message": d.message} for d in diags],
              ("line", "record_id", "message"))
    return f"{len(records)} records, {len(diags)} diagnostics, {stats.kept} flights kept"


def cmd_emissions(cfg, out: Outputs) -> str:
    if cfg["inputs"].get("schedule"):
        result = _pipeline(cfg)
        rows, summary = result.ledger, result.summary
        dep = result.deployment
        out.document("filter_stats.json", {
            **result.stats.as_dict(),
            "malformed_rows": len(result.diagnostics),
            "short_haul_flights": dep.flights,
            "candidate_short_haul_flights": dep.set_flights,
            "candidate_share": dep.share_of_flights,
        })
        out.table("no_grid_data", [{"record_id": r, "origin_country": c} for r, c in result.no_grid_rows],
                  ("record_id", "origin_country"))
        out.table("tipping", [{"country": r.country, "tipping_g_per_kwh": r.tipping_g_per_kwh} for r in rows],
                  ("country", "tipping_g_per_kwh"))
    else:
        rows = _ledger_rows(cfg)
        summary = em.aggregate(rows)
    out.table("country_emissions", _ledger_dicts(rows), LEDGER_COLUMNS)
    out.table("continent_summary", _continent_dicts(summary), CONTINENT_COLUMNS)
    out.table("fig3b", em.fig3b_rows(rows), FIG3B_COLUMNS)
    _curve_table(cfg, out)
    return f"global net savings: {summary.net_savings_kg:,.0f} kg CO2e over {len(rows)} countries"


def cmd_tipping(cfg, out: Outputs) -> str:
    if cfg["fuel_emissions_kg"] is not None or cfg["energy_wh"] is not None:
        if cfg["fuel_emissions_kg"] is None or cfg["energy_wh"] is None:
            raise InputError("--fuel-emissions-kg and --energy-wh must be given together")
        tp = em.tipping_from_totals(cfg["fuel_emissions_kg"], cfg["energy_wh"])
        out.table("tipping", [{"country": "", "tipping_g_per_kwh": tp}], ("country", "tipping_g_per_kwh"))
        return f"tipping point: {tp:.2f} g/kWh"
    rows = _ledger_rows(cfg)
    out.table("tipping", [{"country": r.country, "tipping_g_per_kwh": r.tipping_g_per_kwh} for r in rows],
              ("country", "tipping_g_per_kwh"))
    return (f"closed-form tipping point: {cfg['_params'].closed_form_tipping_g_per_kwh:.2f} g/kWh; "
            f"{len(rows)} countries")


def cmd_scenarios(cfg, out: Outputs) -> str:
    fraction = cfg["fraction"]
    rows = _ledger_rows(cfg)
    results = [em.improvement_scenario(r, fraction) for r in em.rank(rows, "scenario_absolute", fraction)]
    out.table("scenario", [
        {"country": s.country, "improvement_fraction": s.improvement_fraction,
         "absolute_delta_kg": s.absolute_delta_kg, "relative_delta_pct": s.relative_delta_pct}
        for s in results
    ], ("country", "improvement_fraction", "absolute_delta_kg", "relative_delta_pct"))
    return f"{len(results)} scenario rows at {fraction:.0%}"


def cmd_rank(cfg, out: Outputs) -> str:
    rows = em.rank(_ledger_rows(cfg), cfg["key"], cfg["fraction"])
    if cfg["continent"]:
        rows = [r for r in rows if r.continent == cfg["continent"]]
    out.table("rank", [{"rank": i, **d} for i, d in enumerate(_ledger_dicts(rows), start=1)], ("rank",) + LEDGER_COLUMNS)
    return f"top by {cfg['key']}: {rows[0].country}" if rows else "no countries"


def _aggregate_country(entry: Mapping) -> tuple[em.CountryFlights, em.GridProfile]:
    totals = {code: (int(v["flights"]), float(v["miles"])) for code, v in entry["aircraft"].items()}
    cf = em.CountryFlights.from_totals(entry["country"], totals)
    return cf, em.GridProfile(entry["country"], entry.get("continent", ""), float(entry["intensity_g_per_kwh"]))


def cmd_decompose(cfg, out: Outputs) -> str:
    curves = _curves(cfg)
    if cfg["inputs"].get("schedule"):
        result = _pipeline(cfg)
        grid = _grid(cfg)
        pair = []
        for key in (cfg["a"], cfg["b"]):
            if key not in result.flights_by_country or key not in grid:
                raise InputError(f"country {key!r} has no candidate flights or grid profile")
            pair.append((result.flights_by_country[key], grid[key]))
    else:
        path = _existing(cfg["inputs"].get("aggregates"), "aggregates") or str(data_path("decomposition_pairs.json"))
        table = json.loads(Path(path).read_text(encoding="utf-8"))
        pair = []
        for key in (cfg["a"], cfg["b"]):
            if key not in table:
                raise InputError(f"country key {key!r} not in {path}")
            pair.append(_aggregate_country(table[key]))
    (a, ga), (b, gb) = pair
    res = em.decompose_pair(a, ga, b, gb, curves, cfg["_params"])
    out.document("decomposition.json", {
        "pair": list(res.pair),
        "gap_kg": res.gap_kg,
        "mirrored_intensity_g_per_kwh": res.mirrored_intensity_g_per_kwh,
        "contributions_kg": res.contributions_kg,
        "contributions_pct": res.contributions_pct,
        "steps_kg": res.steps_kg,
    })
    pct = res.contributions_pct
    return "shares: " + ", ".join(f"{k} {v:.1f}%" for k, v in pct.items())


def cmd_figdata(cfg, out: Outputs) -> str:
    rows = _ledger_rows(cfg)
    out.table("fig3b", em.fig3b_rows(rows), FIG3B_COLUMNS)
    _curve_table(cfg, out)
    return f"{len(rows)} countries"


def _curve_table(cfg, out: Outputs) -> None:
    out.table("curves", curves_mod.curve_rows(_curves(cfg).values(), cfg["_params"]), curves_mod.CURVE_COLUMNS)


def cmd_gen_corpus(cfg, out: Outputs) -> str:
    import io

    buf = io.StringIO()
    manifest = generate_corpus(
        buf, cfg["rows"], cfg["seed"], _registry(cfg), sorted(_grid(cfg)),
        model_set=cfg["models"],
        ambiguous_labels=sorted(_labels(cfg, "ambiguous", "ambiguous_labels.txt")),
        uncommon_models=sorted(_labels(cfg, "uncommon", "uncommon_models.txt")),
        threshold_nm=cfg["_params"].short_haul_nm,
    )
    out.files["schedule.csv"] = buf.getvalue()
    out.files["manifest.json"] = json.dumps(manifest, indent=2) + "\n"
    return f"{cfg['rows']} rows written (seed {cfg['seed']})"


COMMANDS = {
    "exceedance": cmd_exceedance,
    "density": cmd_density,
    "sensitivity": cmd_sensitivity,
    "ingest": cmd_ingest,
    "emissions": cmd_emissions,
    "tipping": cmd_tipping,
    "scenarios": cmd_scenarios,
    "rank": cmd_rank,
    "decompose": cmd_decompose,
    "figdata": cmd_figdata,
    "gen-corpus": cmd_gen_corpus,
}


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=".", type=Path, help="directory for output files")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--config", help="JSON file with 'parameters' and 'inputs' objects")
    common.add_argument("--print-config", action="store_true", help="print the resolved configuration and exit")
    common.add_argument("--aircraft", help="aircraft.csv (default: bundled)")
    common.add_argument("--fuel-points", dest="fuel_points", help="fuel_points.csv (default: bundled)")
    common.add_argument("--grid", help="grid.csv (default: bundled)")
    common.add_argument("--ambiguous", help="ambiguous-label deny-list")
    common.add_argument("--uncommon", help="uncommon-model deny-list")
    common.add_argument("--models", default=",".join(DEFAULT_MODEL_SET), help="comma-separated candidate models")
    common.add_argument("--workers", type=int, default=1)
    p = common.add_argument_group("model parameters")
    p.add_argument("--lhv", type=float)
    p.add_argument("--eta-fossil", dest="eta_fossil", type=float)
    p.add_argument("--eta-electric", dest="eta_electric", type=float)
    p.add_argument("--wh-per-mj", dest="wh_per_mj", type=float)
    p.add_argument("--density", type=float, help="battery energy density [Wh/kg]")
    p.add_argument("--pax-mass", dest="pax_mass", type=float)
    p.add_argument("--ci-fuel", dest="ci_fuel", type=float)
    p.add_argument("--threshold", type=float, help="short-haul threshold [nm]")
    p.add_argument("--dirty-grid", dest="dirty_grid", type=float, help="clean/dirty comparator [g/kWh]")

    ledger = argparse.ArgumentParser(add_help=False)
    ledger.add_argument("--schedule", help="schedule.csv; runs the full pipeline")
    ledger.add_argument("--ledger", help="per-country summary CSV (default: bundled country table)")

    parser = argparse.ArgumentParser(
        prog="shorthaul", description="Battery-electric feasibility and grid-emissions accounting for short-haul flights.",
        epilog="exit codes: 0 success, 2 input or validation error, 3 internal invariant violation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("exceedance", "density"):
        sp = sub.add_parser(name, help={"exceedance": "landing-limit exceedance per aircraft", "density": "battery density needed to fly each aircraft"}[name], parents=[common])
        sp.add_argument("--limit", choices=("mlw", "mtow"), default="mlw")
        if name == "exceedance":
            sp.add_argument("--reserve-factor", dest="reserve_factor", type=float, default=0.0)
    sub.add_parser("sensitivity", help="one-at-a-time 5%% perturbation table", parents=[common])
    sp = sub.add_parser("ingest", help="parse and filter a schedule, report funnel counts", parents=[common])
    sp.add_argument("--schedule", required=True)
    sub.add_parser("emissions", help="per-country ledger and continent roll-up", parents=[common, ledger])
    sp = sub.add_parser("tipping", help="break-even grid intensity", parents=[common, ledger])
    sp.add_argument("--fuel-emissions-kg", dest="fuel_emissions_kg", type=float)
    sp.add_argument("--energy-wh", dest="energy_wh", type=float)
    sp = sub.add_parser("scenarios", help="effect of a cleaner grid per country", parents=[common, ledger])
    sp.add_argument("--fraction", type=float, default=0.05)
    sp = sub.add_parser("rank", help="order countries by a ledger metric", parents=[common, ledger])
    sp.add_argument("--key", default="savings", choices=em.RANK_KEYS)
    sp.add_argument("--fraction", type=float, default=0.05)
    sp.add_argument("--continent")
    sp = sub.add_parser("decompose", help="attribute the savings gap between two countries", parents=[common, ledger])
    sp.add_argument("--a", required=True, help="reference country key (e.g. IN)")
    sp.add_argument("--b", required=True, help="country moved toward the reference (e.g. BR)")
    sp.add_argument("--aggregates", help="JSON of per-country aggregates (default: bundled)")
    sub.add_parser("figdata", help="scatter and curve tables for plotting", parents=[common, ledger])
    sp = sub.add_parser("gen-corpus", help="write a seeded synthetic schedule and its manifest", parents=[common])
    sp.add_argument("--rows", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        for key in ("limit", "reserve_factor", "fraction", "key", "continent", "a", "b", "rows",
                    "fuel_emissions_kg", "energy_wh"):
            cfg[key] = getattr(args, key, None)
        cfg["models"] = tuple(m.strip() for m in args.models.split(",") if m.strip())
        if args.print_config:
            print(json.dumps(_public(cfg), indent=2, default=str))
            return EXIT_OK
        out = Outputs(cfg)
        message = COMMANDS[args.command](cfg, out)
        out.flush()
    except InvariantViolation as exc:
        print(f"shorthaul: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InputError, ParameterError, RegistryError, SchemaError, curves_mod.CurveFitError,
            OSError, KeyError, ValueError, ZeroDivisionError) as exc:
        print(f"shorthaul: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(message)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
