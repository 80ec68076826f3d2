import json
import math
import subprocess
import sys

import pytest

from shorthaul.cli import EXIT_INPUT, EXIT_INVARIANT, EXIT_OK, main
from shorthaul.output import read_csv_rows


def run(args, tmp_path, capsys=None):
    code = main([*args, "--out-dir", str(tmp_path)])
    return code


def rows(path):
    return read_csv_rows(path)


def test_exceedance_defaults(tmp_path):
    assert run(["exceedance"], tmp_path) == EXIT_OK
    out = rows(tmp_path / "exceedance.csv")
    assert len(out) == 47
    assert all(float(r["ratio"]) > 1.0 for r in out)
    assert list(out[0]) == ["code", "category", "battery_mass_kg", "landing_mass_kg", "limit_kind", "ratio",
                            "battery_share", "requisite_density_wh_kg"]


def test_density_mtow_mean(tmp_path):
    assert run(["density", "--limit", "mtow"], tmp_path) == EXIT_OK
    out = {r["code"]: r for r in rows(tmp_path / "density.csv")}
    assert float(out["mean:overall"]["requisite_density_wh_kg"]) == pytest.approx(693.91, rel=0.01)


def test_missing_aircraft_file(tmp_path, capsys):
    code = run(["exceedance", "--aircraft", str(tmp_path / "nope.csv")], tmp_path)
    assert code == EXIT_INPUT
    assert "not found" in capsys.readouterr().err
    assert list(tmp_path.iterdir()) == []


def test_invalid_aircraft_file_leaves_no_output(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("code,category,seats,empty_kg,pax_kg,fuel_200nm_kg,mtow_kg,mlw_kg\nX,Turboprop,1,1,95,1,10,20\n")
    out = tmp_path / "out"
    assert main(["exceedance", "--aircraft", str(bad), "--out-dir", str(out)]) == EXIT_INPUT
    assert "MLW" in capsys.readouterr().err
    assert not out.exists()


def test_invalid_parameter_override(tmp_path, capsys):
    assert run(["exceedance", "--eta-fossil", "1.5"], tmp_path) == EXIT_INPUT
    assert "eta_fossil" in capsys.readouterr().err


def test_sensitivity_table(tmp_path):
    assert run(["sensitivity"], tmp_path) == EXIT_OK
    out = rows(tmp_path / "sensitivity.csv")
    assert len(out) == 47 * 5
    mlw = [float(r["relative_change_pct"]) for r in out if r["parameter"] == "mlw"]
    assert len(mlw) == 47 and all(v == pytest.approx(-4.7619, abs=1e-4) for v in mlw)


def test_scenarios_india(tmp_path):
    assert run(["scenarios", "--fraction", "0.05"], tmp_path) == EXIT_OK
    india = next(r for r in rows(tmp_path / "scenario.csv") if r["country"] == "India")
    assert float(india["absolute_delta_kg"]) == pytest.approx(17_662_915, rel=0.005)
    assert float(india["relative_delta_pct"]) == pytest.approx(19.27, abs=0.1)


def test_decompose_closure(tmp_path):
    assert run(["decompose", "--a", "IN", "--b", "BR"], tmp_path) == EXIT_OK
    doc = json.loads((tmp_path / "decomposition.json").read_text())
    data = doc["data"]
    assert data["pair"] == ["India", "Brazil"]
    assert math.fsum(data["contributions_kg"].values()) == pytest.approx(data["gap_kg"], rel=1e-6)
    assert doc["config"]["subcommand"] == "decompose"


def test_decompose_unknown_key(tmp_path, capsys):
    assert run(["decompose", "--a", "IN", "--b", "XX"], tmp_path) == EXIT_INPUT
    assert "XX" in capsys.readouterr().err


def test_tipping_from_totals(tmp_path, capsys):
    args = ["tipping", "--fuel-emissions-kg", "266321936", "--energy-wh", "504404944678"]
    assert run(args, tmp_path) == EXIT_OK
    assert "527.99" in capsys.readouterr().out
    assert run(["tipping", "--energy-wh", "1"], tmp_path) == EXIT_INPUT


def test_rank_and_figdata(tmp_path):
    assert run(["rank", "--key", "miles", "--continent", "Asia"], tmp_path) == EXIT_OK
    assert rows(tmp_path / "rank.csv")[0]["country"] == "India"
    assert run(["figdata"], tmp_path) == EXIT_OK
    assert len(rows(tmp_path / "fig3b.csv")) == 105
    assert len(rows(tmp_path / "curves.csv")) == 47


def test_emissions_ledger_mode(tmp_path):
    assert run(["emissions"], tmp_path) == EXIT_OK
    cont = rows(tmp_path / "continent_summary.csv")
    world = next(r for r in cont if r["continent"] == "World")
    assert float(world["savings_kg"]) == pytest.approx(917_826_722, abs=10)
    assert len(rows(tmp_path / "country_emissions.csv")) == 105


def test_csv_and_json_agree(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["exceedance", "--out-dir", str(a)]) == EXIT_OK
    assert main(["exceedance", "--out-dir", str(b), "--format", "json"]) == EXIT_OK
    csv_rows = rows(a / "exceedance.csv")
    json_rows = json.loads((b / "exceedance.json").read_text())["data"]
    assert len(csv_rows) == len(json_rows)
    for c, j in zip(csv_rows, json_rows):
        for key, value in j.items():
            if isinstance(value, float):
                assert float(c[key]) == pytest.approx(value, abs=5e-7)
            else:
                assert c[key] == str(value)


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"parameters": {"battery_density_wh_per_kg": 500, "pax_mass_kg": 80}}))
    assert main(["exceedance", "--config", str(cfg), "--density", "400", "--print-config"]) == EXIT_OK
    printed = json.loads(capsys.readouterr().out)
    p = printed["parameters"]
    assert p["battery_density_wh_per_kg"] == 400
    assert p["pax_mass_kg"] == 80
    assert p["lhv_mj_per_kg"] == 43.1
    assert list(tmp_path.iterdir()) == [cfg]


def test_config_unknown_parameter(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"parameters": {"warp_factor": 9}}))
    assert run(["exceedance", "--config", str(cfg)], tmp_path) == EXIT_INPUT
    assert "warp_factor" in capsys.readouterr().err


def test_config_embedded_in_output(tmp_path):
    run(["exceedance", "--density", "450"], tmp_path)
    first = (tmp_path / "exceedance.csv").read_text().splitlines()[0]
    assert first.startswith("# config: ")
    assert json.loads(first[len("# config: "):])["parameters"]["battery_density_wh_per_kg"] == 450


def _payload(path):
    """File content without the embedded run configuration."""
    if path.suffix == ".json":
        return json.loads(path.read_text())["data"]
    return path.read_text().split("\n", 1)[1]


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    assert main(["gen-corpus", "--rows", "30000", "--seed", "17", "--out-dir", str(d)]) == EXIT_OK
    return d


def test_emissions_pipeline_deterministic(corpus_dir, tmp_path):
    outs = []
    for workers in ("1", "4"):
        for rep in range(2):
            d = tmp_path / f"w{workers}_{rep}"
            assert main(["emissions", "--schedule", str(corpus_dir / "schedule.csv"), "--workers", workers,
                         "--out-dir", str(d)]) == EXIT_OK
            outs.append({p.name: _payload(p) for p in sorted(d.iterdir())})
    assert all(o == outs[0] for o in outs[1:])
    names = set(outs[0])
    assert {"country_emissions.csv", "continent_summary.csv", "fig3b.csv", "filter_stats.json",
            "no_grid_data.csv", "tipping.csv", "curves.csv"} <= names


def test_emissions_pipeline_counts_no_grid(corpus_dir, tmp_path):
    manifest = json.loads((corpus_dir / "manifest.json").read_text())
    assert main(["emissions", "--schedule", str(corpus_dir / "schedule.csv"), "--out-dir", str(tmp_path)]) == EXIT_OK
    stats = json.loads((tmp_path / "filter_stats.json").read_text())["data"]
    assert stats["excluded"] == manifest["excluded"]
    assert stats["excluded"]["no_grid_data"] > 0
    assert stats["kept"] + sum(stats["excluded"].values()) == stats["total_in"]
    assert len(rows(tmp_path / "no_grid_data.csv")) > 0


def test_ingest_subcommand(corpus_dir, tmp_path):
    assert main(["ingest", "--schedule", str(corpus_dir / "schedule.csv"), "--out-dir", str(tmp_path)]) == EXIT_OK
    stats = json.loads((tmp_path / "filter_stats.json").read_text())["data"]
    assert stats["rows"] == 30000 and stats["malformed_rows"] == 0


def test_schema_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "s.csv"
    bad.write_text("a,b\n1,2\n")
    out = tmp_path / "out"
    assert main(["emissions", "--schedule", str(bad), "--out-dir", str(out)]) == EXIT_INPUT
    assert "header" in capsys.readouterr().err
    assert not out.exists()


def test_invariant_violation_exit_code(corpus_dir, tmp_path, monkeypatch, capsys):
    monkeypatch.setattr("shorthaul.pipeline.FilterStats.balances", lambda self: False)
    out = tmp_path / "out"
    code = main(["emissions", "--schedule", str(corpus_dir / "schedule.csv"), "--out-dir", str(out)])
    assert code == EXIT_INVARIANT
    assert "invariant" in capsys.readouterr().err
    assert not out.exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "shorthaul.cli", "tipping", "--out-dir", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "527.89" in proc.stdout
