import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from multicurve import cli
from multicurve.bootstrap import BootstrapConfig

TERM_SHEET = Path(__file__).resolve().parents[1] / "scripts" / "term_sheet_irs.json"


@pytest.fixture()
def run():
    runner = CliRunner()

    def go(*args):
        return runner.invoke(cli.main, [str(a) for a in args], catch_exceptions=False)

    return go


def test_build_writes_curves_deterministically(run, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("build", "--fixtures", "default", "--out", a).exit_code == 0
    assert run("build", "--fixtures", "default", "--out", b).exit_code == 0
    names = sorted(p.name for p in a.glob("*.csv"))
    assert names == ["bootstrap_report.csv", "mxn_disc_mxn_coll.csv", "mxn_disc_usd_coll.csv", "tiie28d.csv",
                     "usd_libor1m.csv", "usd_libor3m.csv", "usd_ois.csv"]
    for p in a.rglob("*.csv"):
        assert p.read_bytes() == (b / p.relative_to(a)).read_bytes(), p.name
    manifest = json.loads((a / "manifest.json").read_text())
    assert manifest["command"] == "build" and manifest["config"]["spread_bp"] == "29"
    assert len(list((a / "daily_forwards").glob("*.csv"))) == 6


def test_eur_curve_only_when_asked(run, tmp_path):
    from multicurve.market_data import fixture_dir

    out = tmp_path / "o"
    r = run("build", "--fixtures", "default", "--eur-curve", fixture_dir() / "eur_usd_coll_curve.csv", "--out", out)
    assert r.exit_code == 0
    assert (out / "mxn_disc_eur_coll.csv").exists()


def test_no_inputs_is_a_usage_error(run, tmp_path):
    r = run("build", "--out", tmp_path / "x")
    assert r.exit_code == 2
    assert "no market inputs" in r.output


def test_par_table(run):
    r = run("par-table", "--fixtures", "default", "--tenors", "84d,1820D")
    assert r.exit_code == 0
    lines = r.output.splitlines()
    assert len(lines) == 3
    assert lines[1].startswith("84D,3.3200,") and lines[2].startswith("1820D,5.3610,")


def test_stress_rejects_bad_factors(run):
    assert run("stress", "--fixtures", "default", "--factors", "0").exit_code == 2
    assert run("stress", "--fixtures", "default", "--factors", "x").exit_code == 2


def test_stress_outputs(run, tmp_path):
    r = run("stress", "--fixtures", "default", "--factors", "1,2", "--tenors", "1820D", "--out", tmp_path)
    assert r.exit_code == 0
    scaled = (tmp_path / "scaled_spreads.csv").read_text().splitlines()
    row = next(line for line in scaled if line.startswith("1820D"))
    assert row.split(",")[2] == "2.0400"
    assert len((tmp_path / "stress_grid.csv").read_text().splitlines()) == 1 + 2 * 2


def test_price_term_sheet(run):
    r = run("price", "--fixtures", "default", TERM_SHEET)
    assert r.exit_code == 0
    out = dict(line.split(",", 1) for line in r.output.splitlines())
    assert out["pay_leg"] == "FIXED,,65 coupons,2015-06-01,2020-05-25"
    assert float(out["par_rate_pct"]) == pytest.approx(5.361, abs=1e-9)


def test_price_missing_curve(run, tmp_path):
    doc = json.loads(TERM_SHEET.read_text())
    doc["legs"]["receive"]["index"] = "JIBAR3M"
    p = tmp_path / "t.json"
    p.write_text(json.dumps(doc))
    assert run("price", "--fixtures", "default", p).exit_code == 4


def test_non_convergence_writes_report(run, tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "_config", lambda *a: BootstrapConfig(max_iter=1))
    out = tmp_path / "o"
    r = run("build", "--fixtures", "default", "--out", out)
    assert r.exit_code == 3
    assert (out / "bootstrap_report.csv").exists()
