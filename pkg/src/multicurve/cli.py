"""Command-line front end: ``multicurve build | par-table | stress | price``.

Exit codes: 0 success, 2 usage or input error, 3 a calibration did not
converge, 4 an instrument needs a curve, fixing or FX rate that is missing.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import click

from .bootstrap import BootstrapConfig
from .calendar_time import DayCount
from .curves import ForwardCurveView, read_curve_csv, write_curve_csv, write_daily_forward_csv
from .errors import ContextError, MulticurveError
from .instruments import PricingContext, par_rate, pv, swap_from_dict
from .market_data import (
    InstrumentClass,
    MarketSnapshot,
    builtin_fixture,
    fixture_dir,
    load_snapshot,
)
from .mxn_multicurve import (
    OvernightProxyConfig,
    PipelineResult,
    collateral_comparison_table,
    load_pipeline_snapshots,
    run_pipeline,
    xcs_stress,
)
from .numerics import InterpMethod

EXIT_USAGE, EXIT_CONVERGENCE, EXIT_CONTEXT = 2, 3, 4


@dataclass
class RunManifest:
    command: str
    snapshots: dict[str, str] = field(default_factory=dict)
    config: dict[str, str] = field(default_factory=dict)
    out: str | None = None

    def write(self, directory: Path) -> None:
        (directory / "manifest.json").write_text(json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n")


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _role(snap: MarketSnapshot) -> str:
    """Which pipeline input a snapshot file is, judged by its quotes."""
    classes = {q.instrument_class for q in snap.quotes}
    if InstrumentClass.CNXCS in classes:
        return "mxn"
    if InstrumentClass.TENOR_SWAP in classes:
        return "libor1m"
    if InstrumentClass.OIS in classes:
        return "ois"
    if any(q.index == "USD_LIBOR_3M" for q in snap.quotes if q.instrument_class is InstrumentClass.IRS):
        return "libor3m"
    raise _Fail(EXIT_USAGE, f"cannot tell which curve snapshot {snap.name or snap.as_of} feeds")


def _snapshots(fixtures: str | None, snapshot_paths: tuple[str, ...], mxn_default: str = "mxn_tiie_xcs"):
    if not fixtures and not snapshot_paths:
        raise _Fail(EXIT_USAGE, "no market inputs: pass --fixtures default|DIR and/or --snapshot FILE")
    snaps: dict[str, MarketSnapshot] = {}
    sources: dict[str, str] = {}
    if fixtures:
        base = fixture_dir() if fixtures == "default" else Path(fixtures)
        if not base.is_dir():
            raise _Fail(EXIT_USAGE, f"fixture directory {base} does not exist")
        snaps.update(load_pipeline_snapshots(base, mxn_default))
        sources.update({k: str(base) for k in snaps})
    for path in snapshot_paths:
        s = load_snapshot(path)
        role = _role(s)
        snaps[role] = s
        sources[role] = str(path)
    missing = {"ois", "libor3m", "libor1m", "mxn"} - set(snaps)
    if missing:
        raise _Fail(EXIT_USAGE, f"missing market snapshots for: {', '.join(sorted(missing))}")
    return snaps, sources


def _config(interp: str | None, time_dc: str | None) -> BootstrapConfig:
    cfg = BootstrapConfig()
    if interp:
        cfg = replace(cfg, interp=InterpMethod.parse(interp))
    if time_dc:
        cfg = replace(cfg, time_dc=DayCount(time_dc.upper()))
    return cfg


def _pipeline(opts: dict, mxn_default: str = "mxn_tiie_xcs", need_converged: bool = True) -> tuple[PipelineResult, RunManifest]:
    snaps, sources = _snapshots(opts["fixtures"], opts["snapshot"], mxn_default)
    cfg = _config(opts["interp"], opts["time_dc"])
    proxy = OvernightProxyConfig(opts["spread_bp"])
    eur = read_curve_csv(opts["eur_curve"]) if opts["eur_curve"] else builtin_fixture("eur_usd_coll_curve")
    res = run_pipeline(snaps, cfg, proxy, eur)
    manifest = RunManifest(
        "", sources,
        {"interp": cfg.interp.value, "time_dc": cfg.time_dc.value, "spread_bp": f"{proxy.spread_bp:g}",
         "eur_curve": opts["eur_curve"] or "bundled"},
    )
    if need_converged:
        bad = [k for k, r in res.reports.items() if not r.converged]
        if bad:
            raise _NotConverged(res, manifest, bad)
    return res, manifest


class _NotConverged(_Fail):
    def __init__(self, res, manifest, which):
        super().__init__(EXIT_CONVERGENCE, f"calibration did not converge: {', '.join(which)}")
        self.res, self.manifest = res, manifest


def _write_report(res: PipelineResult, out: Path) -> None:
    lines = ["curve,instrument,pillar,residual,iterations"]
    for name, rep in res.reports.items():
        for row in rep.to_csv().splitlines()[1:]:
            lines.append(f"{name},{row}")
    (out / "bootstrap_report.csv").write_text("\n".join(lines) + "\n")


def _run(fn):
    """Map library errors onto exit codes."""
    try:
        fn()
    except _NotConverged as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(err.code)
    except _Fail as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(err.code)
    except ContextError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_CONTEXT)
    except (MulticurveError, ValueError, OSError) as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_USAGE)


def _market_options(f):
    for opt in reversed([
        click.option("--fixtures", default=None, help="'default' for the bundled quotes, or a directory of snapshot CSVs."),
        click.option("--snapshot", multiple=True, type=click.Path(), help="Snapshot CSV/JSON; overrides the matching fixture."),
        click.option("--interp", default=None, help="LINEAR_ON_YIELD, LINEAR_ON_LOG_DF or NATURAL_CUBIC_ON_YIELD."),
        click.option("--time-dc", default=None, help="Curve time axis day count (default ACT_360)."),
        click.option("--spread-bp", default=29.0, type=float, show_default=True, help="TIIE minus MXN overnight spread."),
        click.option("--eur-curve", default=None, type=click.Path(), help="USD discount curve under EUR collateral (curve CSV)."),
    ]):
        f = opt(f)
    return f


def _csv_list(text: str | None) -> list[str]:
    return [t.strip() for t in (text or "").split(",") if t.strip()]


@click.group()
def main() -> None:
    """Multi-curve calibration of MXN swaps under different collateral regimes."""


@main.command()
@_market_options
@click.option("--out", default="multicurve_out", type=click.Path(), show_default=True)
def build(out, **opts):
    """Calibrate every curve and write curve, forward and report CSVs."""

    def go():
        out_dir = Path(out)
        try:
            res, manifest = _pipeline(opts, need_converged=True)
        except _NotConverged as err:
            out_dir.mkdir(parents=True, exist_ok=True)
            _write_report(err.res, out_dir)
            raise
        out_dir.mkdir(parents=True, exist_ok=True)
        cs = res.curve_set
        curves = {
            "usd_ois": res.ois,
            "usd_libor3m": res.libor3m.underlying,
            "usd_libor1m": res.libor1m.underlying,
            "tiie28d": cs.tiie_fwd.underlying,
            "mxn_disc_usd_coll": cs.disc_usd_coll,
            "mxn_disc_mxn_coll": cs.disc_mxn_coll,
        }
        if opts["eur_curve"]:
            curves["mxn_disc_eur_coll"] = cs.disc_abc_coll["EUR"]
        fwd_dir = out_dir / "daily_forwards"
        fwd_dir.mkdir(exist_ok=True)
        for name, c in curves.items():
            write_curve_csv(c, out_dir / f"{name}.csv")
            write_daily_forward_csv(c, fwd_dir / f"{name}.csv")
        _write_report(res, out_dir)
        manifest.command, manifest.out = "build", str(out_dir)
        manifest.write(out_dir)
        click.echo(f"wrote {len(curves)} curves to {out_dir} ({res.seconds:.2f}s)")

    _run(go)


@main.command("par-table")
@_market_options
@click.option("--tenors", default=None, help="Comma-separated tenors, e.g. 84D,1820D (default: all IRS tenors).")
@click.option("--out", default=None, type=click.Path(), help="Write the CSV here instead of stdout.")
def par_table(tenors, out, **opts):
    """Par TIIE IRS rates per collateral regime and bp gaps to USD."""

    def go():
        res, _ = _pipeline(opts)
        wanted = [t.upper() for t in _csv_list(tenors)] or [q.tenor for q in res.snapshots["mxn"].select("IRS", "TIIE28D")]
        text = collateral_comparison_table(res.curve_set, wanted, res.usd_ctx).to_csv()
        _emit(text, out)

    _run(go)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command()
@_market_options
@click.option("--factors", default="0.1,0.5,0.7,1.0,1.5,2.0", show_default=True)
@click.option("--tenors", default=None)
@click.option("--workers", default=1, type=int, show_default=True)
@click.option("--out", default=None, type=click.Path(), help="Directory for stress_grid.csv and scaled_spreads.csv.")
def stress(factors, tenors, workers, out, **opts):
    """Scale every cnXCS spread by r and recompute the collateral gaps."""

    def go():
        try:
            rs = [float(x) for x in _csv_list(factors)]
        except ValueError:
            raise _Fail(EXIT_USAGE, f"--factors must be numbers, got {factors!r}") from None
        if not rs or any(not (0.0 < r <= 2.0) for r in rs):
            raise _Fail(EXIT_USAGE, "every stress factor must lie in (0, 2]")
        res, _ = _pipeline(opts, mxn_default="mxn_xcs_stress_base")
        base = res.snapshots["mxn"]
        wanted = [t.upper() for t in _csv_list(tenors)] or None
        grid = xcs_stress(base, rs, res.usd_ctx, _config(opts["interp"], opts["time_dc"]), wanted,
                          proxy=OvernightProxyConfig(opts["spread_bp"]), workers=workers)
        scaled = _scaled_table(base, rs)
        if out:
            d = Path(out)
            d.mkdir(parents=True, exist_ok=True)
            (d / "stress_grid.csv").write_text(grid.to_csv())
            (d / "scaled_spreads.csv").write_text(scaled)
            click.echo(f"wrote {d / 'stress_grid.csv'} and {d / 'scaled_spreads.csv'}")
        else:
            click.echo(grid.to_csv(), nl=False)
        if any(c.error for c in grid.cells):
            sys.exit(EXIT_CONVERGENCE)

    _run(go)


def _scaled_table(base: MarketSnapshot, factors: list[float]) -> str:
    """cnXCS spreads times each factor, in percent."""
    rows = ["tenor," + ",".join(f"r={r:g}" for r in factors)]
    for q in base.select(InstrumentClass.CNXCS):
        rows.append(q.tenor + "," + ",".join(f"{q.value * r * 100:.4f}" for r in factors))
    return "\n".join(rows) + "\n"


@main.command()
@_market_options
@click.argument("instrument", type=click.Path())
@click.option("--report-ccy", default=None, help="Currency of the reported PV (default: receive-leg currency).")
@click.option("--par/--no-par", default=True, show_default=True, help="Also solve the par rate or spread.")
def price(instrument, report_ccy, par, **opts):
    """PV of an instrument described by a JSON file."""

    def go():
        spec, extra_fix = swap_from_dict(json.loads(Path(instrument).read_text()))
        res, _ = _pipeline(opts)
        ctx = pricing_context(res)
        ctx = replace(ctx, fixings={**dict(ctx.fixings), **extra_fix})
        value = pv(spec, ctx, report_ccy)
        ccy = report_ccy or spec.receive_leg.currency
        click.echo(f"instrument,{spec.instrument_id}")
        for side, leg in (("pay", spec.pay_leg), ("receive", spec.receive_leg)):
            sch = leg.schedule
            click.echo(f"{side}_leg,{leg.kind.value},{leg.index or ''},{len(sch)} coupons,"
                       f"{sch.start.isoformat()},{sch.end.isoformat()}")
        click.echo(f"pv_{ccy.lower()},{value:.12g}")
        if par:
            click.echo(f"par_rate_pct,{par_rate(spec, ctx) * 100:.12g}")

    _run(go)


def pricing_context(res: PipelineResult) -> PricingContext:
    """All calibrated curves keyed for :func:`multicurve.instruments.pv`.

    Collateral ``NONE`` selects uncollateralized MXN discounting.
    """
    cs = res.curve_set
    disc = {
        ("USD", "USD"): res.ois,
        ("MXN", "USD"): cs.disc_usd_coll,
        ("MXN", "NONE"): cs.disc_no_coll,
        ("MXN", "MXN"): cs.disc_mxn_coll,
    }
    for ccy, c in cs.disc_abc_coll.items():
        disc[("MXN", ccy)] = c
    fwds = {
        "FEDFUNDS": ForwardCurveView(res.ois, "1D", index="FEDFUNDS"),
        "USD_LIBOR_3M": res.libor3m,
        "USD_LIBOR_1M": res.libor1m,
        "TIIE28D": cs.tiie_fwd,
    }
    mxn = res.snapshots["mxn"]
    return PricingContext(disc, fwds, dict(mxn.fixings), dict(mxn.fx_spot))


if __name__ == "__main__":
    main()
