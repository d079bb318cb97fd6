"""MXN discounting under different collateral agreements.

The core routine calibrates two curves at once: the MXN discount curve for
trades collateralized in USD and the TIIE 28d projection curve. TIIE IRSs
pin the forwards given a discount curve; USDMXN cross-currency basis swaps
pin the discount curve given the forwards. The two solves alternate until
neither curve moves.

From that pair the module derives discount curves for other collateral
regimes (none, MXN cash, a third currency) and compares the resulting par
swap rates.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .bootstrap import (
    BootstrapConfig,
    BootstrapReport,
    CompiledSwap,
    PillarResult,
    Unknown,
    _bisect_pillar,
    _cash_knots,
    cash_results,
    _fx0,
    _Pillar,
    _require,
    _sweep,
    _zero,
    bootstrap_libor1m,
    bootstrap_libor3m,
    bootstrap_ois_usd,
    xcs_env,
)
from .calendar_time import CalendarId, DayCount, RollConvention, Tenor, add_business_days, build_schedule
from .curves import CompositeCurve, Curve, ForwardCurveView, times_from
from .errors import DomainError, InputError, MulticurveError
from .instruments import LegKind, LegSpec, PricingContext, SwapSpec, instrument_from_quote, par_rate
from .market_data import InstrumentClass, MarketSnapshot, Quote, builtin_fixture, load_snapshot, fixture_dir

TIIE = "TIIE28D"
LIBOR1M = "USD_LIBOR_1M"


@dataclass(frozen=True)
class OvernightProxyConfig:
    """MXN overnight rate proxied as TIIE 28d forwards minus a constant spread.

    A strong assumption: the historical spread is not stable, and the
    default of 29bp is only a representative level.
    """

    spread_bp: float = 29.0

    def __post_init__(self):
        if not math.isfinite(self.spread_bp):
            raise InputError("spread_bp must be finite")


@dataclass(frozen=True)
class MxnCurveSet:
    disc_usd_coll: Curve
    tiie_fwd: ForwardCurveView
    disc_no_coll: Curve
    disc_mxn_coll: Curve
    disc_abc_coll: Mapping[str, object] = field(default_factory=dict)
    fixings: Mapping = field(default_factory=dict)

    def discount(self, regime: str):
        r = regime.upper()
        if r == "USD":
            return self.disc_usd_coll
        if r in ("NONE", "NO_COLL", "NO COLL"):
            return self.disc_no_coll
        if r == "MXN":
            return self.disc_mxn_coll
        if r in self.disc_abc_coll:
            return self.disc_abc_coll[r]
        raise InputError(f"no MXN discount curve for collateral {regime!r}")

    @property
    def regimes(self) -> list[str]:
        return ["USD", "NONE", "MXN"] + sorted(self.disc_abc_coll)


# ---------------------------------------------------------------------------
# Dual bootstrap


def _fixed_mxn_leg(spec: SwapSpec, k: float) -> SwapSpec:
    """cnXCS whose MXN floating leg is replaced by a fixed leg paying ``k``."""
    flt = spec.receive_leg
    fixed = LegSpec(LegKind.FIXED, flt.schedule, k, None, flt.notional, notional_exchange=True, currency="MXN")
    return replace(spec, receive_leg=fixed)


def dual_bootstrap_mxn(
    quotes: MarketSnapshot,
    usd_disc,
    libor1m: ForwardCurveView,
    cfg: BootstrapConfig = BootstrapConfig(),
) -> tuple[Curve, ForwardCurveView, BootstrapReport]:
    """Joint calibration of the USD-collateral MXN discount curve and TIIE 28d.

    Both curves carry knots at the MXN deposit end dates and at the IRS
    maturities. The short end of both is set by the deposits. The k-th
    cnXCS (by maturity) solves the k-th discount pillar.
    """
    as_of = quotes.as_of
    cash = _require(quotes.select(InstrumentClass.CASH), "MXN cash")
    irs_q = _require(quotes.select(InstrumentClass.IRS, TIIE), "TIIE IRS")
    xcs_q = _require(quotes.select(InstrumentClass.CNXCS), "USDMXN cnXCS")
    if len(irs_q) != len(xcs_q):
        raise InputError(f"{len(irs_q)} IRS quotes against {len(xcs_q)} cnXCS quotes; one of each per pillar")
    fx0 = _fx0(quotes)
    cash_k = _cash_knots(cash, as_of)
    irs = sorted((instrument_from_quote(q, as_of, 1.0, "USD") for q in irs_q), key=lambda s: s.maturity)
    xcs = sorted((instrument_from_quote(q, as_of, 1.0, "USD", fx0) for q in xcs_q), key=lambda s: s.maturity)
    dates = [row[0] for row in cash_k] + [s.maturity for s in irs]
    if len(set(dates)) != len(dates) or sorted(dates) != dates:
        raise InputError("IRS maturities collide with or precede the deposit section")
    n0 = len(cash_k)
    short = [_zero(p, as_of, d, cfg.time_dc) for d, p, *_ in cash_k]
    F = Unknown("F", as_of, dates, cfg.interp, cfg.time_dc, "TIIE 28D projection")
    D = Unknown("D", as_of, dates, cfg.interp, cfg.time_dc, "MXN discount (USD collateral)")
    k_irs = [s.pay_leg.rate_or_spread for s in irs]
    zF = np.array(short + [k + cfg.epsilon0 for k in k_irs])
    zD = np.array(short + k_irs)
    state = {"F": zF, "D": zD}
    env = xcs_env(quotes, D, F, usd_disc, libor1m)
    tol = cfg.tol_df * 1e-4

    # seed the discount pillars with the MXN leg fixed at the IRS rate
    seed_p = [_Pillar(n0 + j, CompiledSwap(_fixed_mxn_leg(s, k_irs[j]), env), zD[n0 + j], s.instrument_id)
              for j, s in enumerate(xcs)]
    for _ in range(cfg.max_iter):
        mx, _s = _sweep(seed_p, state, "D", lambda p: _bisect_pillar(p, state, "D", tol))
        if mx <= cfg.tol_zero:
            break

    irs_p = [_Pillar(n0 + j, CompiledSwap(s, env), 0.0, s.instrument_id) for j, s in enumerate(irs)]
    xcs_p = [_Pillar(n0 + j, CompiledSwap(s, env), 0.0, s.instrument_id) for j, s in enumerate(xcs)]
    stable = False
    sweeps = 0
    for sweeps in range(1, cfg.max_iter + 1):
        m1, _ = _sweep(irs_p, state, "F", lambda p: _bisect_pillar(p, state, "F", tol))
        m2, _ = _sweep(xcs_p, state, "D", lambda p: _bisect_pillar(p, state, "D", tol))
        if max(m1, m2) <= cfg.tol_zero:
            stable = True
            break

    fcurve, dcurve = F.curve(zF), D.curve(zD)
    rows = cash_results(cash_k, fcurve)
    for fam in (irs_p, xcs_p):
        for p in fam:
            rows.append(PillarResult(p.iid, dates[p.index], p.swap(state) / p.swap.notional, p.iterations))
    worst = max(abs(r.residual) for r in rows)
    report = BootstrapReport(tuple(rows), stable and worst <= cfg.tol_df, worst, sweeps, "MXN dual")
    fwd = ForwardCurveView(fcurve, "28D", DayCount.ACT_360, TIIE)
    return dcurve, fwd, report


def implied_df_from_fx_forward(fx_spot: float, outright: float, usd_df: float) -> float:
    """MXN discount factor (USD collateral) implied by a USDMXN outright."""
    if not (fx_spot > 0 and outright > 0 and usd_df > 0):
        raise DomainError("spot, outright and USD discount factor must be positive")
    return usd_df * fx_spot / outright


# ---------------------------------------------------------------------------
# Other collateral regimes


def derive_no_collateral_discount(tiie_fwd: ForwardCurveView) -> Curve:
    """Uncollateralized MXN discounting on the TIIE pseudo-discount curve."""
    return tiie_fwd.underlying


def tiie_grid(valuation, horizon) -> list:
    """Rolled 28-day TIIE grid from MXN spot out past ``horizon``."""
    start = add_business_days(valuation, 1, CalendarId.MX)
    n = max(1, math.ceil(((horizon - start).days + 1) / 28))
    sch = build_schedule(valuation, 1, Tenor(28 * n, "D"), "28D", CalendarId.MX, RollConvention.FOLLOWING,
                         DayCount.ACT_360)
    return [sch.start] + list(sch.coupon_ends)


def derive_mxn_collateral_discount(
    tiie_fwd: ForwardCurveView, cfg: OvernightProxyConfig = OvernightProxyConfig()
) -> Curve:
    """MXN-collateral discounting from TIIE forwards less a fixed spread.

    The shifted forwards are compounded period by period on the 28-day TIIE
    grid (the first period runs from the valuation date to spot) and the
    resulting discount factors become the knots of a new zero curve.
    """
    under = tiie_fwd.underlying
    val = under.valuation_date
    grid = tiie_grid(val, max(under.pillar_dates))
    pts = [val] + grid
    p = under.dfs(pts)
    tau = np.array([(b - a).days for a, b in zip(pts, pts[1:])]) / 360.0
    fwd = (p[:-1] / p[1:] - 1.0) / tau
    s = cfg.spread_bp * 1e-4
    dfs = np.cumprod(1.0 / (1.0 + tau * (fwd - s)))
    x = times_from(val, grid, under.time_dc)
    z = -np.log(dfs) / x
    method = getattr(under, "method", None) or "NATURAL_CUBIC_ON_YIELD"
    return Curve(val, tuple(grid), tuple(z), method, under.time_dc, f"MXN discount (MXN collateral, {cfg.spread_bp:g}bp)")


def derive_abc_collateral_discount(usd_df_abc_coll, mxn_df_usd_coll, usd_df_usd_coll):
    """MXN discounting for collateral in a third currency ABC.

    ``P_MXN^ABC = P_USD^ABC * P_MXN^USD / P_USD^USD``, kept as an exact
    product rather than re-knotted. When ABC is USD the ratio cancels and
    the USD-collateral curve comes back unchanged.
    """
    curves = (usd_df_abc_coll, mxn_df_usd_coll, usd_df_usd_coll)
    if len({c.valuation_date for c in curves}) != 1:
        raise InputError("collateral transform needs a common valuation date")
    if usd_df_abc_coll is usd_df_usd_coll:
        return mxn_df_usd_coll
    return CompositeCurve(((usd_df_abc_coll, 1.0), (mxn_df_usd_coll, 1.0), (usd_df_usd_coll, -1.0)),
                          "MXN discount (ABC collateral)")


def build_curve_set(
    disc_usd_coll: Curve,
    tiie_fwd: ForwardCurveView,
    proxy: OvernightProxyConfig = OvernightProxyConfig(),
    abc: Mapping[str, tuple[object, object]] | None = None,
    fixings: Mapping = (),
) -> MxnCurveSet:
    """Curve set from the dual-bootstrap output.

    ``abc`` maps a collateral currency to ``(P_USD^ABC, P_USD^USD)``.
    """
    derived = {ccy: derive_abc_collateral_discount(a, disc_usd_coll, u) for ccy, (a, u) in (abc or {}).items()}
    return MxnCurveSet(disc_usd_coll, tiie_fwd, derive_no_collateral_discount(tiie_fwd),
                       derive_mxn_collateral_discount(tiie_fwd, proxy), derived, dict(fixings))


# ---------------------------------------------------------------------------
# Tables


def tiie_irs(tenor: str, as_of, collateral: str = "USD") -> SwapSpec:
    q = Quote(InstrumentClass.IRS, TIIE, tenor, 0.0, "tiie_irs")
    return instrument_from_quote(q, as_of, 1.0, collateral)


def par_rates(curve_set: MxnCurveSet, tenors: Sequence[str], regimes: Sequence[str] | None = None) -> dict:
    """Par TIIE IRS rate per (tenor, regime), as decimals."""
    regimes = list(regimes or curve_set.regimes)
    disc = {("MXN", r): curve_set.discount(r) for r in regimes}
    ctx = PricingContext(disc, {TIIE: curve_set.tiie_fwd}, curve_set.fixings)
    as_of = curve_set.tiie_fwd.valuation_date
    out = {}
    for t in tenors:
        for r in regimes:
            out[(t, r)] = par_rate(tiie_irs(t, as_of, r), ctx)
    return out


@dataclass(frozen=True)
class ComparisonRow:
    tenor: str
    par: Mapping[str, float]      # regime -> decimal
    diff_bp: Mapping[str, float]  # regime -> bp vs USD


@dataclass(frozen=True)
class ComparisonTable:
    regimes: tuple[str, ...]
    rows: tuple[ComparisonRow, ...]

    def to_csv(self) -> str:
        """Display columns (4 dp percent, 2 dp bp) each followed by its raw value."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        others = [r for r in self.regimes if r != "USD"]
        head = ["tenor"]
        for r in self.regimes:
            head += [_col(r), _col(r) + "_raw"]
        for r in others:
            head += [_col(r) + "_diff_bp", _col(r) + "_diff_bp_raw"]
        w.writerow(head)
        for row in self.rows:
            vals = [row.tenor]
            for r in self.regimes:
                vals += [f"{row.par[r] * 100:.4f}", _raw(row.par[r] * 100)]
            for r in others:
                vals += [_bp(row.diff_bp[r]), _raw(row.diff_bp[r])]
            w.writerow(vals)
        return buf.getvalue()


def _col(regime: str) -> str:
    return "no_coll" if regime == "NONE" else regime.lower()


def _raw(x: float) -> str:
    return f"{x:.12g}"


def _bp(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def collateral_comparison_table(
    curve_set: MxnCurveSet, tenors: Sequence[str], usd_ctx: PricingContext | None = None
) -> ComparisonTable:
    """Par rates under every collateral regime and their bp gaps to USD."""
    if usd_ctx is not None and usd_ctx.fixings:
        curve_set = replace(curve_set, fixings={**dict(usd_ctx.fixings), **dict(curve_set.fixings)})
    regimes = tuple(curve_set.regimes)
    pr = par_rates(curve_set, tenors, regimes)
    rows = []
    for t in tenors:
        par = {r: pr[(t, r)] for r in regimes}
        diff = {r: (par[r] - par["USD"]) * 1e4 for r in regimes if r != "USD"}
        rows.append(ComparisonRow(t, par, diff))
    return ComparisonTable(regimes, tuple(rows))


@dataclass(frozen=True)
class StressCell:
    factor: float
    tenor: str
    regime: str
    diff_bp: float | None
    error: str = ""


@dataclass(frozen=True)
class StressGrid:
    cells: tuple[StressCell, ...]

    def value(self, factor: float, tenor: str, regime: str = "NONE") -> float | None:
        for c in self.cells:
            if c.factor == factor and c.tenor == tenor and c.regime == regime:
                return c.diff_bp
        raise KeyError((factor, tenor, regime))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "tenor", "regime", "diff_bp", "diff_bp_raw", "error"])
        for c in self.cells:
            shown = raw = ""
            if c.diff_bp is not None:
                shown, raw = _bp(c.diff_bp), _raw(c.diff_bp)
            w.writerow([f"{c.factor:g}", c.tenor, _col(c.regime), shown, raw, c.error])
        return buf.getvalue()


def _usd_curves(usd_ctx: PricingContext):
    return usd_ctx.discount_curve("USD", "USD"), usd_ctx.forward(LIBOR1M)


def xcs_stress(
    base_quotes: MarketSnapshot,
    factors: Sequence[float],
    usd_ctx: PricingContext,
    cfg: BootstrapConfig = BootstrapConfig(),
    tenors: Sequence[str] | None = None,
    regimes: Sequence[str] = ("NONE", "MXN"),
    proxy: OvernightProxyConfig = OvernightProxyConfig(),
    workers: int | None = None,
) -> StressGrid:
    """Recalibrate with every cnXCS spread scaled by ``r`` and report par gaps.

    A failed calibration for one factor is recorded in its cells and the
    remaining factors still run.
    """
    for r in factors:
        if not (0.0 < r <= 2.0):
            raise InputError(f"stress factor {r} outside (0, 2]")
    usd_disc, l1m = _usd_curves(usd_ctx)
    tenors = list(tenors or [q.tenor for q in base_quotes.select(InstrumentClass.IRS, TIIE)])

    def one(r: float) -> list[StressCell]:
        try:
            snap = base_quotes.scaled(InstrumentClass.CNXCS, r)
            D, F, rep = dual_bootstrap_mxn(snap, usd_disc, l1m, cfg)
            if not rep.converged:
                raise MulticurveError(f"dual bootstrap did not converge (worst residual {rep.worst_residual:.2e})")
            cs = build_curve_set(D, F, proxy, fixings=snap.fixings)
            pr = par_rates(cs, tenors, ["USD", *regimes])
            return [StressCell(r, t, g, (pr[(t, g)] - pr[(t, "USD")]) * 1e4) for t in tenors for g in regimes]
        except MulticurveError as err:
            return [StressCell(r, t, g, None, str(err)) for t in tenors for g in regimes]

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(one, factors))
    else:
        parts = [one(r) for r in factors]
    return StressGrid(tuple(c for part in parts for c in part))


# ---------------------------------------------------------------------------
# Full pipeline


@dataclass(frozen=True)
class PipelineResult:
    ois: Curve
    libor3m: ForwardCurveView
    libor1m: ForwardCurveView
    curve_set: MxnCurveSet
    reports: Mapping[str, BootstrapReport]
    snapshots: Mapping[str, MarketSnapshot]
    seconds: float

    @property
    def usd_ctx(self) -> PricingContext:
        return PricingContext({("USD", "USD"): self.ois},
                              {"USD_LIBOR_3M": self.libor3m, LIBOR1M: self.libor1m})


def load_pipeline_snapshots(fixtures: str | Path | None = None, mxn: str = "mxn_tiie_xcs") -> dict[str, MarketSnapshot]:
    base = Path(fixtures) if fixtures else fixture_dir()
    names = {"ois": "usd_ois", "libor3m": "usd_libor3m", "libor1m": "usd_libor1m_ts", "mxn": mxn}
    return {k: load_snapshot(base / f"{v}.csv") for k, v in names.items()}


def run_pipeline(
    snapshots: Mapping[str, MarketSnapshot] | None = None,
    cfg: BootstrapConfig = BootstrapConfig(),
    proxy: OvernightProxyConfig = OvernightProxyConfig(),
    eur_curve=None,
    with_eur: bool = True,
) -> PipelineResult:
    """OIS, LIBOR 3m, LIBOR 1m, then the MXN dual bootstrap and derived curves.

    ``eur_curve`` is the USD discount curve under EUR collateral; the bundled
    fixture is used when it is omitted and ``with_eur`` is set.
    """
    t0 = time.perf_counter()
    snaps = dict(snapshots or load_pipeline_snapshots())
    ois, r_ois = bootstrap_ois_usd(snaps["ois"], cfg, with_report=True)
    l3, r3 = bootstrap_libor3m(snaps["libor3m"], ois, cfg, with_report=True)
    l1, r1 = bootstrap_libor1m(snaps["libor1m"], ois, l3, cfg, with_report=True)
    D, F, rd = dual_bootstrap_mxn(snaps["mxn"], ois, l1, cfg)
    abc = {}
    if eur_curve is None and with_eur:
        eur_curve = builtin_fixture("eur_usd_coll_curve")
    if eur_curve is not None:
        abc["EUR"] = (eur_curve, ois)
    cs = build_curve_set(D, F, proxy, abc, snaps["mxn"].fixings)
    reports = {"ois": r_ois, "libor3m": r3, "libor1m": r1, "mxn": rd}
    return PipelineResult(ois, l3, l1, cs, reports, snaps, time.perf_counter() - t0)
