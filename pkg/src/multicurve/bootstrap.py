"""Single-currency curve calibrations and the cross-currency spread bootstrap.

Every calibration follows one pattern. Knots sit at the maturities of the
input instruments. Cash deposits fix the short end directly. Each remaining
pillar is solved so that its own instrument prices to zero, sweeping over
the pillars until the zero rates stop moving (interpolated intermediate
dates depend on later pillars, so one pass is not enough).

Pricing inside the loops goes through :class:`CompiledSwap`, which
precomputes per instrument the interpolation weights from knot zero rates
to every date it needs. Each trial PV is then a few small matrix-vector
products. The public ``instruments`` module prices the same trades without
any of this and is what the repricing checks use.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .calendar_time import DayCount
from .curves import CompositeCurve, Curve, ForwardCurveView, accruals, times_from
from .errors import ConvergenceError, InputError
from .instruments import (
    LegKind,
    LegSpec,
    PricingContext,
    SwapSpec,
    cash_period,
    fixing_overrides,
    instrument_from_quote,
)
from .market_data import InstrumentClass, MarketSnapshot, Quote
from .numerics import InterpMethod, expand_bracket, find_root, interpolation_matrix

Date = dt.date


@dataclass(frozen=True)
class BootstrapConfig:
    tol_df: float = 1e-9
    tol_zero: float = 1e-12
    max_iter: int = 100
    interp: InterpMethod = InterpMethod.NATURAL_CUBIC_ON_YIELD
    epsilon0: float = 0.0
    time_dc: DayCount = DayCount.ACT_360

    def __post_init__(self):
        if not (self.tol_df > 0 and self.tol_zero > 0):
            raise InputError("tolerances must be positive")
        if self.max_iter < 1:
            raise InputError("max_iter must be at least 1")
        object.__setattr__(self, "interp", InterpMethod.parse(self.interp))
        object.__setattr__(self, "time_dc", DayCount(self.time_dc))


@dataclass(frozen=True)
class PillarResult:
    instrument_id: str
    pillar: Date
    residual: float
    iterations: int


@dataclass(frozen=True)
class BootstrapReport:
    pillars: tuple[PillarResult, ...]
    converged: bool
    worst_residual: float
    sweeps: int = 0
    label: str = ""

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instrument", "pillar", "residual", "iterations"])
        for p in self.pillars:
            w.writerow([p.instrument_id, p.pillar.isoformat(), f"{p.residual:.6e}", p.iterations])
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())

    def merged(self, other: "BootstrapReport", label: str = "") -> "BootstrapReport":
        return BootstrapReport(
            self.pillars + other.pillars,
            self.converged and other.converged,
            max(self.worst_residual, other.worst_residual),
            self.sweeps + other.sweeps,
            label or self.label,
        )


# ---------------------------------------------------------------------------
# Compiled pricing


class Unknown:
    """A curve under calibration: fixed knot dates, zero rates held in a state vector."""

    def __init__(self, name: str, valuation: Date, dates: Sequence[Date], method: InterpMethod,
                 time_dc: DayCount, label: str = ""):
        self.name = name
        self.valuation = valuation
        self.dates = tuple(dates)
        self.method = InterpMethod.parse(method)
        self.time_dc = DayCount(time_dc)
        self.x = times_from(valuation, self.dates, self.time_dc)
        self.label = label or name

    def curve(self, z: np.ndarray) -> Curve:
        return Curve(self.valuation, self.dates, tuple(float(v) for v in z), self.method, self.time_dc, self.label)


@dataclass(frozen=True)
class UnknownTimes:
    """Known curve times an unknown one, ``df = known.df * P_unknown``."""

    known: object
    unknown: Unknown


class _Const:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __call__(self, state):
        return self.v


class _Interp:
    __slots__ = ("name", "x", "W")

    def __init__(self, u: Unknown, dates):
        q = times_from(u.valuation, dates, u.time_dc)
        self.name = u.name
        self.x = q
        if len(u.dates) == 1:
            self.W = np.ones((len(q), 1))
        else:
            self.W = interpolation_matrix(u.method, u.x, q)

    def __call__(self, state):
        return np.exp(-self.x * (self.W @ state[self.name]))


class _Prod:
    __slots__ = ("c", "h")

    def __init__(self, c: np.ndarray, h: _Interp):
        self.c, self.h = c, h

    def __call__(self, state):
        return self.c * self.h(state)


def _handle(obj, dates):
    dates = list(dates)
    if isinstance(obj, Unknown):
        return _Interp(obj, dates)
    if isinstance(obj, UnknownTimes):
        return _Prod(obj.known.dfs(dates), _Interp(obj.unknown, dates))
    return _Const(obj.dfs(dates))


@dataclass
class PricingEnv:
    """Like :class:`PricingContext`, but curves may be :class:`Unknown`."""

    valuation: Date
    discount: Mapping[tuple[str, str], object]
    forwards: Mapping[str, object]
    fixings: Mapping[tuple[str, Date], float] = field(default_factory=dict)
    fx_spot: Mapping[str, float] = field(default_factory=dict)

    def fx(self, base: str, quote: str) -> float:
        return PricingContext(fx_spot=self.fx_spot).fx(base, quote)

    def disc(self, ccy: str, coll: str):
        try:
            return self.discount[(ccy, coll)]
        except KeyError:
            raise InputError(f"no discount curve for {ccy} collateralized in {coll}") from None

    def fwd(self, index: str):
        try:
            return self.forwards[index]
        except KeyError:
            raise InputError(f"no projection curve for {index}") from None


def _fwd_source(obj):
    """Underlying curve of a forward source (a view or a bare curve)."""
    return obj.underlying if isinstance(obj, ForwardCurveView) else obj


def _fwd_dc(obj) -> DayCount:
    return obj.fixing_dc if isinstance(obj, ForwardCurveView) else DayCount.ACT_360


class _CompiledLeg:
    def __init__(self, leg: LegSpec, env: PricingEnv, collateral: str):
        self.leg = leg
        self.kind = leg.kind
        self.N = leg.notional
        self.k = leg.rate_or_spread
        sch = leg.schedule
        disc = env.disc(leg.currency, collateral)
        self.alpha = np.asarray(sch.accruals)
        self.d_pay = _handle(disc, sch.pay_dates)
        self.exch = _handle(disc, [sch.start, sch.end]) if leg.notional_exchange else None
        self.telescoped = False
        self.fix_idx = self.fix_val = None
        if self.kind is LegKind.FIXED:
            return
        src = env.fwd(leg.index)
        under = _fwd_source(src)
        if self.kind is LegKind.OVERNIGHT_COMPOUNDED:
            self.telescoped = under is disc
            self.p_s = _handle(under, sch.coupon_starts)
            self.p_e = _handle(under, sch.coupon_ends)
            return
        periods = leg.sub_schedule if self.kind is LegKind.IBOR_COMPOUNDED else sch
        starts, ends = list(periods.coupon_starts), list(periods.coupon_ends)
        self.p_s = _handle(under, starts)
        self.p_e = _handle(under, ends)
        self.tau = accruals(starts, ends, _fwd_dc(src))
        fx = fixing_overrides(leg, starts, env.valuation, env.fixings)
        if fx:
            self.fix_idx = np.array(sorted(fx), int)
            self.fix_val = np.array([fx[i] for i in sorted(fx)])
        if self.kind is LegKind.IBOR_COMPOUNDED:
            self.beta = np.asarray(periods.accruals)
            sub_ends = list(periods.coupon_ends)
            self.cut = np.array([0] + [sub_ends.index(e) + 1 for e in sch.coupon_ends[:-1]], int)

    def forwards(self, state) -> np.ndarray:
        f = (self.p_s(state) / self.p_e(state) - 1.0) / self.tau
        if self.fix_idx is not None:
            f[self.fix_idx] = self.fix_val
        return f

    def pv(self, state) -> float:
        d = self.d_pay(state)
        kind = self.kind
        if kind is LegKind.FIXED:
            v = self.k * np.dot(self.alpha, d)
        elif kind is LegKind.IBOR:
            v = np.dot(self.alpha * (self.forwards(state) + self.k), d)
        elif kind is LegKind.OVERNIGHT_COMPOUNDED:
            if self.telescoped:
                v = np.sum(self.p_s(state) * d / self.p_e(state) - d) + self.k * np.dot(self.alpha, d)
            else:
                v = np.dot(self.p_s(state) / self.p_e(state) - 1.0 + self.k * self.alpha, d)
        else:
            g = np.multiply.reduceat(1.0 + self.beta * self.forwards(state), self.cut)
            v = np.dot(g - 1.0 + self.k * self.alpha, d)
        if self.exch is not None:
            p = self.exch(state)
            v += p[1] - p[0]
        return self.N * float(v)


class CompiledSwap:
    """PV of a :class:`SwapSpec` as a function of unknown-curve zero rates."""

    def __init__(self, spec: SwapSpec, env: PricingEnv, report_ccy: str | None = None):
        if any(leg.resets_notional for leg in spec.legs):
            raise InputError("mark-to-market swaps are not calibration instruments here")
        self.spec = spec
        ccy = report_ccy or spec.receive_leg.currency
        self.terms = [
            (sign * env.fx(leg.currency, ccy), _CompiledLeg(leg, env, spec.collateral))
            for sign, leg in ((-1.0, spec.pay_leg), (1.0, spec.receive_leg))
        ]
        self.notional = spec.notional

    def __call__(self, state) -> float:
        return sum(w * leg.pv(state) for w, leg in self.terms)


# ---------------------------------------------------------------------------
# Helpers shared by the calibrations


def _cash_knots(quotes: Sequence[Quote], as_of: Date) -> list[tuple[Date, float, str, Date, float]]:
    """Discount factors at deposit end dates, chained from the valuation date.

    Rows are ``(end, df, id, start, rate)``.
    """
    known: dict[Date, float] = {as_of: 1.0}
    out = []
    periods = sorted(((cash_period(q, as_of), q) for q in quotes), key=lambda t: (t[0][1], t[0][0]))
    for (s, e), q in periods:
        if s not in known:
            raise InputError(f"deposit {q.id} starts on {s}, which no shorter deposit reaches")
        if e in known:
            raise InputError(f"two deposits end on {e}")
        tau = (e - s).days / 360.0
        known[e] = known[s] / (1.0 + q.value * tau)
        out.append((e, known[e], q.id, s, q.value))
    return out


def cash_results(cash_k, curve) -> list[PillarResult]:
    """Deposit rate implied by ``curve`` minus the quote, per deposit."""
    rows = []
    for e, _, cid, s, rate in cash_k:
        ps, pe = curve.dfs([s, e])
        implied = (ps / pe - 1.0) / ((e - s).days / 360.0)
        rows.append(PillarResult(cid, e, float(implied - rate), 0))
    return rows


def _zero(p: float, valuation: Date, d: Date, dc: DayCount) -> float:
    return -math.log(p) / float(times_from(valuation, [d], dc)[0])


def _require(quotes, what: str):
    if not quotes:
        raise InputError(f"missing {what} quotes")
    return quotes


def _check_distinct(dates: Sequence[Date]) -> None:
    if len(set(dates)) != len(dates):
        raise InputError("two calibration instruments share a maturity date")


@dataclass
class _Pillar:
    index: int            # position in the unknown's knot vector
    swap: CompiledSwap
    seed: float
    iid: str
    iterations: int = 0


def _bisect_pillar(p: _Pillar, state: dict, name: str, tol: float) -> float:
    z = state[name]
    guess = z[p.index]

    def f(r: float) -> float:
        z[p.index] = r
        return p.swap(state) / p.swap.notional

    try:
        lo, hi = expand_bracket(f, guess, 1e-5)
        root = find_root(f, lo, hi, tol=tol)
    except ConvergenceError as err:
        root = err.best
    z[p.index] = root
    return root


def _sweep(
    pillars: Sequence[_Pillar],
    state: dict,
    name: str,
    solve: Callable[[_Pillar], float],
) -> tuple[float, float]:
    """One Gauss-Seidel pass; returns (max, sum) of absolute zero-rate changes."""
    z = state[name]
    mx = sm = 0.0
    for p in pillars:
        old = z[p.index]
        new = solve(p)
        z[p.index] = new
        d = abs(new - old)
        if d > 0.0:
            p.iterations += 1
        mx, sm = max(mx, d), sm + d
    return mx, sm


def _iterate(pillars, state, name, solve, cfg: BootstrapConfig, metric: str = "max") -> tuple[int, bool]:
    for it in range(1, cfg.max_iter + 1):
        mx, sm = _sweep(pillars, state, name, solve)
        if (mx if metric == "max" else sm) <= cfg.tol_zero:
            return it, True
    return cfg.max_iter, False


def _report(pillars: Sequence[_Pillar], unknown: Unknown, state, sweeps: int, stable: bool,
            cfg: BootstrapConfig, label: str, extra: Sequence[PillarResult] = ()) -> BootstrapReport:
    rows = list(extra)
    for p in pillars:
        res = p.swap(state) / p.swap.notional
        rows.append(PillarResult(p.iid, unknown.dates[p.index], res, p.iterations))
    worst = max((abs(r.residual) for r in rows), default=0.0)
    ok = stable and worst <= cfg.tol_df and all(r.iterations <= cfg.max_iter for r in rows)
    return BootstrapReport(tuple(rows), ok, worst, sweeps, label)


def _setup(quotes: Sequence[Quote], cash: Sequence[Quote], as_of: Date, cfg: BootstrapConfig,
           name: str, collateral: str, fx0: float | None = None):
    """Knots for cash plus one per swap, ordered by maturity."""
    cash_k = _cash_knots(cash, as_of)
    specs = sorted((instrument_from_quote(q, as_of, 1.0, collateral, fx0) for q in quotes),
                   key=lambda s: s.maturity)
    mats = [s.maturity for s in specs]
    dates = [row[0] for row in cash_k] + mats
    _check_distinct(dates)
    if sorted(dates) != dates:
        raise InputError("a swap matures inside the deposit section of the curve")
    z0 = [_zero(p, as_of, d, cfg.time_dc) for d, p, *_ in cash_k]
    return cash_k, specs, dates, z0


def _quote_lookup(quotes: Sequence[Quote]) -> dict[str, Quote]:
    return {q.id: q for q in quotes}


# ---------------------------------------------------------------------------
# Single-curve TIIE and USD OIS: closed-form pillar updates


def _closed_form_solver(spec: SwapSpec, start_h, pay_h, alpha: np.ndarray, k: float, x_n: float):
    """Pillar zero from ``P(t_N) = (P(t_0) - k sum_{i<N} a_i P_i) / (1 + k a_N)``."""

    def solve(p: _Pillar, state) -> float:
        pays = pay_h(state)
        p0 = start_h(state)[0]
        num = p0 - k * float(np.dot(alpha[:-1], pays[:-1]))
        pn = num / (1.0 + k * alpha[-1])
        return -math.log(pn) / x_n

    return solve


def _single_curve(
    quotes: MarketSnapshot, swaps: Sequence[Quote], cash: Sequence[Quote], ccy: str, cfg: BootstrapConfig,
    label: str, seed: Callable[[int, Quote, list], float] | None = None, with_report: bool = False,
):
    as_of = quotes.as_of
    cash_k, specs, dates, z0 = _setup(swaps, cash, as_of, cfg, "curve", ccy)
    u = Unknown("curve", as_of, dates, cfg.interp, cfg.time_dc, label)
    env = PricingEnv(as_of, {(ccy, ccy): u}, {s.receive_leg.index: u for s in specs}, quotes.fixings, quotes.fx_spot)
    by_id = _quote_lookup(swaps)
    z = np.array(z0 + [0.0] * len(specs))
    pillars, solvers = [], {}
    n_cash = len(cash_k)
    for j, spec in enumerate(specs):
        q = by_id[spec.instrument_id]
        fixed = spec.pay_leg
        sch = fixed.schedule
        idx = n_cash + j
        z[idx] = seed(j, q, z[:idx]) if seed else q.value
        p = _Pillar(idx, CompiledSwap(spec, env), z[idx], q.id)
        solvers[id(p)] = _closed_form_solver(
            spec, _handle(u, [sch.start]), _handle(u, sch.pay_dates), np.asarray(sch.accruals), fixed.rate_or_spread,
            float(u.x[idx]),
        )
        pillars.append(p)
    state = {"curve": z}
    sweeps, stable = _iterate(pillars, state, "curve", lambda p: solvers[id(p)](p, state), cfg)
    curve = u.curve(z)
    if not with_report:
        return curve
    extra = cash_results(cash_k, curve)
    return curve, _report(pillars, u, state, sweeps, stable, cfg, label, extra)


def bootstrap_single_curve_tiie(quotes: MarketSnapshot, cfg: BootstrapConfig = BootstrapConfig(),
                                with_report: bool = False):
    """One TIIE curve used for both discounting and projection.

    Needs the ON, TN and 28D deposits (TN may be absent when the 28D deposit
    starts on the ON end date) and the TIIE IRS quotes.
    """
    cash = _require(quotes.select(InstrumentClass.CASH), "cash")
    if not any(q.tenor == "ON" for q in cash):
        raise InputError("the single-curve bootstrap needs an ON deposit")
    irs = _require(quotes.select(InstrumentClass.IRS, "TIIE28D"), "TIIE IRS")
    return _single_curve(quotes, irs, cash, "MXN", cfg, "TIIE28D single curve", with_report=with_report)


def bootstrap_ois_usd(quotes: MarketSnapshot, cfg: BootstrapConfig = BootstrapConfig(),
                      with_report: bool = False):
    """USD discount curve for USD collateral from Fed Funds deposits and OIS.

    Pillars whose coupons all fall on knots are exact after the first pass;
    beyond 10y the unquoted annual coupon dates are interpolated, so those
    pillars start from the previous pillar's zero rate and iterate.
    """
    cash = _require(quotes.select(InstrumentClass.CASH), "ON/TN cash")
    ois = _require(quotes.select(InstrumentClass.OIS), "OIS")
    as_of = quotes.as_of

    def seed(j: int, q: Quote, prev: np.ndarray) -> float:
        spec = instrument_from_quote(q, as_of, 1.0, "USD")
        if len(spec.pay_leg.schedule) > 1 and j > 0 and _has_gaps(spec, ois, as_of):
            return float(prev[-1])
        return q.value

    return _single_curve(quotes, ois, cash, "USD", cfg, "USD OIS (USD collateral)", seed, with_report)


def _has_gaps(spec: SwapSpec, ois: Sequence[Quote], as_of: Date) -> bool:
    mats = {instrument_from_quote(q, as_of).maturity for q in ois}
    return any(d not in mats for d in spec.pay_leg.schedule.pay_dates[:-1])


# ---------------------------------------------------------------------------
# LIBOR projection curves: bisection per pillar


def _projection(
    quotes: MarketSnapshot, swaps: Sequence[Quote], cash: Sequence[Quote], disc: Curve,
    known_fwd: Mapping[str, object], index: str, cfg: BootstrapConfig, label: str, metric: str,
    with_report: bool,
):
    as_of = quotes.as_of
    if disc.valuation_date != as_of:
        raise InputError("discount curve and quotes disagree on the valuation date")
    cash_k, specs, dates, z0 = _setup(swaps, cash, as_of, cfg, index, "USD")
    u = Unknown(index, as_of, dates, cfg.interp, cfg.time_dc, label)
    fwds = dict(known_fwd)
    fwds[index] = u
    env = PricingEnv(as_of, {("USD", "USD"): disc}, fwds, quotes.fixings, quotes.fx_spot)
    by_id = _quote_lookup(swaps)
    z = np.array(z0 + [0.0] * len(specs))
    pillars = []
    for j, spec in enumerate(specs):
        q = by_id[spec.instrument_id]
        idx = len(cash_k) + j
        # basis quotes are spreads; seed those pillars off the previous zero
        z[idx] = q.value if q.instrument_class is InstrumentClass.IRS else z[idx - 1]
        pillars.append(_Pillar(idx, CompiledSwap(spec, env), z[idx], q.id))
    state = {index: z}
    tol = cfg.tol_df * 1e-4
    sweeps, stable = _iterate(pillars, state, index, lambda p: _bisect_pillar(p, state, index, tol), cfg, metric)
    view = ForwardCurveView(u.curve(z), _index_tenor(index), DayCount.ACT_360, index)
    if not with_report:
        return view
    extra = cash_results(cash_k, view.underlying)
    return view, _report(pillars, u, state, sweeps, stable, cfg, label, extra)


def _index_tenor(index: str) -> str:
    tail = index.rsplit("_", 1)[-1]
    return tail if tail[-1] in "DWMY" and tail[:-1].isdigit() else "28D"


def bootstrap_libor3m(quotes: MarketSnapshot, disc: Curve, cfg: BootstrapConfig = BootstrapConfig(),
                      with_report: bool = False):
    """USD LIBOR 3m pseudo-discount curve under OIS discounting."""
    cash = _require(quotes.select(InstrumentClass.CASH), "LIBOR 3m cash")
    irs = _require(quotes.select(InstrumentClass.IRS, "USD_LIBOR_3M"), "LIBOR 3m IRS")
    return _projection(quotes, irs, cash, disc, {}, "USD_LIBOR_3M", cfg, "USD LIBOR 3M", "max", with_report)


def bootstrap_libor1m(quotes: MarketSnapshot, disc: Curve, libor3m: ForwardCurveView,
                      cfg: BootstrapConfig = BootstrapConfig(), with_report: bool = False):
    """USD LIBOR 1m pseudo-discount curve from short IRSs and 1m/3m tenor swaps.

    Stops when the summed absolute change of the zero rates over a sweep is
    at most ``tol_zero``.
    """
    cash = _require(quotes.select(InstrumentClass.CASH), "LIBOR 1m cash")
    irs = quotes.select(InstrumentClass.IRS, "USD_LIBOR_1M")
    ts = quotes.select(InstrumentClass.TENOR_SWAP, "USD_LIBOR_1M")
    _require(irs + ts, "LIBOR 1m IRS / tenor swap")
    return _projection(quotes, irs + ts, cash, disc, {"USD_LIBOR_3M": libor3m}, "USD_LIBOR_1M", cfg,
                       "USD LIBOR 1M", "sum", with_report)


# ---------------------------------------------------------------------------
# Cross-currency collateral spread


def xcs_env(
    quotes: MarketSnapshot, dom_disc, dom_fwd, for_disc, for_fwd, dom_ccy: str = "MXN", for_ccy: str = "USD",
    dom_index: str = "TIIE28D", for_index: str = "USD_LIBOR_1M",
) -> PricingEnv:
    """Pricing environment for cnXCS collateralized in the foreign currency."""
    return PricingEnv(
        quotes.as_of,
        {(dom_ccy, for_ccy): dom_disc, (for_ccy, for_ccy): for_disc},
        {dom_index: dom_fwd, for_index: for_fwd},
        quotes.fixings,
        quotes.fx_spot,
    )


def bootstrap_collateral_spread(
    quotes: MarketSnapshot,
    dom_disc: Curve,
    dom_fwd: ForwardCurveView,
    for_disc: Curve,
    for_fwd: ForwardCurveView,
    cfg: BootstrapConfig = BootstrapConfig(),
    knot_dates: Sequence[Date] | None = None,
    with_report: bool = False,
):
    """Spread curve ``P^y`` making every cnXCS price to zero.

    Returns the domestic discount curve collateralized in the foreign
    currency, ``dom_disc * P^y``. ``P^y`` is knotted on ``knot_dates``
    (default: the pillars of ``dom_disc``); the last ``n`` knots are matched
    to the ``n`` cnXCS quotes in maturity order and the earlier ones are held
    at zero spread.
    """
    xcs = _require(quotes.select(InstrumentClass.CNXCS), "cnXCS")
    fx0 = _fx0(quotes)
    as_of = quotes.as_of
    dates = tuple(knot_dates if knot_dates is not None else dom_disc.pillar_dates)
    if len(dates) < len(xcs):
        raise InputError("fewer spread knots than cnXCS quotes")
    u = Unknown("y", as_of, dates, cfg.interp, cfg.time_dc, "collateral spread")
    dom = UnknownTimes(dom_disc, u)
    env = xcs_env(quotes, dom, dom_fwd, for_disc, for_fwd)
    specs = sorted((instrument_from_quote(q, as_of, 1.0, "USD", fx0) for q in xcs), key=lambda s: s.maturity)
    first = len(dates) - len(specs)
    z = np.zeros(len(dates))
    pillars = [_Pillar(first + j, CompiledSwap(s, env), 0.0, s.instrument_id) for j, s in enumerate(specs)]
    state = {"y": z}
    sweeps, stable = _iterate(pillars, state, "y", lambda p: _bisect_pillar(p, state, "y", cfg.tol_df * 1e-6), cfg)
    y = u.curve(z)
    out = CompositeCurve(((dom_disc, 1.0), (y, 1.0)), "MXN discount (USD collateral)")
    if not with_report:
        return out
    return out, _report(pillars, u, state, sweeps, stable, cfg, "cnXCS spread")


def _fx0(quotes: MarketSnapshot) -> float:
    try:
        return float(quotes.fx_spot["USDMXN"])
    except KeyError:
        raise InputError("cnXCS calibration needs the USDMXN spot (header '# fx USDMXN=...')") from None


def reprice(specs: Sequence[SwapSpec], ctx: PricingContext) -> list[tuple[str, float]]:
    """PV per unit notional of each instrument through the public pricer."""
    from .instruments import pv

    return [(s.instrument_id, pv(s, ctx) / s.notional) for s in specs]
