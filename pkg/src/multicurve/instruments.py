"""Swap definitions and present values under a pricing context.

Sign convention: a swap's PV is ``value(receive_leg) - value(pay_leg)``, so a
payer IRS (pay fixed, receive float) has ``PV = FloatLeg - FixedLeg``.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .calendar_time import (
    CalendarId,
    DayCount,
    RollConvention,
    Schedule,
    StubPolicy,
    Tenor,
    add_business_days,
    build_schedule,
    roll,
)
from .curves import ForwardCurveView
from .errors import BracketingError, ContextError, InputError
from .market_data import InstrumentClass, MarketSnapshot, Quote
from .numerics import expand_bracket, find_root

Date = dt.date


class LegKind(str, Enum):
    FIXED = "FIXED"
    IBOR = "IBOR"
    OVERNIGHT_COMPOUNDED = "OVERNIGHT_COMPOUNDED"
    IBOR_COMPOUNDED = "IBOR_COMPOUNDED"


@dataclass(frozen=True)
class LegSpec:
    kind: LegKind
    schedule: Schedule
    rate_or_spread: float = 0.0
    index: str | None = None
    notional: float = 1.0
    notional_exchange: bool = False
    compounding_sub_period: Tenor | str | None = None
    currency: str = "USD"
    sub_schedule: Schedule | None = None
    fixing_calendar: CalendarId | None = None
    fixing_lag: int = 0
    resets_notional: bool = False

    def __post_init__(self):
        kind = LegKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is LegKind.FIXED and self.index is not None:
            raise InputError("a FIXED leg carries no index")
        if kind is not LegKind.FIXED and not self.index:
            raise InputError(f"{kind.value} leg needs an index")
        if kind is LegKind.IBOR_COMPOUNDED:
            if self.compounding_sub_period is None or self.sub_schedule is None:
                raise InputError("IBOR_COMPOUNDED needs a compounding sub-period and its schedule")
            subs = set(self.sub_schedule.coupon_ends)
            if not set(self.schedule.coupon_ends) <= subs or self.sub_schedule.start != self.schedule.start:
                raise InputError("compounding sub-periods must nest inside the coupon periods")
        if self.compounding_sub_period is not None:
            object.__setattr__(self, "compounding_sub_period", Tenor.parse(self.compounding_sub_period))

    def with_rate(self, x: float) -> "LegSpec":
        return replace(self, rate_or_spread=x)


@dataclass(frozen=True)
class SwapSpec:
    pay_leg: LegSpec
    receive_leg: LegSpec
    fx_fixing: float | None = None
    trade_date: Date | None = None
    collateral: str = "USD"
    instrument_id: str = ""

    @property
    def legs(self) -> tuple[LegSpec, LegSpec]:
        return (self.pay_leg, self.receive_leg)

    @property
    def notional(self) -> float:
        return abs(self.receive_leg.notional)

    @property
    def maturity(self) -> Date:
        return max(self.pay_leg.schedule.end, self.receive_leg.schedule.end)


@dataclass(frozen=True)
class PricingContext:
    discount: Mapping[tuple[str, str], object] = field(default_factory=dict)
    forwards: Mapping[str, ForwardCurveView] = field(default_factory=dict)
    fixings: Mapping[tuple[str, Date], float] = field(default_factory=dict)
    fx_spot: Mapping[str, float] = field(default_factory=dict)

    @property
    def valuation_date(self) -> Date:
        for c in self.discount.values():
            return c.valuation_date
        for v in self.forwards.values():
            return v.valuation_date
        raise ContextError("valuation date (empty context)")

    def discount_curve(self, currency: str, collateral: str):
        try:
            return self.discount[(currency, collateral)]
        except KeyError:
            raise ContextError(f"discount[{currency}, collateral {collateral}]") from None

    def forward(self, index: str) -> ForwardCurveView:
        try:
            return self.forwards[index]
        except KeyError:
            raise ContextError(f"forward[{index}]") from None

    def fx(self, base: str, quote: str) -> float:
        """Units of ``quote`` per unit of ``base``."""
        if base == quote:
            return 1.0
        if base + quote in self.fx_spot:
            return float(self.fx_spot[base + quote])
        if quote + base in self.fx_spot:
            return 1.0 / float(self.fx_spot[quote + base])
        raise ContextError(f"fx[{base}{quote}]")

    def with_curves(self, discount=None, forwards=None) -> "PricingContext":
        d = dict(self.discount)
        d.update(discount or {})
        f = dict(self.forwards)
        f.update(forwards or {})
        return replace(self, discount=d, forwards=f)


# ---------------------------------------------------------------------------
# Leg valuation


def fixing_overrides(leg: LegSpec, starts: Sequence[Date], valuation: Date,
                     fixings: Mapping[tuple[str, Date], float]) -> dict[int, float]:
    """Periods whose rate is a known fixing rather than a projection.

    A fixing date before the valuation date must be supplied; one on the
    valuation date is used when present and projected otherwise.
    """
    out: dict[int, float] = {}
    horizon = valuation + dt.timedelta(days=10)
    cal = leg.fixing_calendar or leg_calendar_guess(leg)
    for i, s in enumerate(starts):
        if s > horizon:
            break
        fix = add_business_days(s, -leg.fixing_lag, cal) if leg.fixing_lag else s
        key = (leg.index, fix)
        if fix < valuation:
            if key not in fixings:
                raise ContextError(f"fixing[{leg.index}, {fix.isoformat()}]")
            out[i] = float(fixings[key])
        elif fix == valuation and key in fixings:
            out[i] = float(fixings[key])
    return out


def _period_forwards(leg: LegSpec, ctx: PricingContext, starts: Sequence[Date], ends: Sequence[Date]) -> np.ndarray:
    fwd = ctx.forward(leg.index).forwards(starts, ends)
    for i, v in fixing_overrides(leg, starts, ctx.valuation_date, ctx.fixings).items():
        fwd[i] = v
    return fwd


def leg_calendar_guess(leg: LegSpec) -> CalendarId:
    return CalendarId.MX if leg.currency == "MXN" else CalendarId.US_UK


def leg_pv(leg: LegSpec, ctx: PricingContext, collateral: str) -> float:
    """Value of one leg in its own currency, excluding any notional resets."""
    if leg.notional == 0.0:
        return 0.0
    disc = ctx.discount_curve(leg.currency, collateral)
    sch = leg.schedule
    pays = list(sch.pay_dates)
    d_pay = disc.dfs(pays)
    alpha = np.asarray(sch.accruals)
    k = leg.rate_or_spread
    kind = leg.kind
    if kind is LegKind.FIXED:
        flows = k * alpha
    elif kind is LegKind.IBOR:
        fwd = _period_forwards(leg, ctx, sch.coupon_starts, sch.coupon_ends)
        flows = alpha * (fwd + k)
    elif kind is LegKind.OVERNIGHT_COMPOUNDED:
        view = ctx.forward(leg.index)
        if view.underlying is disc:
            # projection and discounting share a curve: the compounded
            # overnight coupon telescopes to P(s) - P(e)
            d_start = disc.dfs(list(sch.coupon_starts))
            d_end = disc.dfs(list(sch.coupon_ends))
            total = float(np.sum(d_start * d_pay / d_end - d_pay) + k * np.dot(alpha, d_pay))
            return leg.notional * (total + _exchange(leg, disc))
        p = view.underlying.dfs(list(sch.coupon_starts) + list(sch.coupon_ends))
        n = len(sch)
        flows = p[:n] / p[n:] - 1.0 + k * alpha
    else:  # IBOR_COMPOUNDED, spread added after compounding
        sub = leg.sub_schedule
        fwd = _period_forwards(leg, ctx, sub.coupon_starts, sub.coupon_ends)
        growth = 1.0 + np.asarray(sub.accruals) * fwd
        ends = list(sub.coupon_ends)
        cut = [0] + [ends.index(e) + 1 for e in sch.coupon_ends[:-1]]
        compounded = np.multiply.reduceat(growth, cut)
        flows = compounded - 1.0 + k * alpha
    total = float(np.dot(flows, d_pay))
    return leg.notional * (total + _exchange(leg, disc))


def _exchange(leg: LegSpec, disc) -> float:
    if not leg.notional_exchange:
        return 0.0
    p = disc.dfs([leg.schedule.start, leg.schedule.end])
    return float(p[1] - p[0])


def _swap_pv(spec: SwapSpec, ctx: PricingContext, report_ccy: str | None = None) -> float:
    ccy = report_ccy or spec.receive_leg.currency
    out = 0.0
    for sign, leg in ((-1.0, spec.pay_leg), (1.0, spec.receive_leg)):
        v = leg_pv(leg, ctx, spec.collateral)
        if v != 0.0:
            out += sign * v * ctx.fx(leg.currency, ccy)
    return out


def _same_currency(spec: SwapSpec) -> None:
    if spec.pay_leg.currency != spec.receive_leg.currency:
        raise InputError("single-currency swap with legs in different currencies")


def pv_irs(spec: SwapSpec, ctx: PricingContext) -> float:
    _same_currency(spec)
    return _swap_pv(spec, ctx)


def pv_ois(spec: SwapSpec, ctx: PricingContext) -> float:
    _same_currency(spec)
    if LegKind.OVERNIGHT_COMPOUNDED not in {leg.kind for leg in spec.legs}:
        raise InputError("an OIS needs an OVERNIGHT_COMPOUNDED leg")
    return _swap_pv(spec, ctx)


def pv_tenor_swap(spec: SwapSpec, ctx: PricingContext) -> float:
    _same_currency(spec)
    return _swap_pv(spec, ctx)


def pv_cnxcs(spec: SwapSpec, ctx: PricingContext, report_ccy: str | None = None) -> float:
    """Constant-notional cross-currency swap, ``Leg_recv - f * Leg_pay``."""
    if not all(leg.notional_exchange for leg in spec.legs):
        raise InputError("a cnXCS exchanges notionals on both legs")
    return _swap_pv(spec, ctx, report_ccy)


def fx_forward(ctx: PricingContext, base: str, quote: str, T: Date, collateral: str) -> float:
    """Outright ``quote`` per ``base`` for delivery at ``T`` from the curve ratio."""
    pb = ctx.discount_curve(base, collateral).df(T)
    pq = ctx.discount_curve(quote, collateral).df(T)
    return ctx.fx(base, quote) * pb / pq


def pv_mtmxcs(spec: SwapSpec, ctx: PricingContext, report_ccy: str | None = None) -> float:
    """Mark-to-market cross-currency swap.

    The leg flagged ``resets_notional`` carries, for coupon j, the notional
    ``N_const * f_fwd(s_j)`` with the outright taken at the payment date; the
    notional changes are exchanged at each period boundary.
    """
    resetting = [leg for leg in spec.legs if leg.resets_notional]
    if len(resetting) != 1:
        raise InputError("exactly one mtmXCS leg must reset its notional")
    reset = resetting[0]
    const = spec.receive_leg if reset is spec.pay_leg else spec.pay_leg
    ccy = report_ccy or spec.receive_leg.currency
    disc = ctx.discount_curve(reset.currency, spec.collateral)
    sch = reset.schedule
    fx_fwds = np.array([fx_forward(ctx, const.currency, reset.currency, d, spec.collateral)
                        for d in sch.pay_dates])
    notionals = const.notional * fx_fwds
    # coupons with per-period notionals
    unit = replace(reset, notional=1.0, notional_exchange=False)
    coupons = 0.0
    for j in range(len(sch)):
        one = Schedule(sch.coupon_starts[j], (sch.coupon_ends[j],), (sch.pay_dates[j],), (sch.accruals[j],))
        sub = None
        if reset.sub_schedule is not None:
            ends = [e for e in reset.sub_schedule.coupon_ends if one.start < e <= one.end]
            sub = Schedule.from_dates(one.start, ends, DayCount.ACT_360)
        coupons += notionals[j] * leg_pv(replace(unit, schedule=one, sub_schedule=sub), ctx, spec.collateral)
    # notional flows: -N_1 at start, N_j - N_{j+1} at each reset, N_M at the end
    bounds = [sch.start] + list(sch.coupon_ends)
    p = disc.dfs(bounds)
    flows = np.zeros(len(bounds))
    flows[0] = -notionals[0]
    flows[1:-1] = notionals[:-1] - notionals[1:]
    flows[-1] += notionals[-1]
    reset_val = coupons + float(np.dot(flows, p))
    const_val = leg_pv(const, ctx, spec.collateral)
    sign_reset = 1.0 if reset is spec.receive_leg else -1.0
    return (sign_reset * reset_val * ctx.fx(reset.currency, ccy)
            - sign_reset * const_val * ctx.fx(const.currency, ccy))


def pv(spec: SwapSpec, ctx: PricingContext, report_ccy: str | None = None) -> float:
    """Dispatch on the leg structure."""
    if any(leg.resets_notional for leg in spec.legs):
        return pv_mtmxcs(spec, ctx, report_ccy)
    if spec.pay_leg.currency != spec.receive_leg.currency:
        return pv_cnxcs(spec, ctx, report_ccy)
    return _swap_pv(spec, ctx, report_ccy)


def _unknown_leg(spec: SwapSpec, solve_for: str | None) -> str:
    if solve_for in ("pay", "receive"):
        return solve_for
    if solve_for is not None:
        raise InputError("solve_for must be 'pay' or 'receive'")
    for name, leg in (("pay", spec.pay_leg), ("receive", spec.receive_leg)):
        if leg.kind is LegKind.FIXED:
            return name
    for name, leg in (("pay", spec.pay_leg), ("receive", spec.receive_leg)):
        if leg.rate_or_spread != 0.0:
            return name
    raise InputError("par_rate cannot tell which leg carries the unknown; pass solve_for")


def _with_leg_rate(spec: SwapSpec, which: str, x: float) -> SwapSpec:
    if which == "pay":
        return replace(spec, pay_leg=spec.pay_leg.with_rate(x))
    return replace(spec, receive_leg=spec.receive_leg.with_rate(x))


def par_rate(spec: SwapSpec, ctx: PricingContext, solve_for: str | None = None, tol: float = 1e-12) -> float:
    """Fixed rate or spread that zeroes the PV.

    Every structure here is affine in its rate or spread, so two PVs give the
    root; a bisection fallback covers anything that is not.
    """
    which = _unknown_leg(spec, solve_for)

    def f(x: float) -> float:
        return pv(_with_leg_rate(spec, which, x), ctx)

    f0, f1 = f(0.0), f(0.01)
    slope = (f1 - f0) / 0.01
    if slope == 0.0:
        raise BracketingError("PV does not depend on the designated rate")
    x = -f0 / slope
    scale = max(spec.notional, 1.0)
    if abs(f(x)) <= 1e-12 * scale:
        return x
    lo, hi = expand_bracket(f, x, 1e-4)
    return find_root(f, lo, hi, tol=tol)


# ---------------------------------------------------------------------------
# Builders from quotes


def cash_period(q: Quote, as_of: Date) -> tuple[Date, Date]:
    """Accrual period of a cash deposit quote (ON, TN or a term deposit)."""
    conv = q.conventions
    cal = conv.calendar
    if q.tenor == "ON":
        return as_of, add_business_days(as_of, 1, cal)
    if q.tenor == "TN":
        s = add_business_days(as_of, 1, cal)
        return s, add_business_days(s, 1, cal)
    start = add_business_days(as_of, conv.spot_lag, cal)
    tenor = Tenor.parse(q.tenor)
    return start, roll(tenor.add_to(start), cal, conv.roll)


def _schedule(as_of: Date, lag: int, tenor: Tenor, freq: str | None, conv) -> Schedule:
    if freq is None:
        freq_t = tenor
    else:
        freq_t = Tenor.parse(freq)
        if tenor.is_day_based != freq_t.is_day_based:
            freq_t = tenor
        elif (tenor.days if tenor.is_day_based else tenor.months) <= (
            freq_t.days if freq_t.is_day_based else freq_t.months
        ):
            freq_t = tenor
    return build_schedule(as_of, lag, tenor, freq_t, conv.calendar, conv.roll, DayCount.ACT_360, conv.stub)


def _rescale(s: Schedule, dc: DayCount) -> Schedule:
    if dc is DayCount.ACT_360:
        return s
    return Schedule.from_dates(s.start, s.coupon_ends, dc)


def instrument_from_quote(
    q: Quote,
    as_of: Date,
    notional: float = 1.0,
    collateral: str = "USD",
    fx_fixing: float | None = None,
) -> SwapSpec:
    """Swap described by a quote, with the quoted rate or spread filled in."""
    conv = q.conventions
    tenor = Tenor.parse(q.tenor)
    cls = q.instrument_class
    iid = q.id
    if cls is InstrumentClass.OIS:
        sch = _schedule(as_of, conv.spot_lag, tenor, conv.fixed_freq, conv)
        fixed = LegSpec(LegKind.FIXED, sch, q.value, None, notional, currency="USD")
        flt = LegSpec(LegKind.OVERNIGHT_COMPOUNDED, sch, 0.0, q.index, notional, currency="USD")
        return SwapSpec(fixed, flt, None, as_of, collateral, iid)
    if cls is InstrumentClass.IRS:
        ccy = "MXN" if q.index.startswith("TIIE") else "USD"
        flt_sch = _schedule(as_of, conv.spot_lag, tenor, conv.float_freq, conv)
        fix_sch = _rescale(_schedule(as_of, conv.spot_lag, tenor, conv.fixed_freq, conv), conv.fixed_dc)
        fixed = LegSpec(LegKind.FIXED, fix_sch, q.value, None, notional, currency=ccy)
        flt = LegSpec(LegKind.IBOR, flt_sch, 0.0, q.index, notional, currency=ccy,
                      fixing_calendar=conv.fixing_calendar, fixing_lag=conv.fixing_lag)
        return SwapSpec(fixed, flt, None, as_of, collateral, iid)
    if cls is InstrumentClass.TENOR_SWAP:
        sch = _schedule(as_of, conv.spot_lag, tenor, conv.float_freq, conv)
        sub = _schedule(as_of, conv.spot_lag, tenor, conv.compounding, conv)
        long_leg = LegSpec(LegKind.IBOR, sch, 0.0, "USD_LIBOR_3M", notional, currency="USD",
                           fixing_calendar=conv.fixing_calendar, fixing_lag=conv.fixing_lag)
        short_leg = LegSpec(LegKind.IBOR_COMPOUNDED, sch, q.value * conv.spread_sign, q.index, notional,
                            compounding_sub_period=conv.compounding, currency="USD", sub_schedule=sub,
                            fixing_calendar=conv.fixing_calendar, fixing_lag=conv.fixing_lag)
        return SwapSpec(long_leg, short_leg, None, as_of, collateral, iid)
    if cls is InstrumentClass.CNXCS:
        if fx_fixing is None:
            raise InputError("a cnXCS needs the FX fixing f0 that sets the USD notional")
        sch = _schedule(as_of, conv.spot_lag, tenor, conv.float_freq, conv)
        mxn = LegSpec(LegKind.IBOR, sch, 0.0, "TIIE28D", notional, notional_exchange=True, currency="MXN",
                      fixing_calendar=CalendarId.MX, fixing_lag=1)
        usd = LegSpec(LegKind.IBOR, sch, q.value, "USD_LIBOR_1M", notional / fx_fixing,
                      notional_exchange=True, currency="USD",
                      fixing_calendar=CalendarId.UK, fixing_lag=2)
        return SwapSpec(usd, mxn, fx_fixing, as_of, collateral, iid)
    raise InputError(f"{cls.value} quotes are deposits, not swaps")


def instruments_from_snapshot(
    snap: MarketSnapshot, classes: Sequence[InstrumentClass] | None = None, notional: float = 1.0,
    collateral: str = "USD",
) -> list[SwapSpec]:
    out = []
    fx0 = snap.fx_spot.get("USDMXN")
    for q in sorted(snap.quotes, key=lambda q: (q.instrument_class.value, q.sort_key)):
        if q.instrument_class is InstrumentClass.CASH:
            continue
        if classes is not None and q.instrument_class not in classes:
            continue
        out.append(instrument_from_quote(q, snap.as_of, notional, collateral, fx0))
    return out


# ---------------------------------------------------------------------------
# JSON instrument files


def _leg_from_dict(d: Mapping, trade_date: Date) -> LegSpec:
    kind = LegKind(str(d["kind"]).upper())
    cal = CalendarId(d.get("calendar", "MX"))
    conv = RollConvention(d.get("roll", "FOLLOWING"))
    dc = DayCount(d.get("day_count", "ACT_360"))
    tenor = Tenor.parse(d["tenor"])
    freq = d.get("frequency") or d["tenor"]
    stub = StubPolicy(d.get("stub", "NONE"))
    sch = build_schedule(trade_date, int(d.get("spot_lag", 0)), tenor, freq, cal, conv, dc, stub)
    sub = comp = None
    if kind is LegKind.IBOR_COMPOUNDED:
        comp = d["compounding"]
        sub = build_schedule(trade_date, int(d.get("spot_lag", 0)), tenor, comp, cal, conv, DayCount.ACT_360, stub)
    rate = d.get("rate_pct", d.get("spread_pct", 0.0))
    fix_cal = d.get("fixing_calendar")
    return LegSpec(
        kind, sch, float(rate) / 100.0, d.get("index"), float(d.get("notional", 1.0)),
        bool(d.get("notional_exchange", False)), comp, d.get("currency", "MXN"), sub,
        CalendarId(fix_cal) if fix_cal else None, int(d.get("fixing_lag", 0)),
        bool(d.get("resets_notional", False)),
    )


def swap_from_dict(d: Mapping) -> tuple[SwapSpec, dict[tuple[str, Date], float]]:
    """Swap and its extra fixings from a parsed instrument file.

    Rates, spreads and fixings are in percent, as quoted. Missing keys raise
    :class:`InputError`.
    """
    try:
        trade = dt.date.fromisoformat(d["trade_date"])
        legs = d["legs"]
        pay = _leg_from_dict(legs["pay"], trade)
        rec = _leg_from_dict(legs["receive"], trade)
        fixings = {
            (idx, dt.date.fromisoformat(day)): float(v) / 100.0
            for idx, by_day in (d.get("fixings") or {}).items()
            for day, v in by_day.items()
        }
        fx = d.get("fx_fixing")
        spec = SwapSpec(pay, rec, float(fx) if fx is not None else None, trade,
                        d.get("collateral", "USD"), d.get("id", ""))
    except KeyError as err:
        raise InputError(f"instrument file is missing {err.args[0]!r}") from None
    except (TypeError, ValueError) as err:
        raise InputError(f"bad instrument file: {err}") from None
    return spec, fixings
