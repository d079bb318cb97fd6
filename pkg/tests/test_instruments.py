import copy
import datetime as dt
import json
import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multicurve.calendar_time import DayCount, Schedule, build_schedule
from multicurve.curves import Curve, ForwardCurveView
from multicurve.errors import ContextError, InputError
from multicurve.instruments import (
    LegKind,
    LegSpec,
    PricingContext,
    fixing_overrides,
    fx_forward,
    instrument_from_quote,
    leg_pv,
    par_rate,
    pv,
    pv_mtmxcs,
    pv_ois,
    swap_from_dict,
)
from multicurve.market_data import InstrumentClass, Quote

V = dt.date(2015, 5, 29)
SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def _curve(level=0.04, slope=0.002, label=""):
    pillars = [V + dt.timedelta(days=d) for d in (30, 180, 365, 730, 1825, 3650, 10950)]
    zs = [level + slope * math.log1p(d / 365) for d in (30, 180, 365, 730, 1825, 3650, 10950)]
    return Curve(V, tuple(pillars), tuple(zs), label=label)


@pytest.fixture()
def mxn_ctx():
    disc, proj = _curve(0.035), _curve(0.04)
    return PricingContext({("MXN", "USD"): disc}, {"TIIE28D": ForwardCurveView(proj, "28D", index="TIIE28D")},
                          {("TIIE28D", V): 0.03295})


def _irs(k=0.05, tenor="1820D", notional=1.0):
    q = Quote(InstrumentClass.IRS, "TIIE28D", tenor, k, "tiie_irs")
    return instrument_from_quote(q, V, notional)


def test_swapping_legs_flips_sign(mxn_ctx):
    s = _irs()
    flipped = replace(s, pay_leg=s.receive_leg, receive_leg=s.pay_leg)
    assert pv(flipped, mxn_ctx) == pytest.approx(-pv(s, mxn_ctx), abs=1e-15)


def test_par_rate_zeroes_pv(mxn_ctx):
    s = _irs()
    k = par_rate(s, mxn_ctx)
    assert abs(pv(replace(s, pay_leg=s.pay_leg.with_rate(k)), mxn_ctx)) < 1e-15
    assert 0.03 < k < 0.06


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 0.12), st.floats(1e3, 1e9), st.sampled_from(["84D", "364D", "1820D"]))
def test_pv_is_linear_in_notional(k, n, tenor):
    disc, proj = _curve(0.035), _curve(0.04)
    ctx = PricingContext({("MXN", "USD"): disc}, {"TIIE28D": ForwardCurveView(proj, "28D", index="TIIE28D")},
                         {("TIIE28D", V): 0.03295})
    unit = pv(_irs(k, tenor), ctx)
    assert pv(_irs(k, tenor, n), ctx) == pytest.approx(n * unit, rel=1e-12, abs=1e-12 * n)
    assert par_rate(_irs(k, tenor, n), ctx) == pytest.approx(par_rate(_irs(k, tenor), ctx), abs=1e-14)


def test_zero_notional_leg(mxn_ctx):
    s = _irs()
    leg = replace(s.receive_leg, notional=0.0)
    assert leg_pv(leg, PricingContext(), "USD") == 0.0


class TestOvernight:
    def _ois(self, k=0.002):
        q = Quote(InstrumentClass.OIS, "FEDFUNDS", "2Y", k, "usd_ois")
        return instrument_from_quote(q, V)

    def test_telescoping_matches_daily_compounding(self):
        disc = _curve(0.004, 0.004)
        ctx = PricingContext({("USD", "USD"): disc}, {"FEDFUNDS": ForwardCurveView(disc, "1D", index="FEDFUNDS")})
        spec = self._ois()
        fast = pv_ois(spec, ctx)

        # brute force: compound the one-day forward growth factors day by day
        sch = spec.receive_leg.schedule
        slow = 0.0
        for s, e, pay, a in zip(sch.coupon_starts, sch.coupon_ends, sch.pay_dates, sch.accruals):
            days = [s + dt.timedelta(days=i) for i in range((e - s).days + 1)]
            p = disc.dfs(days)
            growth = np.prod(p[:-1] / p[1:])
            slow += (growth - 1.0) * disc.df(pay)
        fixed = sum(0.002 * a * disc.df(pay) for pay, a in zip(sch.pay_dates, sch.accruals))
        assert fast == pytest.approx(slow - fixed, abs=1e-13)

    def test_separate_projection_curve(self):
        disc = _curve(0.004)
        twin = copy.deepcopy(disc)
        same = PricingContext({("USD", "USD"): disc}, {"FEDFUNDS": ForwardCurveView(disc, "1D", index="FEDFUNDS")})
        other = PricingContext({("USD", "USD"): disc}, {"FEDFUNDS": ForwardCurveView(twin, "1D", index="FEDFUNDS")})
        assert pv(self._ois(), same) == pytest.approx(pv(self._ois(), other), abs=1e-15)

    def test_needs_an_overnight_leg(self, mxn_ctx):
        with pytest.raises(InputError):
            pv_ois(_irs(), mxn_ctx)


def test_compounded_leg_telescopes():
    proj = _curve(0.01)
    disc = _curve(0.005)
    q = Quote(InstrumentClass.TENOR_SWAP, "USD_LIBOR_1M", "1Y", 0.0, "usd_ts_1m3m")
    spec = instrument_from_quote(q, V)
    ctx = PricingContext({("USD", "USD"): disc}, {"USD_LIBOR_3M": ForwardCurveView(proj, "3M"),
                                                  "USD_LIBOR_1M": ForwardCurveView(proj, "1M")})
    # one pseudo-discount curve for both tenors: no basis, zero PV
    assert abs(pv(spec, ctx)) < 1e-15


def test_spread_sits_outside_the_compounding():
    proj, disc = _curve(0.01), _curve(0.005)
    q = Quote(InstrumentClass.TENOR_SWAP, "USD_LIBOR_1M", "1Y", 0.001, "usd_ts_1m3m")
    spec = instrument_from_quote(q, V)
    ctx = PricingContext({("USD", "USD"): disc}, {"USD_LIBOR_3M": ForwardCurveView(proj, "3M"),
                                                  "USD_LIBOR_1M": ForwardCurveView(proj, "1M")})
    leg = spec.receive_leg
    annuity = sum(a * disc.df(p) for a, p in zip(leg.schedule.accruals, leg.schedule.pay_dates))
    assert pv(spec, ctx) == pytest.approx(leg.rate_or_spread * annuity, abs=1e-15)


class TestCrossCurrency:
    def _cn(self, spread=0.005):
        q = Quote(InstrumentClass.CNXCS, "USDMXN_XCS", "1092D", spread, "usdmxn_cnxcs")
        return instrument_from_quote(q, V, 1.0, "USD", 15.36)

    def test_mtm_equals_cn_when_forwards_are_flat(self):
        c = _curve(0.03)
        ctx = PricingContext(
            {("USD", "USD"): c, ("MXN", "USD"): c},
            {"USD_LIBOR_1M": ForwardCurveView(_curve(0.01), "1M"), "TIIE28D": ForwardCurveView(_curve(0.04), "28D")},
            {("TIIE28D", V): 0.03295}, {"USDMXN": 15.36},
        )
        cn = self._cn()
        mtm = replace(cn, receive_leg=replace(cn.receive_leg, resets_notional=True))
        assert fx_forward(ctx, "USD", "MXN", dt.date(2018, 1, 2), "USD") == pytest.approx(15.36, rel=1e-15)
        assert pv_mtmxcs(mtm, ctx) == pytest.approx(pv(cn, ctx), abs=1e-12)

    def test_report_currency(self):
        c = _curve(0.03)
        ctx = PricingContext(
            {("USD", "USD"): c, ("MXN", "USD"): _curve(0.05)},
            {"USD_LIBOR_1M": ForwardCurveView(_curve(0.01), "1M"), "TIIE28D": ForwardCurveView(_curve(0.04), "28D")},
            {("TIIE28D", V): 0.03295}, {"USDMXN": 15.36},
        )
        s = self._cn()
        assert pv(s, ctx, "USD") == pytest.approx(pv(s, ctx, "MXN") / 15.36, rel=1e-14)

    def test_missing_fx(self):
        c = _curve(0.03)
        ctx = PricingContext({("USD", "USD"): c, ("MXN", "USD"): c},
                             {"USD_LIBOR_1M": ForwardCurveView(c, "1M"), "TIIE28D": ForwardCurveView(c, "28D")},
                             {("TIIE28D", V): 0.03295})
        with pytest.raises(ContextError):
            pv(self._cn(), ctx)


class TestFixings:
    def _leg(self, start):
        sch = build_schedule(start, 0, "84D", "28D", "MX", "FOLLOWING", DayCount.ACT_360)
        return LegSpec(LegKind.IBOR, sch, 0.0, "TIIE28D", currency="MXN", fixing_calendar="MX", fixing_lag=1)

    def test_seasoned_coupon_needs_its_fixing(self):
        leg = self._leg(dt.date(2015, 5, 20))
        starts = leg.schedule.coupon_starts
        with pytest.raises(ContextError, match="2015-05-19"):
            fixing_overrides(leg, starts, V, {})
        got = fixing_overrides(leg, starts, V, {("TIIE28D", dt.date(2015, 5, 19)): 0.0329})
        assert got == {0: 0.0329}

    def test_fixing_today_is_optional(self):
        leg = self._leg(dt.date(2015, 6, 1))  # fixes on the valuation date
        starts = leg.schedule.coupon_starts
        assert fixing_overrides(leg, starts, V, {}) == {}
        assert fixing_overrides(leg, starts, V, {("TIIE28D", V): 0.03295}) == {0: 0.03295}


def test_missing_curve_raises_context_error():
    with pytest.raises(ContextError):
        pv(_irs(), PricingContext())


def test_leg_validation():
    sch = Schedule.from_dates(V, [V + dt.timedelta(days=28)], "ACT_360")
    with pytest.raises(InputError):
        LegSpec(LegKind.FIXED, sch, 0.05, index="TIIE28D")
    with pytest.raises(InputError):
        LegSpec(LegKind.IBOR, sch)
    with pytest.raises(InputError):
        LegSpec(LegKind.IBOR_COMPOUNDED, sch, index="USD_LIBOR_1M")


def test_term_sheet_file():
    spec, fixings = swap_from_dict(json.loads((SCRIPTS / "term_sheet_irs.json").read_text()))
    assert fixings == {}
    assert len(spec.pay_leg.schedule) == 65
    assert spec.pay_leg.schedule.start == dt.date(2015, 6, 1)
    assert spec.maturity == dt.date(2020, 5, 25)
    assert spec.pay_leg.rate_or_spread == pytest.approx(0.0487)
    with pytest.raises(InputError):
        swap_from_dict({"trade_date": "2015-05-29"})
