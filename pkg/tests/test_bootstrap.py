import datetime as dt
import random
from dataclasses import replace

import numpy as np
import pytest

from multicurve.bootstrap import (
    BootstrapConfig,
    BootstrapReport,
    PillarResult,
    bootstrap_collateral_spread,
    bootstrap_libor3m,
    bootstrap_ois_usd,
    bootstrap_single_curve_tiie,
    reprice,
)
from multicurve.curves import ForwardCurveView
from multicurve.errors import InputError
from multicurve.instruments import PricingContext, cash_period, instrument_from_quote, instruments_from_snapshot
from multicurve.market_data import InstrumentClass, builtin_fixture
from multicurve.numerics import InterpMethod


@pytest.fixture(scope="module")
def ois_snap():
    return builtin_fixture("usd_ois")


def _ff_ctx(curve):
    return PricingContext({("USD", "USD"): curve}, {"FEDFUNDS": ForwardCurveView(curve, "1D", index="FEDFUNDS")})


@pytest.mark.parametrize("method", list(InterpMethod))
def test_ois_reprices_under_every_interpolation(ois_snap, method):
    curve, rep = bootstrap_ois_usd(ois_snap, BootstrapConfig(interp=method), with_report=True)
    assert rep.converged
    worst = max(abs(v) for _, v in reprice(instruments_from_snapshot(ois_snap), _ff_ctx(curve)))
    assert worst <= 1e-9


def test_one_week_is_closed_form(ois_snap):
    curve = bootstrap_ois_usd(ois_snap)
    q = ois_snap.get(InstrumentClass.OIS, "FEDFUNDS", "1W")
    sch = instrument_from_quote(q, ois_snap.as_of).pay_leg.schedule
    assert len(sch) == 1
    want = curve.df(sch.start) / (1.0 + q.value * sch.accruals[0])
    assert curve.df(sch.end) == pytest.approx(want, abs=1e-13)


def test_quote_order_does_not_matter(ois_snap):
    base = bootstrap_ois_usd(ois_snap)
    quotes = list(ois_snap.quotes)
    random.Random(7).shuffle(quotes)
    shuffled = bootstrap_ois_usd(ois_snap.with_quotes(quotes))
    assert shuffled.zero_rates == base.zero_rates
    assert shuffled.pillar_dates == base.pillar_dates


def test_flat_tiie_market_gives_near_flat_forwards():
    snap = builtin_fixture("mxn_tiie_xcs")
    r = 0.05
    flat = snap.with_quotes(replace(q, value=r) for q in snap.quotes if q.instrument_class is not InstrumentClass.CNXCS)
    flat = replace(flat, fixings={})
    curve = bootstrap_single_curve_tiie(flat)
    sch = instrument_from_quote(flat.get("IRS", "TIIE28D", "10920D"), flat.as_of).receive_leg.schedule
    fwd = ForwardCurveView(curve, "28D").forwards(sch.coupon_starts, sch.coupon_ends)
    # ON and TN accrue over 3 and 1 days, so the short zeros differ slightly
    # and the spline leaves a sub-bp wiggle; the first coupon is pinned
    assert abs(fwd[0] - r) <= 1e-13
    assert np.max(np.abs(fwd - r)) <= 1e-4


def test_libor3m_cash_section(ois_snap):
    snap = builtin_fixture("usd_libor3m")
    ois = bootstrap_ois_usd(ois_snap)
    view, rep = bootstrap_libor3m(snap, ois, with_report=True)
    assert rep.converged
    for q in snap.select(InstrumentClass.CASH):
        s, e = cash_period(q, snap.as_of)
        assert view.forwards([s], [e])[0] == pytest.approx(q.value, abs=1e-12)


def test_collateral_spread_agrees_with_the_dual_curve(pipeline):
    # the spread bootstrap on the dual F curve, knotted like D, must give D back
    cs = pipeline.curve_set
    D, F = cs.disc_usd_coll, cs.tiie_fwd
    got = bootstrap_collateral_spread(pipeline.snapshots["mxn"], F.underlying, F, pipeline.ois, pipeline.libor1m,
                                      knot_dates=D.pillar_dates)
    probe = [D.valuation_date + dt.timedelta(days=k) for k in range(1, 10925, 5)]
    assert np.max(np.abs(got.dfs(probe) - D.dfs(probe))) <= 1e-10


def test_missing_instruments(ois_snap):
    no_ois = ois_snap.with_quotes(q for q in ois_snap.quotes if q.instrument_class is InstrumentClass.CASH)
    with pytest.raises(InputError):
        bootstrap_ois_usd(no_ois)
    ois = bootstrap_ois_usd(ois_snap)
    stale = replace(builtin_fixture("usd_libor3m"), as_of=dt.date(2015, 5, 28))
    with pytest.raises(InputError):
        bootstrap_libor3m(stale, ois)


def test_config_validation():
    with pytest.raises(InputError):
        BootstrapConfig(tol_df=0.0)
    with pytest.raises(InputError):
        BootstrapConfig(max_iter=0)
    assert BootstrapConfig(interp="linear").interp is InterpMethod.LINEAR_ON_YIELD


def test_report_csv_and_merge():
    d = dt.date(2015, 6, 1)
    a = BootstrapReport((PillarResult("OIS:FEDFUNDS:1W", d, 1e-13, 1),), True, 1e-13, 1, "a")
    b = BootstrapReport((PillarResult("OIS:FEDFUNDS:2W", d, -2e-12, 3),), False, 2e-12, 2, "b")
    m = a.merged(b)
    assert not m.converged and m.worst_residual == 2e-12 and m.sweeps == 3
    lines = m.to_csv().splitlines()
    assert lines[0] == "instrument,pillar,residual,iterations"
    assert lines[2] == "OIS:FEDFUNDS:2W,2015-06-01,-2.000000e-12,3"
