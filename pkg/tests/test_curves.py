import datetime as dt
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from multicurve.calendar_time import DayCount
from multicurve.curves import (
    CompositeCurve,
    Curve,
    ForwardCurveView,
    alpha_collateral_df,
    daily_forwards,
    forward_df,
    read_curve_csv,
    simple_forward,
    write_curve_csv,
    write_daily_forward_csv,
)
from multicurve.errors import DomainError, InputError

V = dt.date(2015, 5, 29)
PILLARS = (dt.date(2015, 6, 26), dt.date(2015, 11, 27), dt.date(2016, 5, 27), dt.date(2020, 5, 22),
           dt.date(2025, 5, 16))


def _curve(rates=(0.030, 0.032, 0.036, 0.052, 0.061), **kw):
    return Curve(V, PILLARS, rates, **kw)


def test_definitions():
    c = _curve()
    assert c.df(V) == 1.0
    T = PILLARS[2]
    x = (T - V).days / 360
    assert c.df(T) == pytest.approx(math.exp(-0.036 * x), rel=1e-15)
    assert c.zero_rate(T) == pytest.approx(0.036, abs=1e-15)
    with pytest.raises(DomainError):
        c.df(V - dt.timedelta(days=1))


def test_validation():
    with pytest.raises(InputError):
        Curve(V, PILLARS[:2], (0.01,))
    with pytest.raises(InputError):
        Curve(V, (PILLARS[1], PILLARS[0]), (0.01, 0.02))
    with pytest.raises(InputError):
        Curve(V, PILLARS[:1], (float("nan"),))
    with pytest.raises(InputError):
        CompositeCurve(((_curve(), 1.0), (_curve(time_dc=DayCount.ACT_365), 1.0)))


def test_single_pillar_is_flat():
    c = Curve(V, PILLARS[:1], (0.04,))
    assert c.zero_rate(dt.date(2030, 1, 1)) == pytest.approx(0.04)


def test_forward_view_matches_definition():
    c = _curve()
    v = ForwardCurveView(c, "28D", index="TIIE28D")
    s, e = dt.date(2015, 7, 1), dt.date(2015, 7, 29)
    want = (c.df(s) / c.df(e) - 1.0) / (28 / 360)
    assert simple_forward(v, s, e) == pytest.approx(want, rel=1e-14)
    assert forward_df(c, s, e) == pytest.approx(c.df(e) / c.df(s), rel=1e-15)
    with pytest.raises(DomainError):
        simple_forward(v, e, s)


def test_composite_and_alpha():
    a, b = _curve(), _curve(rates=(0.01,) * 5)
    comp = CompositeCurve(((a, 1.0), (b, -1.0)))
    T = dt.date(2019, 3, 1)
    assert comp.df(T) == pytest.approx(a.df(T) / b.df(T), rel=1e-14)
    assert comp.pillar_dates == PILLARS
    reknot = comp.to_curve()
    assert np.allclose(reknot.dfs(PILLARS), comp.dfs(PILLARS), rtol=1e-14)

    assert alpha_collateral_df(a, b, 1.0, T) == a.df(T)
    assert alpha_collateral_df(a, b, 0.0, T) == b.df(T)
    half = alpha_collateral_df(a, b, 0.5, T)
    assert half == pytest.approx(math.sqrt(a.df(T) * b.df(T)), rel=1e-14)
    with pytest.raises(DomainError):
        alpha_collateral_df(a, b, 1.5, T)


def test_csv_round_trip(tmp_path):
    c = _curve(label="test")
    p = tmp_path / "c.csv"
    write_curve_csv(c, p)
    back = read_curve_csv(p)
    assert back.pillar_dates == c.pillar_dates
    assert back.label == "test"
    assert np.max(np.abs(np.array(back.zero_rates) - np.array(c.zero_rates))) < 1e-13

    q = tmp_path / "f.csv"
    write_daily_forward_csv(c, q, end=dt.date(2015, 6, 30))
    lines = q.read_text().splitlines()
    assert lines[0] == "date,forward_rate" and len(lines) == 1 + 33


def test_daily_forwards_integrate_to_log_df():
    c = _curve()
    end = dt.date(2016, 1, 1)
    total = sum(f for _, f in daily_forwards(c, V, end - dt.timedelta(days=1)))
    assert total == pytest.approx(-math.log(c.df(end)), rel=1e-12)


@given(st.lists(st.floats(-0.01, 0.12), min_size=5, max_size=5), st.integers(1, 12000))
def test_discount_factors_positive_and_consistent(rates, days):
    c = _curve(rates=tuple(rates))
    T = V + dt.timedelta(days=days)
    p = c.df(T)
    assert p > 0
    assert c.zero_rate(T) == pytest.approx(-math.log(p) / (days / 360), abs=1e-12)
