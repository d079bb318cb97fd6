import datetime as dt

import pytest
from hypothesis import given, strategies as st

from multicurve.calendar_time import (
    DATA_DIR,
    HOLIDAY_FILE_YEARS,
    CalendarId,
    DayCount,
    Schedule,
    Tenor,
    _holidays_for,
    add_business_days,
    add_months,
    build_schedule,
    easter_sunday,
    is_business_day,
    is_holiday,
    read_holiday_file,
    roll,
    rule_holidays,
    year_fraction,
)
from multicurve.errors import InputError, OrderingError, ScheduleError

D = dt.date
dates = st.dates(min_value=D(2014, 1, 1), max_value=D(2079, 12, 1))


@pytest.mark.parametrize("cal", ["MX", "US", "UK", "TARGET"])
def test_holiday_files_agree_with_rules(cal):
    shipped = read_holiday_file(DATA_DIR / "holidays" / f"{cal}.txt")
    lo, hi = HOLIDAY_FILE_YEARS
    from_rules = {d for y in range(lo, hi + 1) for d in rule_holidays(cal, y)}
    assert shipped == from_rules


@pytest.mark.parametrize("year,expected", [(2015, D(2015, 4, 5)), (2016, D(2016, 3, 27)),
                                           (2019, D(2019, 4, 21)), (2038, D(2038, 4, 25))])
def test_easter(year, expected):
    assert easter_sunday(year) == expected


def test_mexican_holidays_2015():
    assert sorted(rule_holidays("MX", 2015)) == [
        D(2015, 1, 1), D(2015, 2, 2), D(2015, 3, 16), D(2015, 4, 2), D(2015, 4, 3), D(2015, 5, 1),
        D(2015, 9, 16), D(2015, 11, 2), D(2015, 11, 16), D(2015, 12, 25),
    ]


def test_joint_calendar_is_union():
    # US Memorial Day is not a London holiday; UK late May bank holiday is the same day in 2015
    assert is_holiday(D(2015, 5, 25), "US_UK")
    assert is_holiday(D(2015, 8, 31), "US_UK")  # UK summer bank holiday only
    assert not is_holiday(D(2015, 8, 31), "US")
    with pytest.raises(InputError):
        rule_holidays("US_UK", 2015)


def test_spot_dates_from_valuation():
    val = D(2015, 5, 29)  # a Friday
    assert add_business_days(val, 1, "MX") == D(2015, 6, 1)
    assert add_business_days(val, 2, "US") == D(2015, 6, 2)
    assert add_business_days(D(2015, 5, 30), 0, "MX") == D(2015, 6, 1)


def test_roll_conventions():
    assert roll(D(2015, 1, 31), "UK", "FOLLOWING") == D(2015, 2, 2)
    assert roll(D(2015, 1, 31), "UK", "MODIFIED_FOLLOWING") == D(2015, 1, 30)
    assert roll(D(2015, 4, 2), "MX", "FOLLOWING") == D(2015, 4, 6)


def test_override_directory(tmp_path, monkeypatch):
    (tmp_path / "holidays").mkdir()
    (tmp_path / "holidays" / "MX.txt").write_text("# test\n2015-06-01\n")
    monkeypatch.setenv("MULTICURVE_DATA_DIR", str(tmp_path))
    try:
        assert is_holiday(D(2015, 6, 1), "MX")
        assert not is_holiday(D(2015, 12, 25), "MX")
    finally:
        _holidays_for.cache_clear()


def test_bad_holiday_file_names_the_line(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("2015-01-01\nnot-a-date\n")
    with pytest.raises(InputError, match=":2:"):
        read_holiday_file(p)


class TestDayCounts:
    def test_simple(self):
        a, b = D(2015, 6, 1), D(2015, 6, 29)
        assert year_fraction(a, b, DayCount.ACT_360) == 28 / 360
        assert year_fraction(a, b, DayCount.ACT_365) == 28 / 365

    def test_act_act_splits_years(self):
        got = year_fraction(D(2015, 7, 1), D(2016, 7, 1), "ACT_ACT_ISDA")
        assert got == pytest.approx(184 / 365 + 182 / 366, abs=1e-15)

    def test_thirty_360(self):
        assert year_fraction(D(2015, 1, 31), D(2015, 3, 31), "THIRTY_360") == 60 / 360
        assert year_fraction(D(2015, 1, 15), D(2015, 3, 31), "THIRTY_360") == 76 / 360

    def test_order(self):
        with pytest.raises(OrderingError):
            year_fraction(D(2015, 2, 1), D(2015, 1, 1), "ACT_360")


def test_tenor_parsing():
    assert Tenor.parse("28d") == Tenor(28, "D")
    assert Tenor.parse("2W").days == 14
    assert Tenor.parse("1Y").months == 12
    for bad in ("0D", "3Q", "", "M3"):
        with pytest.raises(InputError):
            Tenor.parse(bad)
    with pytest.raises(InputError):
        Tenor.parse("1M").days


def test_term_sheet_schedule():
    # 1820D TIIE swap traded on 2015-01-29: 65 coupons of 28 days
    s = build_schedule(D(2015, 1, 29), 1, "1820D", "28D", CalendarId.MX, "FOLLOWING", "ACT_360")
    assert len(s) == 65
    assert s.start == D(2015, 1, 30)
    assert s.end == D(2020, 1, 24)
    assert all(is_business_day(d, "MX") for d in s.coupon_ends)


def test_front_stub_and_unit_mismatch():
    s = build_schedule(D(2015, 5, 29), 2, "9M", "6M", "US_UK", "MODIFIED_FOLLOWING", "ACT_360", "SHORT_FRONT")
    assert len(s) == 2
    assert (s.coupon_ends[0] - s.start).days < 100
    with pytest.raises(ScheduleError):
        build_schedule(D(2015, 5, 29), 2, "9M", "6M", "US_UK", "MODIFIED_FOLLOWING", "ACT_360")
    with pytest.raises(ScheduleError):
        build_schedule(D(2015, 5, 29), 2, "364D", "3M", "US_UK", "FOLLOWING", "ACT_360")


def test_schedule_validation():
    with pytest.raises(ScheduleError):
        Schedule(D(2015, 6, 1), (D(2015, 6, 1),), (D(2015, 6, 1),), (0.0,))
    with pytest.raises(ScheduleError):
        Schedule(D(2015, 6, 1), (D(2015, 7, 1),), (D(2015, 6, 30),), (30 / 360,))


@given(dates, st.sampled_from(["MX", "US", "UK", "US_UK", "US_UK_MX"]))
def test_roll_lands_on_a_business_day(d, cal):
    out = roll(d, cal, "FOLLOWING")
    assert is_business_day(out, cal)
    assert d <= out <= d + dt.timedelta(days=10)
    mf = roll(d, cal, "MODIFIED_FOLLOWING")
    assert is_business_day(mf, cal) and mf.month == d.month


@given(dates, st.integers(1, 15))
def test_business_day_steps_are_monotone(d, n):
    a = add_business_days(d, n, "MX")
    b = add_business_days(d, n + 1, "MX")
    assert d < a < b


@given(dates, st.integers(-120, 120))
def test_add_months_clips_to_month_end(d, m):
    out = add_months(d, m)
    assert (out.year - d.year) * 12 + out.month - d.month == m
    assert out.day <= d.day
