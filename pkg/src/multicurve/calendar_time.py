"""Dates, holiday calendars, day counts, rolling and coupon schedules.

Dates are plain :class:`datetime.date` objects; every tenor step is done in
integer days or integer months before any business-day adjustment.
"""

from __future__ import annotations

import calendar as _stdcal
import datetime as dt
import os
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Iterable

from .errors import InputError, OrderingError, ScheduleError

Date = dt.date

HOLIDAY_FILE_YEARS = (2014, 2080)
DATA_DIR = Path(__file__).resolve().parent / "data"


class CalendarId(str, Enum):
    MX = "MX"
    US = "US"
    UK = "UK"
    TARGET = "TARGET"
    US_UK = "US_UK"
    US_MX = "US_MX"
    US_UK_MX = "US_UK_MX"

    @property
    def members(self) -> tuple["CalendarId", ...]:
        if self in _BASE_CALENDARS:
            return (self,)
        return tuple(CalendarId(p) for p in self.value.split("_"))


_BASE_CALENDARS = frozenset({"MX", "US", "UK", "TARGET"})


class DayCount(str, Enum):
    ACT_360 = "ACT_360"
    ACT_365 = "ACT_365"
    ACT_ACT_ISDA = "ACT_ACT_ISDA"
    THIRTY_360 = "THIRTY_360"


class RollConvention(str, Enum):
    FOLLOWING = "FOLLOWING"
    MODIFIED_FOLLOWING = "MODIFIED_FOLLOWING"


class StubPolicy(str, Enum):
    NONE = "NONE"
    SHORT_FRONT = "SHORT_FRONT"


# ---------------------------------------------------------------------------
# Holiday rules


def easter_sunday(year: int) -> Date:
    """Gregorian Easter Sunday (anonymous Gregorian computus)."""
    a = year % 19
    b, c = divmod(year, 100)
    d, e = divmod(b, 4)
    f = (b + 8) // 25
    g = (b - f + 1) // 3
    h = (19 * a + b - d - g + 15) % 30
    i, k = divmod(c, 4)
    l = (32 + 2 * e + 2 * i - h - k) % 7
    m = (a + 11 * h + 22 * l) // 451
    month, day = divmod(h + l - 7 * m + 114, 31)
    return Date(year, month, day + 1)


def _nth_weekday(year: int, month: int, weekday: int, n: int) -> Date:
    """n-th given weekday of a month; n = -1 means the last one."""
    if n > 0:
        first = Date(year, month, 1)
        offset = (weekday - first.weekday()) % 7
        return first + dt.timedelta(days=offset + 7 * (n - 1))
    last = Date(year, month, _stdcal.monthrange(year, month)[1])
    return last - dt.timedelta(days=(last.weekday() - weekday) % 7)


def _observed_nearest(d: Date) -> Date:
    # Saturday -> Friday, Sunday -> Monday
    if d.weekday() == 5:
        return d - dt.timedelta(days=1)
    if d.weekday() == 6:
        return d + dt.timedelta(days=1)
    return d


def _mx_rules(y: int) -> set[Date]:
    easter = easter_sunday(y)
    return {
        Date(y, 1, 1),
        _nth_weekday(y, 2, 0, 1),  # Constitution Day
        _nth_weekday(y, 3, 0, 3),  # Juarez
        easter - dt.timedelta(days=3),
        easter - dt.timedelta(days=2),
        Date(y, 5, 1),
        Date(y, 9, 16),
        Date(y, 11, 2),
        _nth_weekday(y, 11, 0, 3),  # Revolution Day
        Date(y, 12, 12),  # bank holiday
        Date(y, 12, 25),
    }


def _us_rules(y: int) -> set[Date]:
    new_year = Date(y, 1, 1)
    if new_year.weekday() == 6:
        new_year += dt.timedelta(days=1)
    return {
        new_year,
        _nth_weekday(y, 1, 0, 3),
        _nth_weekday(y, 2, 0, 3),
        easter_sunday(y) - dt.timedelta(days=2),
        _nth_weekday(y, 5, 0, -1),
        _observed_nearest(Date(y, 7, 4)),
        _nth_weekday(y, 9, 0, 1),
        _nth_weekday(y, 10, 0, 2),
        _observed_nearest(Date(y, 11, 11)),
        _observed_nearest(Date(y, 12, 25)),
    }


def _uk_rules(y: int) -> set[Date]:
    easter = easter_sunday(y)
    new_year = Date(y, 1, 1)
    while new_year.weekday() >= 5:
        new_year += dt.timedelta(days=1)
    out = {
        new_year,
        easter - dt.timedelta(days=2),
        easter + dt.timedelta(days=1),
        _nth_weekday(y, 5, 0, 1),
        _nth_weekday(y, 5, 0, -1),
        _nth_weekday(y, 8, 0, -1),
    }
    # Christmas and Boxing Day, each pushed to the next free weekday
    for day in (Date(y, 12, 25), Date(y, 12, 26)):
        while day.weekday() >= 5 or day in out:
            day += dt.timedelta(days=1)
        out.add(day)
    return out


def _target_rules(y: int) -> set[Date]:
    easter = easter_sunday(y)
    return {
        Date(y, 1, 1),
        easter - dt.timedelta(days=2),
        easter + dt.timedelta(days=1),
        Date(y, 5, 1),
        Date(y, 12, 25),
        Date(y, 12, 26),
    }


_RULES = {"MX": _mx_rules, "US": _us_rules, "UK": _uk_rules, "TARGET": _target_rules}


def rule_holidays(cal: CalendarId | str, year: int) -> set[Date]:
    """Weekday holidays of a base calendar generated from its rules."""
    cal = CalendarId(cal)
    if cal.value not in _RULES:
        raise InputError(f"{cal.value} is a joint calendar; ask its members")
    return {d for d in _RULES[cal.value](year) if d.weekday() < 5}


def write_holiday_file(cal: CalendarId | str, path: str | Path, years=HOLIDAY_FILE_YEARS) -> None:
    cal = CalendarId(cal)
    days = sorted(d for y in range(years[0], years[1] + 1) for d in rule_holidays(cal, y))
    Path(path).write_text("".join(f"{d.isoformat()}\n" for d in days))


def read_holiday_file(path: str | Path) -> frozenset[Date]:
    out = set()
    for n, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            out.add(Date.fromisoformat(line))
        except ValueError as exc:
            raise InputError(f"{path}:{n}: bad date {line!r}") from exc
    return frozenset(out)


def _holiday_dir() -> Path | None:
    root = os.environ.get("MULTICURVE_DATA_DIR")
    if root:
        p = Path(root) / "holidays"
        if p.is_dir():
            return p
    return None


@lru_cache(maxsize=None)
def _holidays_for(cal: str, override_dir: str | None) -> tuple[frozenset[Date], int, int]:
    if override_dir is not None and (Path(override_dir) / f"{cal}.txt").exists():
        days = read_holiday_file(Path(override_dir) / f"{cal}.txt")
    else:
        ref = DATA_DIR / "holidays" / f"{cal}.txt"
        days = read_holiday_file(ref) if ref.is_file() else frozenset()
    if days:
        return days, min(d.year for d in days), max(d.year for d in days)
    return days, 1, 0


@lru_cache(maxsize=None)
def _rule_year(cal: str, year: int) -> frozenset[Date]:
    return frozenset(rule_holidays(cal, year))


def is_holiday(d: Date, cal: CalendarId | str) -> bool:
    cal = CalendarId(cal)
    override = _holiday_dir()
    for member in cal.members:
        days, lo, hi = _holidays_for(member.value, str(override) if override else None)
        if lo <= d.year <= hi:
            if d in days:
                return True
        elif d in _rule_year(member.value, d.year):
            return True
    return False


def is_business_day(d: Date, cal: CalendarId | str) -> bool:
    return d.weekday() < 5 and not is_holiday(d, cal)


def roll(d: Date, cal: CalendarId | str, conv: RollConvention | str) -> Date:
    conv = RollConvention(conv)
    out = d
    while not is_business_day(out, cal):
        out += dt.timedelta(days=1)
    if conv is RollConvention.MODIFIED_FOLLOWING and out.month != d.month:
        out = d
        while not is_business_day(out, cal):
            out -= dt.timedelta(days=1)
    return out


def add_business_days(d: Date, n: int, cal: CalendarId | str) -> Date:
    """Move ``n`` business days forward (n >= 0). n = 0 rolls Following."""
    out = d
    if n == 0:
        return roll(d, cal, RollConvention.FOLLOWING)
    step = 1 if n > 0 else -1
    for _ in range(abs(n)):
        out += dt.timedelta(days=step)
        while not is_business_day(out, cal):
            out += dt.timedelta(days=step)
    return out


def add_months(d: Date, months: int) -> Date:
    y, m = divmod(d.month - 1 + months, 12)
    y += d.year
    m += 1
    return Date(y, m, min(d.day, _stdcal.monthrange(y, m)[1]))


# ---------------------------------------------------------------------------
# Day counts


def year_fraction(d1: Date, d2: Date, dc: DayCount | str) -> float:
    if d1 > d2:
        raise OrderingError(f"year_fraction needs d1 <= d2, got {d1} > {d2}")
    dc = DayCount(dc)
    days = (d2 - d1).days
    if dc is DayCount.ACT_360:
        return days / 360.0
    if dc is DayCount.ACT_365:
        return days / 365.0
    if dc is DayCount.THIRTY_360:
        day1, day2 = d1.day, d2.day
        if day1 == 31:
            day1 = 30
        if day2 == 31 and day1 >= 30:
            day2 = 30
        return (360 * (d2.year - d1.year) + 30 * (d2.month - d1.month) + (day2 - day1)) / 360.0
    # ACT/ACT ISDA: split at year boundaries
    if days == 0:
        return 0.0
    total = 0.0
    cur = d1
    while cur < d2:
        nxt = min(Date(cur.year + 1, 1, 1), d2)
        basis = 366.0 if _stdcal.isleap(cur.year) else 365.0
        total += (nxt - cur).days / basis
        cur = nxt
    return total


# ---------------------------------------------------------------------------
# Tenors and schedules

_TENOR_RE = re.compile(r"^\s*(\d+)\s*([DWMY])\s*$", re.IGNORECASE)


@dataclass(frozen=True, order=True)
class Tenor:
    """A count of days, weeks, months or years, e.g. ``28D`` or ``18M``."""

    n: int
    unit: str

    @classmethod
    def parse(cls, text: "str | Tenor") -> "Tenor":
        if isinstance(text, Tenor):
            return text
        m = _TENOR_RE.match(str(text))
        if not m:
            raise InputError(f"cannot parse tenor {text!r}")
        n, unit = int(m.group(1)), m.group(2).upper()
        if n <= 0:
            raise InputError(f"tenor must be positive: {text!r}")
        return cls(n, unit)

    @property
    def is_day_based(self) -> bool:
        return self.unit in ("D", "W")

    @property
    def days(self) -> int:
        if not self.is_day_based:
            raise InputError(f"{self} is not day based")
        return self.n * (7 if self.unit == "W" else 1)

    @property
    def months(self) -> int:
        if self.is_day_based:
            raise InputError(f"{self} is not month based")
        return self.n * (12 if self.unit == "Y" else 1)

    def add_to(self, d: Date, times: int = 1) -> Date:
        if self.is_day_based:
            return d + dt.timedelta(days=self.days * times)
        return add_months(d, self.months * times)

    def __str__(self) -> str:
        return f"{self.n}{self.unit}"


@dataclass(frozen=True)
class Schedule:
    start: Date
    coupon_ends: tuple[Date, ...]
    pay_dates: tuple[Date, ...]
    accruals: tuple[float, ...]

    def __post_init__(self):
        n = len(self.coupon_ends)
        if len(self.pay_dates) != n or len(self.accruals) != n:
            raise ScheduleError("coupon_ends, pay_dates and accruals differ in length")
        prev = self.start
        for end, pay in zip(self.coupon_ends, self.pay_dates):
            if end <= prev:
                raise ScheduleError("coupon ends must be strictly increasing")
            if pay < end:
                raise ScheduleError("payment before coupon end")
            prev = end

    @property
    def coupon_starts(self) -> tuple[Date, ...]:
        return (self.start,) + self.coupon_ends[:-1]

    @property
    def end(self) -> Date:
        return self.coupon_ends[-1]

    def __len__(self) -> int:
        return len(self.coupon_ends)

    @classmethod
    def from_dates(cls, start: Date, ends: Iterable[Date], dc: DayCount | str) -> "Schedule":
        ends = tuple(ends)
        starts = (start,) + ends[:-1]
        return cls(start, ends, ends, tuple(year_fraction(s, e, dc) for s, e in zip(starts, ends)))


def build_schedule(
    trade: Date,
    spot_lag_days: int,
    tenor: Tenor | str,
    freq: Tenor | str,
    cal: CalendarId | str,
    conv: RollConvention | str,
    dc: DayCount | str,
    stub: StubPolicy | str = StubPolicy.NONE,
) -> Schedule:
    """Coupon schedule starting ``spot_lag_days`` business days after trade.

    Day tenors step on the unrolled grid ``start + k*freq`` and roll each
    point; month tenors do the same with calendar months. A short front stub
    is produced by stepping backward from the maturity.
    """
    tenor, freq = Tenor.parse(tenor), Tenor.parse(freq)
    stub = StubPolicy(stub)
    start = add_business_days(trade, spot_lag_days, cal)
    if tenor.is_day_based != freq.is_day_based:
        raise ScheduleError(f"tenor {tenor} and frequency {freq} use different units")
    if tenor.is_day_based:
        total, step = tenor.days, freq.days
    else:
        total, step = tenor.months, freq.months
    n_full, rem = divmod(total, step)
    if rem and stub is StubPolicy.NONE:
        raise ScheduleError(f"tenor {tenor} is not a multiple of {freq}; supply a stub policy")

    def unit_offset(k: int) -> Date:
        if tenor.is_day_based:
            return start + dt.timedelta(days=k)
        return add_months(start, k)

    # offsets counted from the maturity backwards, so a stub lands up front
    offsets = sorted({total - j * step for j in range(n_full + 1) if total - j * step > 0})
    ends = []
    for k in offsets:
        d = roll(unit_offset(k), cal, conv)
        if not ends or d > ends[-1]:
            ends.append(d)
    return Schedule.from_dates(start, ends, dc)


def spot_date(trade: Date, lag: int, cal: CalendarId | str) -> Date:
    return add_business_days(trade, lag, cal)
