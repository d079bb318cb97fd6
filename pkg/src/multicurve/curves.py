"""Zero-rate term structures and the conversions among them."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .calendar_time import DayCount, Tenor, year_fraction
from .errors import DomainError, InputError
from .numerics import InterpMethod, evaluate_spline, fit_natural_cubic, interpolation_matrix

Date = dt.date


def times_from(valuation: Date, dates: Iterable[Date], dc: DayCount) -> np.ndarray:
    """Year fractions from the valuation date, vectorised for ACT day counts."""
    dates = list(dates)
    dc = DayCount(dc)
    if dc is DayCount.ACT_360 or dc is DayCount.ACT_365:
        base = valuation.toordinal()
        days = np.fromiter((d.toordinal() - base for d in dates), float, len(dates))
        if np.any(days < 0):
            raise DomainError("date before valuation date")
        return days / (360.0 if dc is DayCount.ACT_360 else 365.0)
    return np.array([year_fraction(valuation, d, dc) for d in dates], float)


class DiscountCurve(Protocol):
    valuation_date: Date
    time_dc: DayCount
    label: str

    def df(self, T: Date) -> float: ...

    def dfs(self, dates: Sequence[Date]) -> np.ndarray: ...


@dataclass(frozen=True)
class Curve:
    """Knot-based continuously compounded zero curve, ``P = exp(-x R)``."""

    valuation_date: Date
    pillar_dates: tuple[Date, ...]
    zero_rates: tuple[float, ...]
    method: InterpMethod = InterpMethod.NATURAL_CUBIC_ON_YIELD
    time_dc: DayCount = DayCount.ACT_360
    label: str = ""
    _x: np.ndarray = field(init=False, repr=False, compare=False)
    _spline: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        dates = tuple(self.pillar_dates)
        rates = tuple(float(r) for r in self.zero_rates)
        if len(dates) != len(rates):
            raise InputError("pillar_dates and zero_rates differ in length")
        if not dates:
            raise InputError("a curve needs at least one pillar")
        if any(d < self.valuation_date for d in dates):
            raise InputError("pillar before valuation date")
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise InputError("pillar dates must be strictly increasing")
        if not all(math.isfinite(r) for r in rates):
            raise InputError("zero rates must be finite")
        object.__setattr__(self, "pillar_dates", dates)
        object.__setattr__(self, "zero_rates", rates)
        object.__setattr__(self, "method", InterpMethod.parse(self.method))
        object.__setattr__(self, "time_dc", DayCount(self.time_dc))
        x = times_from(self.valuation_date, dates, self.time_dc)
        object.__setattr__(self, "_x", x)
        spline = None
        if self.method is InterpMethod.NATURAL_CUBIC_ON_YIELD and len(dates) >= 2:
            spline = fit_natural_cubic((x, np.asarray(rates)))
        object.__setattr__(self, "_spline", spline)

    @property
    def knots(self) -> list[tuple[Date, float]]:
        return list(zip(self.pillar_dates, self.zero_rates))

    @property
    def knot_times(self) -> np.ndarray:
        return self._x.copy()

    def with_zero_rates(self, zero_rates: Sequence[float], label: str | None = None) -> "Curve":
        return Curve(self.valuation_date, self.pillar_dates, tuple(zero_rates), self.method,
                     self.time_dc, self.label if label is None else label)

    def time(self, T: Date) -> float:
        return float(times_from(self.valuation_date, [T], self.time_dc)[0])

    def zero_rate_at_times(self, x: np.ndarray) -> np.ndarray:
        z = np.asarray(self.zero_rates)
        if len(z) == 1:
            return np.full_like(np.asarray(x, float), z[0])
        if self._spline is not None:
            return evaluate_spline(self._spline, x)
        return interpolation_matrix(self.method, self._x, np.ravel(x)) @ z

    def zero_rate(self, T: Date) -> float:
        return float(self.zero_rate_at_times(np.array([self.time(T)]))[0])

    def dfs(self, dates: Sequence[Date]) -> np.ndarray:
        x = times_from(self.valuation_date, dates, self.time_dc)
        return np.exp(-x * self.zero_rate_at_times(x))

    def df(self, T: Date) -> float:
        if T < self.valuation_date:
            raise DomainError(f"{T} is before the valuation date {self.valuation_date}")
        if T == self.valuation_date:
            return 1.0
        return float(self.dfs([T])[0])


@dataclass(frozen=True)
class CompositeCurve:
    """Pointwise product of curve powers: ``df(T) = prod df_i(T) ** p_i``.

    Used for the change-of-collateral transform, which is a ratio of three
    discount curves and is kept exact rather than re-knotted.
    """

    factors: tuple[tuple[object, float], ...]
    label: str = ""

    def __post_init__(self):
        if not self.factors:
            raise InputError("composite curve needs at least one factor")
        v = {c.valuation_date for c, _ in self.factors}
        t = {c.time_dc for c, _ in self.factors}
        if len(v) != 1:
            raise InputError("composite factors disagree on the valuation date")
        if len(t) != 1:
            raise InputError("composite factors disagree on the time axis")

    @property
    def valuation_date(self) -> Date:
        return self.factors[0][0].valuation_date

    @property
    def time_dc(self) -> DayCount:
        return self.factors[0][0].time_dc

    @property
    def pillar_dates(self) -> tuple[Date, ...]:
        out: set[Date] = set()
        for c, _ in self.factors:
            out.update(c.pillar_dates)
        return tuple(sorted(out))

    def dfs(self, dates: Sequence[Date]) -> np.ndarray:
        out = np.ones(len(dates))
        for c, p in self.factors:
            if p == 1.0:
                out = out * c.dfs(dates)
            else:
                out = out * c.dfs(dates) ** p
        return out

    def df(self, T: Date) -> float:
        if T < self.valuation_date:
            raise DomainError(f"{T} is before the valuation date {self.valuation_date}")
        if T == self.valuation_date:
            return 1.0
        return float(self.dfs([T])[0])

    def zero_rate(self, T: Date) -> float:
        x = times_from(self.valuation_date, [T], self.time_dc)[0]
        if x == 0:
            raise DomainError("zero rate undefined at the valuation date")
        return -math.log(self.df(T)) / x

    def to_curve(self, dates: Sequence[Date] | None = None,
                 method: InterpMethod = InterpMethod.NATURAL_CUBIC_ON_YIELD) -> Curve:
        """Re-knot as zero rates on ``dates`` (default: union of factor pillars)."""
        dates = [d for d in (dates or self.pillar_dates) if d > self.valuation_date]
        x = times_from(self.valuation_date, dates, self.time_dc)
        z = -np.log(self.dfs(dates)) / x
        return Curve(self.valuation_date, tuple(dates), tuple(z), method, self.time_dc, self.label)


@dataclass(frozen=True)
class ForwardCurveView:
    """Simple forwards of an index projected off a pseudo-discount curve."""

    underlying: object
    index_tenor: Tenor | str = "1M"
    fixing_dc: DayCount = DayCount.ACT_360
    index: str = ""

    def __post_init__(self):
        object.__setattr__(self, "index_tenor", Tenor.parse(self.index_tenor))
        object.__setattr__(self, "fixing_dc", DayCount(self.fixing_dc))

    @property
    def valuation_date(self) -> Date:
        return self.underlying.valuation_date

    def forwards(self, starts: Sequence[Date], ends: Sequence[Date]) -> np.ndarray:
        starts, ends = list(starts), list(ends)
        p = self.underlying.dfs(starts + ends)
        n = len(starts)
        tau = accruals(starts, ends, self.fixing_dc)
        return (p[:n] / p[n:] - 1.0) / tau


def accruals(starts: Sequence[Date], ends: Sequence[Date], dc: DayCount) -> np.ndarray:
    dc = DayCount(dc)
    if dc is DayCount.ACT_360 or dc is DayCount.ACT_365:
        days = np.fromiter((e.toordinal() - s.toordinal() for s, e in zip(starts, ends)), float, len(starts))
        if np.any(days < 0):
            raise DomainError("accrual end before start")
        return days / (360.0 if dc is DayCount.ACT_360 else 365.0)
    return np.array([year_fraction(s, e, dc) for s, e in zip(starts, ends)], float)


# ---------------------------------------------------------------------------
# Functional interface


def df(c: DiscountCurve, T: Date) -> float:
    return c.df(T)


def forward_df(c: DiscountCurve, S: Date, T: Date) -> float:
    """Forward discount factor ``P(t,S,T) = P(t,T) / P(t,S)``."""
    if not (c.valuation_date <= S <= T):
        raise DomainError(f"need valuation <= S <= T, got {S}, {T}")
    if S == T:
        return 1.0
    return c.df(T) / c.df(S)


def simple_forward(v: ForwardCurveView, S: Date, T: Date) -> float:
    if S >= T:
        raise DomainError(f"simple forward needs S < T, got {S} >= {T}")
    if S < v.valuation_date:
        raise DomainError(f"{S} is before the valuation date")
    return float(v.forwards([S], [T])[0])


def daily_forward(c: DiscountCurve, T: Date) -> float:
    """Overnight log-forward ``ln(P(T) / P(T + 1d))``."""
    if T < c.valuation_date:
        raise DomainError(f"{T} is before the valuation date")
    p = c.dfs([T, T + dt.timedelta(days=1)])
    return float(math.log(p[0] / p[1]))


def daily_forwards(c: DiscountCurve, start: Date, end: Date) -> list[tuple[Date, float]]:
    n = (end - start).days
    days = [start + dt.timedelta(days=k) for k in range(n + 2)]
    p = c.dfs(days)
    return [(days[k], float(math.log(p[k] / p[k + 1]))) for k in range(n + 1)]


def alpha_collateral_df(c_coll: DiscountCurve, c_fund: DiscountCurve, alpha: float, T: Date) -> float:
    """Discount factor for a fraction ``alpha`` collateralised, deterministic rates.

    With deterministic collateral and funding rates the expectation in the
    definition factorises into ``P_coll(T)**alpha * P_fund(T)**(1 - alpha)``.
    """
    if not (0.0 <= alpha <= 1.0):
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    if alpha == 1.0:
        return c_coll.df(T)
    if alpha == 0.0:
        return c_fund.df(T)
    return c_coll.df(T) ** alpha * c_fund.df(T) ** (1.0 - alpha)


# ---------------------------------------------------------------------------
# CSV export / import


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_curve_csv(curve: DiscountCurve, path: str | Path, dates: Sequence[Date] | None = None) -> None:
    """Columns ``pillar_date, zero_rate, discount_factor`` with a metadata header."""
    dates = [d for d in (dates or curve.pillar_dates) if d > curve.valuation_date]
    p = curve.dfs(dates)
    x = times_from(curve.valuation_date, dates, curve.time_dc)
    method = getattr(curve, "method", None)
    with open(path, "w", newline="") as fh:
        fh.write(f"# label={curve.label}\n")
        fh.write(f"# valuation_date={curve.valuation_date.isoformat()}\n")
        fh.write(f"# time_dc={curve.time_dc.value}\n")
        fh.write(f"# method={method.value if method else 'COMPOSITE'}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pillar_date", "zero_rate", "discount_factor"])
        for d, xi, pi in zip(dates, x, p):
            w.writerow([d.isoformat(), _fmt(-math.log(pi) / xi), _fmt(pi)])


def read_curve_csv(path: str | Path, method: InterpMethod | str | None = None) -> Curve:
    meta: dict[str, str] = {}
    rows = []
    with open(path, newline="") as fh:
        body = []
        for line in fh:
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                meta[k.strip()] = v.strip()
            elif line.strip():
                body.append(line)
        for row in csv.DictReader(body):
            rows.append((Date.fromisoformat(row["pillar_date"]), float(row["zero_rate"])))
    if "valuation_date" not in meta:
        raise InputError(f"{path}: missing '# valuation_date=' header")
    m = method or meta.get("method", InterpMethod.NATURAL_CUBIC_ON_YIELD.value)
    if m == "COMPOSITE":
        m = InterpMethod.NATURAL_CUBIC_ON_YIELD
    return Curve(
        Date.fromisoformat(meta["valuation_date"]),
        tuple(d for d, _ in rows),
        tuple(r for _, r in rows),
        InterpMethod.parse(m),
        DayCount(meta.get("time_dc", "ACT_360")),
        meta.get("label", Path(path).stem),
    )


def write_daily_forward_csv(curve: DiscountCurve, path: str | Path, end: Date | None = None) -> None:
    end = end or max(curve.pillar_dates)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "forward_rate"])
        for d, f in daily_forwards(curve, curve.valuation_date, end):
            w.writerow([d.isoformat(), _fmt(f)])
