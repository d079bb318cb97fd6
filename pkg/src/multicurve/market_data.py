"""Quote files, market snapshots, convention profiles and bundled fixtures.

Quote CSV layout::

    # as_of=2015-05-29
    # fx USDMXN=15.36
    # fixing TIIE28D 2015-05-29=3.295
    class,index,tenor,value_pct,profile
    IRS,TIIE28D,84D,3.32,tiie_irs

Values are quoted in percent on disk and held as decimals in memory.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import os
import re
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .calendar_time import (
    DATA_DIR,
    CalendarId,
    DayCount,
    RollConvention,
    StubPolicy,
    Tenor,
)
from .errors import InputError, ParseError

Date = dt.date

HEADER = ("class", "index", "tenor", "value_pct", "profile")


class InstrumentClass(str, Enum):
    CASH = "CASH"
    OIS = "OIS"
    IRS = "IRS"
    TENOR_SWAP = "TENOR_SWAP"
    CNXCS = "CNXCS"


@dataclass(frozen=True)
class ConventionProfile:
    """Named set of market conventions attached to a quote.

    ``fixed_freq`` of ``None`` means a single fixed payment at maturity.
    ``compounding`` is the reset period of a compounded floating leg.
    ``spread_sign`` records how a basis quote is stored: +1 means the value
    is added to the leg named by ``spread_leg``.
    """

    name: str
    calendar: CalendarId
    roll: RollConvention
    spot_lag: int
    float_freq: str | None = None
    float_dc: DayCount = DayCount.ACT_360
    fixed_freq: str | None = None
    fixed_dc: DayCount = DayCount.ACT_360
    stub: StubPolicy = StubPolicy.NONE
    fixing_calendar: CalendarId | None = None
    fixing_lag: int = 0
    compounding: str | None = None
    spread_leg: str | None = None
    spread_sign: int = 1


PROFILES: dict[str, ConventionProfile] = {
    p.name: p
    for p in (
        ConventionProfile("mxn_cash", CalendarId.MX, RollConvention.FOLLOWING, 1),
        ConventionProfile("usd_ff_cash", CalendarId.US, RollConvention.FOLLOWING, 2),
        ConventionProfile("usd_libor_cash", CalendarId.US_UK, RollConvention.MODIFIED_FOLLOWING, 2),
        ConventionProfile(
            "tiie_irs", CalendarId.MX, RollConvention.FOLLOWING, 1,
            float_freq="28D", fixed_freq="28D",
            fixing_calendar=CalendarId.MX, fixing_lag=1,
        ),
        ConventionProfile(
            "usdmxn_cnxcs", CalendarId.US_MX, RollConvention.FOLLOWING, 2,
            float_freq="28D", fixed_freq=None,
            fixing_calendar=CalendarId.MX, fixing_lag=1, spread_leg="USD",
        ),
        ConventionProfile(
            "usd_ois", CalendarId.US, RollConvention.MODIFIED_FOLLOWING, 2,
            float_freq="12M", fixed_freq="12M", stub=StubPolicy.SHORT_FRONT,
        ),
        ConventionProfile(
            "usd_irs_3m", CalendarId.US_UK, RollConvention.MODIFIED_FOLLOWING, 2,
            float_freq="3M", fixed_freq="6M", fixed_dc=DayCount.THIRTY_360,
            stub=StubPolicy.SHORT_FRONT, fixing_calendar=CalendarId.UK, fixing_lag=2,
        ),
        ConventionProfile(
            "usd_irs_1m_short", CalendarId.US_UK, RollConvention.MODIFIED_FOLLOWING, 2,
            float_freq="1M", fixed_freq=None,
            fixing_calendar=CalendarId.UK, fixing_lag=2,
        ),
        ConventionProfile(
            "usd_ts_1m3m", CalendarId.US_UK, RollConvention.MODIFIED_FOLLOWING, 2,
            float_freq="3M", stub=StubPolicy.SHORT_FRONT,
            fixing_calendar=CalendarId.UK, fixing_lag=2,
            compounding="1M", spread_leg="1M", spread_sign=1,
        ),
        # same swap, quoted negative from the 3m payer's side
        ConventionProfile(
            "usd_ts_1m3m_payer3m", CalendarId.US_UK, RollConvention.MODIFIED_FOLLOWING, 2,
            float_freq="3M", stub=StubPolicy.SHORT_FRONT,
            fixing_calendar=CalendarId.UK, fixing_lag=2,
            compounding="1M", spread_leg="1M", spread_sign=-1,
        ),
    )
}


def _pct_to_decimal(text: str) -> float:
    return float(Decimal(text.strip()) / 100)


def _decimal_to_pct(value: float) -> str:
    d = (Decimal(repr(value)) * 100).normalize()
    s = format(d, "f")
    return s


_SPECIAL_TENORS = {"ON": 1, "TN": 2}


def tenor_days_estimate(label: str) -> float:
    """Rough length in days; only used to order quotes."""
    label = label.strip().upper()
    if label in _SPECIAL_TENORS:
        return float(_SPECIAL_TENORS[label])
    t = Tenor.parse(label)
    if t.is_day_based:
        return float(t.days)
    return t.months * 30.4375


@dataclass(frozen=True)
class Quote:
    instrument_class: InstrumentClass
    index: str
    tenor: str
    value: float
    profile: str

    def __post_init__(self):
        object.__setattr__(self, "instrument_class", InstrumentClass(self.instrument_class))
        label = self.tenor.strip().upper()
        if label not in _SPECIAL_TENORS:
            Tenor.parse(label)
        object.__setattr__(self, "tenor", label)
        if not (self.value == self.value and abs(self.value) != float("inf")):
            raise InputError(f"non-finite quote value for {self.key}")
        if self.profile not in PROFILES:
            raise InputError(f"unknown convention profile {self.profile!r}")

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.instrument_class.value, self.index, self.tenor)

    @property
    def conventions(self) -> ConventionProfile:
        return PROFILES[self.profile]

    @property
    def id(self) -> str:
        return f"{self.instrument_class.value}:{self.index}:{self.tenor}"

    @property
    def value_pct(self) -> str:
        return _decimal_to_pct(self.value)

    @property
    def sort_key(self) -> tuple[float, str]:
        return (tenor_days_estimate(self.tenor), self.tenor)


@dataclass(frozen=True)
class MarketSnapshot:
    as_of: Date
    quotes: tuple[Quote, ...] = ()
    fx_spot: Mapping[str, float] = field(default_factory=dict)
    fixings: Mapping[tuple[str, Date], float] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        seen: set[tuple[str, str, str]] = set()
        for q in self.quotes:
            if q.key in seen:
                raise InputError(f"duplicate quote {q.key}")
            seen.add(q.key)
        object.__setattr__(self, "quotes", tuple(self.quotes))
        object.__setattr__(self, "fx_spot", dict(self.fx_spot))
        object.__setattr__(self, "fixings", dict(self.fixings))

    def select(self, instrument_class: InstrumentClass | str, index: str | None = None) -> list[Quote]:
        """Quotes of one class (and optionally index), shortest tenor first."""
        cls = InstrumentClass(instrument_class)
        out = [q for q in self.quotes if q.instrument_class is cls and (index is None or q.index == index)]
        return sorted(out, key=lambda q: q.sort_key)

    def get(self, instrument_class: InstrumentClass | str, index: str, tenor: str) -> Quote:
        key = (InstrumentClass(instrument_class).value, index, tenor.strip().upper())
        for q in self.quotes:
            if q.key == key:
                return q
        raise InputError(f"no quote {key}")

    def has(self, instrument_class: InstrumentClass | str, index: str, tenor: str) -> bool:
        try:
            self.get(instrument_class, index, tenor)
            return True
        except InputError:
            return False

    def with_quotes(self, quotes: Iterable[Quote]) -> "MarketSnapshot":
        return replace(self, quotes=tuple(quotes))

    def scaled(self, instrument_class: InstrumentClass | str, factor: float) -> "MarketSnapshot":
        """Copy with every quote of one class multiplied by ``factor``."""
        cls = InstrumentClass(instrument_class)
        return self.with_quotes(
            replace(q, value=q.value * factor) if q.instrument_class is cls else q for q in self.quotes
        )


def payer_3m_view_bp(q: Quote) -> float:
    """Tenor-swap spread in bp as seen by the payer of the 3m leg."""
    return -q.value * q.conventions.spread_sign * 1e4


# ---------------------------------------------------------------------------
# CSV

_FX_RE = re.compile(r"^fx\s+([A-Z]{6})\s*=\s*(\S+)$")
_FIX_RE = re.compile(r"^fixing\s+(\S+)\s+(\d{4}-\d{2}-\d{2})\s*=\s*(\S+)$")


def parse_snapshot(text: str, source: str = "<string>") -> MarketSnapshot:
    as_of: Date | None = None
    name = ""
    fx: dict[str, float] = {}
    fixings: dict[tuple[str, Date], float] = {}
    quotes: list[Quote] = []
    seen: dict[tuple[str, str, str], int] = {}
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            try:
                if body.startswith("as_of="):
                    as_of = Date.fromisoformat(body.split("=", 1)[1].strip())
                elif body.startswith("name="):
                    name = body.split("=", 1)[1].strip()
                elif (m := _FX_RE.match(body)):
                    fx[m.group(1)] = float(Decimal(m.group(2)))
                elif (m := _FIX_RE.match(body)):
                    fixings[(m.group(1), Date.fromisoformat(m.group(2)))] = _pct_to_decimal(m.group(3))
            except (ValueError, InvalidOperation) as exc:
                raise ParseError(f"bad header line {line!r} ({exc})", lineno) from exc
            continue
        cells = next(csv.reader([line]))
        if not header_seen:
            if tuple(c.strip() for c in cells) != HEADER:
                raise ParseError(f"expected header {','.join(HEADER)}", lineno)
            header_seen = True
            continue
        if len(cells) != len(HEADER):
            raise ParseError(f"expected {len(HEADER)} fields, got {len(cells)}", lineno)
        cls, index, tenor, value, profile = (c.strip() for c in cells)
        try:
            q = Quote(InstrumentClass(cls.upper()), index, tenor, _pct_to_decimal(value), profile)
        except (ValueError, InvalidOperation, InputError) as exc:
            raise ParseError(str(exc) or f"malformed row {line!r}", lineno) from exc
        if q.key in seen:
            raise ParseError(f"duplicate quote {q.key} (first on line {seen[q.key]})", lineno)
        seen[q.key] = lineno
        quotes.append(q)
    if as_of is None:
        raise ParseError(f"{source}: missing '# as_of=' header")
    return MarketSnapshot(as_of, tuple(quotes), fx, fixings, name)


def load_snapshot(path: str | Path) -> MarketSnapshot:
    path = Path(path)
    if not path.exists():
        raise InputError(f"snapshot file not found: {path}")
    if path.suffix.lower() == ".json":
        return snapshot_from_json(path.read_text())
    snap = parse_snapshot(path.read_text(), str(path))
    return snap if snap.name else replace(snap, name=path.stem)


def format_snapshot(s: MarketSnapshot) -> str:
    out = io.StringIO()
    if s.name:
        out.write(f"# name={s.name}\n")
    out.write(f"# as_of={s.as_of.isoformat()}\n")
    for pair, v in sorted(s.fx_spot.items()):
        out.write(f"# fx {pair}={v!r}\n")
    for (idx, d), v in sorted(s.fixings.items()):
        out.write(f"# fixing {idx} {d.isoformat()}={_decimal_to_pct(v)}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(HEADER)
    for q in s.quotes:
        w.writerow([q.instrument_class.value, q.index, q.tenor, q.value_pct, q.profile])
    return out.getvalue()


def write_snapshot(s: MarketSnapshot, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(snapshot_to_json(s))
    else:
        path.write_text(format_snapshot(s))


def snapshot_to_json(s: MarketSnapshot) -> str:
    doc = {
        "name": s.name,
        "as_of": s.as_of.isoformat(),
        "fx": {k: v for k, v in sorted(s.fx_spot.items())},
        "fixings": [
            {"index": i, "date": d.isoformat(), "value_pct": _decimal_to_pct(v)}
            for (i, d), v in sorted(s.fixings.items())
        ],
        "quotes": [
            {"class": q.instrument_class.value, "index": q.index, "tenor": q.tenor,
             "value_pct": q.value_pct, "profile": q.profile}
            for q in s.quotes
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def snapshot_from_json(text: str) -> MarketSnapshot:
    try:
        doc = json.loads(text)
        quotes = []
        seen = set()
        for n, row in enumerate(doc.get("quotes", []), start=1):
            q = Quote(InstrumentClass(row["class"]), row["index"], row["tenor"],
                      _pct_to_decimal(str(row["value_pct"])), row["profile"])
            if q.key in seen:
                raise ParseError(f"duplicate quote {q.key}", n)
            seen.add(q.key)
            quotes.append(q)
        fixings = {
            (f["index"], Date.fromisoformat(f["date"])): _pct_to_decimal(str(f["value_pct"]))
            for f in doc.get("fixings", [])
        }
        return MarketSnapshot(Date.fromisoformat(doc["as_of"]), tuple(quotes),
                              {k: float(v) for k, v in doc.get("fx", {}).items()}, fixings,
                              doc.get("name", ""))
    except ParseError:
        raise
    except (KeyError, ValueError, TypeError, InvalidOperation) as exc:
        raise ParseError(f"bad JSON snapshot: {exc}") from exc


# ---------------------------------------------------------------------------
# Fixtures

FIXTURE_NAMES = (
    "usd_ois",
    "usd_ois_quoted",
    "usd_libor3m",
    "usd_libor1m_ts",
    "mxn_tiie_xcs",
    "mxn_xcs_stress_base",
    "sd_ois_reference",
    "sd_tiie_reference",
    "eur_usd_coll_curve",
)


def fixture_dir() -> Path:
    root = os.environ.get("MULTICURVE_DATA_DIR")
    if root and (Path(root) / "fixtures").is_dir():
        return Path(root) / "fixtures"
    return DATA_DIR / "fixtures"


def _fixture_path(name: str, suffix: str = ".csv") -> Path:
    p = fixture_dir() / f"{name}{suffix}"
    if not p.exists():
        p = DATA_DIR / "fixtures" / f"{name}{suffix}"
    return p


def builtin_fixture(name: str):
    """Bundled snapshot by name; ``eur_usd_coll_curve`` returns a Curve."""
    if name not in FIXTURE_NAMES:
        raise InputError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}")
    if name == "eur_usd_coll_curve":
        from .curves import read_curve_csv

        return read_curve_csv(_fixture_path(name))
    return load_snapshot(_fixture_path(name))


@dataclass(frozen=True)
class ReferencePoint:
    tenor: str
    date: Date
    discount_factor: float
    zero_rate: float


def reference_table(name: str) -> list[ReferencePoint]:
    """Published discount factors and zero rates that ship beside a fixture."""
    p = _fixture_path(f"{name}_targets")
    if not p.exists():
        raise InputError(f"no reference table for {name!r}")
    with open(p, newline="") as fh:
        return [
            ReferencePoint(r["tenor"], Date.fromisoformat(r["date"]), float(r["discount_factor"]),
                           _pct_to_decimal(r["zero_rate_pct"]))
            for r in csv.DictReader(fh)
        ]
