"""Multi-curve construction for MXN TIIE swaps under different collateral agreements."""

from .bootstrap import (
    BootstrapConfig,
    BootstrapReport,
    bootstrap_collateral_spread,
    bootstrap_libor1m,
    bootstrap_libor3m,
    bootstrap_ois_usd,
    bootstrap_single_curve_tiie,
)
from .calendar_time import CalendarId, DayCount, RollConvention, Schedule, StubPolicy, Tenor, build_schedule
from .curves import CompositeCurve, Curve, ForwardCurveView
from .errors import (
    BracketingError,
    ContextError,
    ConvergenceError,
    DomainError,
    InputError,
    MulticurveError,
    ParseError,
)
from .instruments import LegKind, LegSpec, PricingContext, SwapSpec, par_rate, pv
from .market_data import MarketSnapshot, Quote, load_snapshot
from .mxn_multicurve import (
    MxnCurveSet,
    OvernightProxyConfig,
    collateral_comparison_table,
    derive_abc_collateral_discount,
    derive_mxn_collateral_discount,
    derive_no_collateral_discount,
    dual_bootstrap_mxn,
    run_pipeline,
    xcs_stress,
)
from .numerics import InterpMethod, fit_natural_cubic, interpolate

__all__ = [
    "bootstrap_collateral_spread",
    "bootstrap_libor1m",
    "bootstrap_libor3m",
    "bootstrap_ois_usd",
    "bootstrap_single_curve_tiie",
    "BootstrapConfig",
    "BootstrapReport",
    "BracketingError",
    "build_schedule",
    "CalendarId",
    "collateral_comparison_table",
    "CompositeCurve",
    "ContextError",
    "ConvergenceError",
    "Curve",
    "DayCount",
    "derive_abc_collateral_discount",
    "derive_mxn_collateral_discount",
    "derive_no_collateral_discount",
    "DomainError",
    "dual_bootstrap_mxn",
    "fit_natural_cubic",
    "ForwardCurveView",
    "InputError",
    "InterpMethod",
    "interpolate",
    "LegKind",
    "LegSpec",
    "load_snapshot",
    "MarketSnapshot",
    "MulticurveError",
    "MxnCurveSet",
    "OvernightProxyConfig",
    "par_rate",
    "ParseError",
    "PricingContext",
    "pv",
    "Quote",
    "RollConvention",
    "run_pipeline",
    "Schedule",
    "StubPolicy",
    "SwapSpec",
    "Tenor",
    "xcs_stress",
]
