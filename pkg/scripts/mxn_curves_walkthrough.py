"""Calibrate every curve from the bundled quotes and price MXN swaps under each collateral.

Run with ``python scripts/mxn_curves_walkthrough.py``. The order is the
dependency order: USD OIS discounting, LIBOR 3m and 1m projection, then the
joint MXN discount / TIIE fit against IRS and cross-currency quotes.
"""

import datetime as dt

from multicurve import ForwardCurveView, PricingContext, par_rate, run_pipeline
from multicurve.mxn_multicurve import collateral_comparison_table, tiie_irs

res = run_pipeline()
print(f"pipeline ran in {res.seconds:.2f}s")
for name, rep in res.reports.items():
    print(f"  {name:8s} converged={rep.converged} sweeps={rep.sweeps:3d} worst residual {rep.worst_residual:.1e}")

# Discount factors at five years tell the collateral story at a glance.
cs = res.curve_set
five_y = dt.date(2020, 5, 29)
print("\nMXN discount factor at", five_y)
for regime in cs.regimes:
    print(f"  {regime:5s} {cs.discount(regime).df(five_y):.6f}")

# A 10y TIIE swap priced off the USD-collateral curve reproduces its quote;
# the same trade without a CSA discounts at TIIE itself and its par rate drops.
ctx = PricingContext(
    {("MXN", regime): cs.discount(regime) for regime in cs.regimes},
    {"TIIE28D": cs.tiie_fwd},
    cs.fixings,
)
for regime in ("USD", "NONE"):
    k = par_rate(tiie_irs("3640D", res.ois.valuation_date, regime), ctx)
    print(f"10y par, collateral {regime:4s}: {k * 100:.4f}%")

print("\nfull table (percent, bp gaps to USD collateral):")
tenors = [q.tenor for q in res.snapshots["mxn"].select("IRS", "TIIE28D")]
print(collateral_comparison_table(cs, tenors, res.usd_ctx).to_csv())

# The TIIE projection curve is only ever used for forwards.
f = ForwardCurveView(cs.tiie_fwd.underlying, "28D")
print("first 28d forward from spot:", f.forwards([dt.date(2015, 6, 1)], [dt.date(2015, 6, 29)])[0])
