"""How much do cross-currency basis spreads drive the collateral gap?

Every cnXCS spread in the stress base is multiplied by r, the MXN curves are
recalibrated, and the par-rate gap between uncollateralised and
USD-collateralised TIIE swaps is printed per tenor. Wider basis means a
larger gap; at r near zero the two discount curves nearly coincide.
"""

from multicurve.market_data import builtin_fixture
from multicurve.mxn_multicurve import run_pipeline, xcs_stress

FACTORS = [0.1, 0.5, 0.7, 1.0, 1.5, 2.0]
TENORS = ["364D", "1820D", "3640D", "5460D", "7280D", "10920D"]

usd = run_pipeline(with_eur=False).usd_ctx
grid = xcs_stress(builtin_fixture("mxn_xcs_stress_base"), FACTORS, usd, tenors=TENORS, workers=3)

print("gap no-collateral minus USD collateral, bp")
print("r     " + "".join(f"{t:>9s}" for t in TENORS))
for r in FACTORS:
    print(f"{r:<5g} " + "".join(f"{grid.value(r, t):9.2f}" for t in TENORS))
