"""Build the bundled USD discount curve under EUR collateral.

No EUR market data ships with the package, so the curve is the USD OIS curve
plus a flat continuously compounded spread y. The single number y is chosen
so that the 30y TIIE IRS collateralized in EUR has a par rate of 6.9975%.
That one level is an input; every other EUR par rate is a model output.
"""

from pathlib import Path

import numpy as np

from multicurve.curves import Curve, write_curve_csv
from multicurve.mxn_multicurve import build_curve_set, par_rates, run_pipeline
from multicurve.numerics import find_root

TARGET_TENOR = "10920D"
TARGET_PAR = 0.069975
OUT = Path(__file__).resolve().parents[1] / "src" / "multicurve" / "data" / "fixtures" / "eur_usd_coll_curve.csv"


def eur_curve(ois: Curve, y: float) -> Curve:
    z = np.asarray(ois.zero_rates) + y
    return Curve(ois.valuation_date, ois.pillar_dates, tuple(z), ois.method, ois.time_dc,
                 "USD discount (EUR collateral)")


def main() -> None:
    res = run_pipeline(with_eur=False)
    cs = res.curve_set

    def gap(y: float) -> float:
        s = build_curve_set(cs.disc_usd_coll, cs.tiie_fwd, abc={"EUR": (eur_curve(res.ois, y), res.ois)},
                            fixings=cs.fixings)
        return par_rates(s, [TARGET_TENOR], ["EUR"])[(TARGET_TENOR, "EUR")] - TARGET_PAR

    y = find_root(gap, -0.02, 0.02, tol=1e-14)
    # the stored curve is rounded to 12 significant digits, so y is too
    y = float(f"{y:.10g}")
    write_curve_csv(eur_curve(res.ois, y), OUT)
    print(f"y = {y * 1e4:.6f} bp, par gap after rounding {gap(y) * 1e4:+.2e} bp")
    print("wrote", OUT)


if __name__ == "__main__":
    main()
