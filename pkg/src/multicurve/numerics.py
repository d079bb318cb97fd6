"""Interpolation on zero-rate knots and a bisection root finder.

All three interpolation schemes extrapolate the zero rate flat outside the
knot range, and all three are linear in the knot ordinates. The second fact
is what :func:`interpolation_matrix` exploits: a calibration can precompute,
per instrument, the matrix mapping knot zero rates to the zero rates at the
instrument's cash-flow times.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import BracketingError, ConvergenceError, InputError


class InterpMethod(str, Enum):
    LINEAR_ON_YIELD = "LINEAR_ON_YIELD"
    LINEAR_ON_LOG_DF = "LINEAR_ON_LOG_DF"
    NATURAL_CUBIC_ON_YIELD = "NATURAL_CUBIC_ON_YIELD"

    @classmethod
    def parse(cls, text: "str | InterpMethod") -> "InterpMethod":
        if isinstance(text, InterpMethod):
            return text
        key = str(text).strip().upper().replace("-", "_")
        aliases = {"LINEAR": "LINEAR_ON_YIELD", "LOG_LINEAR": "LINEAR_ON_LOG_DF",
                   "CUBIC": "NATURAL_CUBIC_ON_YIELD", "SPLINE": "NATURAL_CUBIC_ON_YIELD"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise InputError(f"unknown interpolation method {text!r}") from None


@dataclass(frozen=True)
class SplineCoefficients:
    """Piecewise cubic ``a + b*(x-x_i) + c*(x-x_i)**2 + d*(x-x_i)**3``.

    ``x`` holds the n+1 knots; ``a`` and ``c`` have n+1 entries (``c`` at
    the last knot is the natural boundary value 0), ``b`` and ``d`` have n.
    Extra trailing dimensions are allowed when several ordinate vectors were
    fitted at once.
    """

    x: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __call__(self, q) -> np.ndarray:
        return evaluate_spline(self, q)


def _as_knots(knots) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(knots, tuple) and len(knots) == 2 and np.ndim(knots[0]) == 1 and np.ndim(knots[1]) >= 1:
        xs, ys = np.asarray(knots[0], float), np.asarray(knots[1], float)
    else:
        arr = np.asarray(knots, float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise InputError("knots must be (x, y) pairs or an (xs, ys) tuple")
        xs, ys = arr[:, 0], arr[:, 1]
    if xs.shape[0] != ys.shape[0]:
        raise InputError("x and y knot arrays differ in length")
    return xs, ys


def _check_abscissae(xs: np.ndarray) -> None:
    if xs.shape[0] < 2:
        raise InputError("at least two knots are required")
    if not np.all(np.diff(xs) > 0):
        raise InputError("knot abscissae must be strictly increasing")


def fit_natural_cubic(knots) -> SplineCoefficients:
    """Natural cubic spline through the knots.

    Forward elimination and back substitution on the tridiagonal system for
    the quadratic coefficients ``c``, then ``b`` and ``d`` from ``c``.
    ``knots`` may be a list of (x, y) pairs or a tuple ``(xs, ys)`` where
    ``ys`` can carry extra columns (one spline per column).
    """
    xs, ys = _as_knots(knots)
    _check_abscissae(xs)
    n = xs.shape[0] - 1
    h = np.diff(xs)
    a = ys
    c = np.zeros_like(a)
    if n >= 2:
        # strict diagonal dominance: 2(h_{i-1}+h_i) > h_{i-1} + h_i
        diag = 2.0 * (h[:-1] + h[1:])
        assert np.all(diag > h[:-1] + h[1:]), "tridiagonal system lost diagonal dominance"
        rhs = 3.0 * ((a[2:] - a[1:-1]).T / h[1:]).T - 3.0 * ((a[1:-1] - a[:-2]).T / h[:-1]).T
        mu = np.zeros(n + 1)
        z = np.zeros_like(a)
        for i in range(1, n):
            l = diag[i - 1] - h[i - 1] * mu[i - 1]
            mu[i] = h[i] / l
            z[i] = (rhs[i - 1] - h[i - 1] * z[i - 1]) / l
        for j in range(n - 1, 0, -1):
            c[j] = z[j] - mu[j] * c[j + 1]
    hb = h.reshape((-1,) + (1,) * (a.ndim - 1))
    b = (a[1:] - a[:-1]) / hb - hb * (c[1:] + 2.0 * c[:-1]) / 3.0
    d = (c[1:] - c[:-1]) / (3.0 * hb)
    return SplineCoefficients(xs, a, b, c, d)


def evaluate_spline(sp: SplineCoefficients, q) -> np.ndarray:
    """Evaluate with flat extrapolation outside the knot range."""
    q = np.asarray(q, float)
    qc = np.clip(q, sp.x[0], sp.x[-1])
    idx = np.clip(np.searchsorted(sp.x, qc, side="right") - 1, 0, len(sp.x) - 2)
    dx = qc - sp.x[idx]
    if sp.a.ndim > 1:
        dx = dx[..., None]
    return sp.a[idx] + dx * (sp.b[idx] + dx * (sp.c[idx] + dx * sp.d[idx]))


def spline_second_derivative(sp: SplineCoefficients, q) -> np.ndarray:
    q = np.asarray(q, float)
    idx = np.clip(np.searchsorted(sp.x, q, side="right") - 1, 0, len(sp.x) - 2)
    dx = q - sp.x[idx]
    return 2.0 * sp.c[idx] + 6.0 * sp.d[idx] * dx


def _linear_weights(xs: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    qc = np.clip(q, xs[0], xs[-1])
    i = np.clip(np.searchsorted(xs, qc, side="right") - 1, 0, len(xs) - 2)
    w = (qc - xs[i]) / (xs[i + 1] - xs[i])
    return i, w, qc


def interpolation_matrix(method: InterpMethod | str, knot_x, query_x) -> np.ndarray:
    """Matrix ``W`` with ``interpolate(method, (knot_x, y), query_x) == W @ y``."""
    method = InterpMethod.parse(method)
    xs = np.asarray(knot_x, float)
    q = np.atleast_1d(np.asarray(query_x, float))
    _check_abscissae(xs)
    n = xs.shape[0]
    if method is InterpMethod.NATURAL_CUBIC_ON_YIELD:
        sp = fit_natural_cubic((xs, np.eye(n)))
        return evaluate_spline(sp, q)
    W = np.zeros((q.shape[0], n))
    i, w, qc = _linear_weights(xs, q)
    rows = np.arange(q.shape[0])
    if method is InterpMethod.LINEAR_ON_YIELD:
        np.add.at(W, (rows, i), 1.0 - w)
        np.add.at(W, (rows, i + 1), w)
        return W
    # log-DF linear: x R(x) is linear between knots
    inside = (q > xs[0]) & (q < xs[-1])
    safe = np.where(qc > 0, qc, 1.0)
    lo = np.where(inside, (1.0 - w) * xs[i] / safe, np.where(q <= xs[0], 1.0, 0.0))
    hi = np.where(inside, w * xs[i + 1] / safe, np.where(q >= xs[-1], 1.0, 0.0))
    # outside the range the boundary knot carries the whole weight
    np.add.at(W, (rows, i), lo)
    np.add.at(W, (rows, i + 1), hi)
    return W


def interpolate(method: InterpMethod | str, knots, x):
    """Interpolated ordinate at ``x`` (scalar or array)."""
    method = InterpMethod.parse(method)
    xs, ys = _as_knots(knots)
    _check_abscissae(xs)
    q = np.asarray(x, float)
    if method is InterpMethod.NATURAL_CUBIC_ON_YIELD:
        out = evaluate_spline(fit_natural_cubic((xs, ys)), q)
    else:
        out = interpolation_matrix(method, xs, q.ravel()) @ ys
        out = out.reshape(q.shape)
    return float(out) if np.ndim(out) == 0 else out


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Bisection. Stops when ``|f(x)| <= tol`` or the bracket is narrower than ``tol``."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise BracketingError(f"no sign change on [{lo}, {hi}]: f={flo:.3e}, {fhi:.3e}")
    best, fbest = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) < abs(fbest):
            best, fbest = mid, fm
        if abs(fm) <= tol or 0.5 * (hi - lo) <= tol:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    raise ConvergenceError(
        f"bisection did not converge in {max_iter} iterations (|f|={abs(fbest):.3e})",
        best=best,
        iterations=max_iter,
    )


def expand_bracket(
    f: Callable[[float], float],
    guess: float,
    step: float,
    grow: float = 4.0,
    max_expand: int = 40,
) -> tuple[float, float]:
    """Grow ``[guess - step, guess + step]`` until ``f`` changes sign."""
    lo, hi = guess - step, guess + step
    flo, fhi = f(lo), f(hi)
    for _ in range(max_expand):
        if np.sign(flo) != np.sign(fhi) or flo == 0.0 or fhi == 0.0:
            return lo, hi
        step *= grow
        if abs(flo) < abs(fhi):
            lo -= step
            flo = f(lo)
        else:
            hi += step
            fhi = f(hi)
    raise BracketingError(f"could not bracket a root around {guess}")

