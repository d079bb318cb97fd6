import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from multicurve.errors import BracketingError, ConvergenceError, InputError
from multicurve.numerics import (
    InterpMethod,
    evaluate_spline,
    expand_bracket,
    find_root,
    fit_natural_cubic,
    interpolate,
    interpolation_matrix,
    spline_second_derivative,
)


@st.composite
def knot_sets(draw, min_size=2, max_size=25):
    n = draw(st.integers(min_size, max_size))
    gaps = draw(st.lists(st.floats(0.01, 5.0), min_size=n, max_size=n))
    xs = np.cumsum(gaps)
    ys = np.array(draw(st.lists(st.floats(-0.05, 0.2), min_size=n, max_size=n)))
    return xs, ys


def test_three_point_bump():
    # (0,0) (1,1) (2,0): the middle equation reads 4c = -6
    sp = fit_natural_cubic([(0, 0), (1, 1), (2, 0)])
    assert sp.c[1] == pytest.approx(-1.5, abs=1e-15)
    assert spline_second_derivative(sp, 1.0) == pytest.approx(-3.0, abs=1e-14)
    assert evaluate_spline(sp, 0.5) == pytest.approx(0.6875, abs=1e-15)


def test_flat_extrapolation():
    sp = fit_natural_cubic([(1, 0.01), (2, 0.03), (4, 0.02)])
    assert evaluate_spline(sp, 0.0) == 0.01
    assert evaluate_spline(sp, 99.0) == 0.02


def test_bad_knots():
    with pytest.raises(InputError):
        fit_natural_cubic([(0, 1), (0, 2)])
    with pytest.raises(InputError):
        fit_natural_cubic([(0, 1, 2)])
    with pytest.raises(InputError):
        InterpMethod.parse("akima")
    assert InterpMethod.parse("log-linear") is InterpMethod.LINEAR_ON_LOG_DF


@given(knot_sets())
def test_spline_passes_through_knots(k):
    xs, ys = k
    sp = fit_natural_cubic((xs, ys))
    assert np.allclose(evaluate_spline(sp, xs), ys, atol=1e-12)


@given(knot_sets(min_size=3))
def test_spline_is_c2(k):
    xs, ys = k
    sp = fit_natural_cubic((xs, ys))
    h = np.diff(xs)
    left_d1 = sp.b + 2 * sp.c[:-1] * h + 3 * sp.d * h**2
    left_d2 = 2 * sp.c[:-1] + 6 * sp.d * h
    scale = 1.0 + np.max(np.abs(sp.c))
    assert np.allclose(left_d1[:-1], sp.b[1:], atol=1e-9 * scale)
    assert np.allclose(left_d2, 2 * sp.c[1:], atol=1e-9 * scale)


@settings(max_examples=60)
@given(knot_sets(), st.sampled_from(list(InterpMethod)))
def test_weight_matrix_reproduces_interpolate(k, method):
    xs, ys = k
    q = np.linspace(xs[0] - 1.0, xs[-1] + 1.0, 41)
    W = interpolation_matrix(method, xs, q)
    assert np.allclose(W @ ys, interpolate(method, (xs, ys), q), atol=1e-12)


@given(knot_sets(min_size=2, max_size=10), st.floats(-0.1, 0.1), st.floats(-0.05, 0.05))
def test_linear_data_is_reproduced(k, a, b):
    xs, _ = k
    ys = a + b * xs
    q = np.linspace(xs[0], xs[-1], 17)
    for method in (InterpMethod.LINEAR_ON_YIELD, InterpMethod.NATURAL_CUBIC_ON_YIELD):
        assert np.allclose(interpolate(method, (xs, ys), q), a + b * q, atol=1e-12)


@given(knot_sets(min_size=2, max_size=10))
def test_log_df_linear_between_knots(k):
    xs, ys = k
    assume(xs[0] > 0)
    q = np.linspace(xs[0], xs[-1], 23)
    got = interpolate("LINEAR_ON_LOG_DF", (xs, ys), q)
    # x R(x) is linear in x between knots
    assert np.allclose(q * got, np.interp(q, xs, xs * ys), atol=1e-12)


def test_root_finding():
    r = find_root(lambda x: x * x - 2.0, 0.0, 2.0, tol=1e-14)
    assert abs(r - math.sqrt(2)) < 1e-13
    with pytest.raises(BracketingError):
        find_root(lambda x: x * x + 1.0, -1.0, 1.0)
    with pytest.raises(ConvergenceError) as info:
        find_root(lambda x: x - 0.3, 0.0, 1.0, tol=1e-15, max_iter=5)
    assert info.value.best is not None

    lo, hi = expand_bracket(lambda x: x - 3.7, 0.0, 1e-3)
    assert lo < 3.7 < hi
    with pytest.raises(BracketingError):
        expand_bracket(lambda x: 1.0 + x * x, 0.0, 1e-3, max_expand=5)
