import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdlaplace.functions import (PiecewisePolynomial, SourceFunction, SpaceFunction,
                                 TimeFunction)

finite = st.floats(-10, 10, allow_nan=False)


def test_piecewise_linear_values_and_limits():
    phi = SpaceFunction.piecewise_linear([(0, 0), (5, 2.5), (10, 0)])
    assert phi(2.0) == 1.0
    assert phi(5.0) == 2.5
    assert phi(-1.0) == 0.0 and phi(11.0) == 0.0
    step = SpaceFunction.piecewise_polynomial([1.0], [(0.0,), (3.0,)])
    assert step.limit(1.0, "left") == 0.0
    assert step.limit(1.0, "right") == 3.0


def test_array_and_mpmath_evaluation_agree():
    phi = SpaceFunction.piecewise_linear([(0, 1), (2, 3), (4, -1)])
    xs = np.linspace(-1, 5, 13)
    np.testing.assert_array_equal(phi(xs), [phi(float(x)) for x in xs])
    with mpmath.workdps(30):
        assert abs(phi(mpmath.mpf(1)) - 2) < mpmath.mpf(10) ** -28


@given(st.lists(finite, min_size=1, max_size=5), finite, finite)
def test_reframe_matches_composition(coeffs, origin, d):
    pp = PiecewisePolynomial([-1.0, 2.0], [tuple(coeffs), (1.0, -2.0), tuple(coeffs[::-1])])
    for direction in (1, -1):
        q = pp.reframe(origin, direction)
        x = origin + direction * d
        # skip points sitting on a break, where the two frames pick opposite sides
        if min(abs(x + 1.0), abs(x - 2.0)) < 1e-9:
            continue
        assert q(d) == pytest.approx(pp(x), rel=1e-9, abs=1e-9 * (1 + abs(pp(x))))


def test_mirror_reframe_is_bitwise_for_symmetric_triangle():
    phi = SpaceFunction.piecewise_linear([(0, 0), (5, 2.5), (10, 0)])
    left, right = phi.reframe(0.0, 1), phi.reframe(10.0, -1)
    assert left.pp.breaks == right.pp.breaks
    assert left.pp.coeffs == right.pp.coeffs
    assert left.pp.origins == right.pp.origins


def test_time_function_transform_and_derivative():
    g = TimeFunction.polynomial([1.0, 2.0, 3.0])
    assert g.value_at_zero == 1.0
    assert g.derivative(2.0) == 2.0 + 6.0 * 2.0
    p = 1.7
    assert g.transform(p) == pytest.approx(1 / p + 2 / p ** 2 + 6 / p ** 3, rel=1e-14)


def test_numeric_transform_fallback():
    g = TimeFunction.from_callable(lambda t: math.exp(-t), lambda t: -math.exp(-t))
    assert g.transform(2.0) == pytest.approx(1 / 3, rel=1e-10)
    assert g.transform(2.0 + 1j) == pytest.approx(1 / (3 + 1j), rel=1e-8)


def test_source_polynomial():
    f = SourceFunction.polynomial([[1.0, 2.0], [0.0, 3.0]])  # 1 + 2t + 3xt
    assert f(2.0, 0.5) == pytest.approx(1 + 1 + 3.0)
    assert f.transform(2.0, 4.0) == pytest.approx(1 / 4 + 2 / 16 + 6 / 16)
    assert f.time_derivative(2.0, 0.5) == pytest.approx(2 + 6)
    g = f.reframe(3.0, -1)
    assert g(1.0, 0.5) == f(2.0, 0.5)


def test_zero_flags():
    assert SpaceFunction.zero().is_zero
    assert SourceFunction.constant(0.0).is_zero
    assert TimeFunction.zero().is_zero
    assert not SpaceFunction.constant(2.0).is_zero


@given(st.floats(-3, 3), st.floats(1e-9, 1e-3))
def test_increment_keeps_relative_accuracy(x, h):
    pp = PiecewisePolynomial([], [(0.2, 0.0, 0.1)])
    exact = 0.1 * h * (2 * x + h)
    inc = pp.increment(x, pp(x))
    assert inc(h) == pytest.approx(exact, rel=1e-12, abs=1e-300)
    assert inc(-h) == pytest.approx(-0.1 * h * (2 * x - h), rel=1e-12, abs=1e-300)


def test_increment_across_a_kink():
    pp = SpaceFunction.piecewise_linear([(0, 0), (5, 2.5), (10, 0)]).pp
    inc = pp.increment(5.0, pp(5.0))
    assert inc(1.0) == -0.5 and inc(-1.0) == -0.5
