import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdlaplace import gallery
from rdlaplace.errors import SpecError
from rdlaplace.fields import SolutionField
from rdlaplace.functions import SourceFunction, SpaceFunction, TimeFunction
from rdlaplace.oracles import compare_fields, fd_solve, series_solution, series_solve
from rdlaplace.problem import BoundaryCondition, ProblemSpec


def test_triangle_coefficients_match_closed_form(triangle):
    ser = series_solution(triangle.spec, 20)
    xs = np.linspace(0, 10, 11)
    for t in (0.01, 0.5):
        np.testing.assert_allclose(ser.u(xs, t), triangle.refs["series"](xs, t), atol=1e-12)
    # even sine modes vanish for the symmetric profile, so K counts odd modes
    assert ser.K == 20 and ser.modes[-1] == 39


def test_eigenfunction_is_a_single_mode():
    prob = gallery.eigenfunction_problem(a=0.7, b=0.4, length=2.0)
    ser = series_solution(prob.spec, 1)
    assert ser.modes.tolist() == [1.0]
    for t in (0.0, 0.3):
        assert ser.u(0.7, t) == pytest.approx(prob.refs["u"](0.7, t), rel=1e-12)
        assert ser.ux(0.7, t) == pytest.approx(prob.refs["ux"](0.7, t), rel=1e-12)


def test_series_at_time_zero_recovers_phi(triangle):
    ser = series_solution(triangle.spec, 2000)
    xs = np.array([1.0, 3.0, 6.5])
    np.testing.assert_allclose(ser.u(xs, 0.0), triangle.spec.phi(xs), atol=1e-3)
    # the truncated sum rounds off the kink: the tail is (20/pi^2) sum_{m>39} 1/m^2 ~ 0.025
    peak = series_solve(triangle.spec, 20, 5.0, 0.0)
    assert 2.47 < peak < 2.5
    assert peak == pytest.approx(float(triangle.refs["series"](5.0, 0.0)), rel=1e-13)


def test_series_rejects_unsupported_specs():
    with pytest.raises(SpecError):
        series_solution(gallery.robin_unit_problem().spec, 5)
    with pytest.raises(SpecError):
        series_solution(gallery.luikov_semi_infinite().spec, 5)
    with pytest.raises(ValueError):
        series_solution(gallery.triangle_problem().spec, 0)


def test_fd_second_order_in_space():
    prob = gallery.eigenfunction_problem()
    errs = []
    for dx in (0.05, 0.025):
        fld = fd_solve(prob.spec, dx, 1e-4, [0.1])
        errs.append(np.max(np.abs(fld.u[0] - prob.refs["u"](fld.x, 0.1))))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_fd_robin_steady_state():
    # linear profile u = 1 + x satisfies u - u_x = 0 at 0 and u + u_x = 3 at 1 with b = 0
    spec = ProblemSpec(1.0, 0.0, 0.0, 1.0, 1.0, SpaceFunction.polynomial([1.0, 1.0]),
                       SourceFunction.zero(),
                       BoundaryCondition.robin(1.0, -1.0),
                       BoundaryCondition.robin(1.0, 1.0, TimeFunction.constant(3.0)))
    fld = fd_solve(spec, 0.05, 1e-3, [0.05, 0.2])
    np.testing.assert_allclose(fld.u, np.broadcast_to(1 + fld.x, fld.u.shape), atol=1e-12)
    np.testing.assert_allclose(fld.ux, 1.0, atol=1e-10)


def test_fd_hits_output_times_and_interpolates(triangle):
    fld = fd_solve(triangle.spec, 0.1, 3e-3, [0.01, 0.02], x_out=[2.5, 5.0])
    assert fld.t.tolist() == [0.01, 0.02]
    assert fld.u.shape == (2, 2)


@given(st.integers(1, 5), st.integers(1, 4))
def test_compare_identical_fields_is_zero(nx, nt):
    u = np.arange(nx * nt, dtype=float).reshape(nt, nx)
    f = SolutionField(np.arange(nx), np.arange(1, nt + 1), u)
    m = compare_fields(f, f)
    assert m["max_abs"] == 0.0 and m["l2"] == 0.0 and m["count"] == nx * nt


def test_compare_region_and_mismatch():
    xs, ts = np.linspace(0, 1, 5), np.array([1.0])
    a = SolutionField(xs, ts, np.zeros((1, 5)))
    b = SolutionField(xs, ts, np.array([[0, 0, 1.0, 0, 0]]))
    assert compare_fields(a, b)["argmax_x"] == 0.5
    assert compare_fields(a, b, region=(0.0, 0.3))["max_abs"] == 0.0
    assert compare_fields(a, b, region=lambda x, t: x > 0.4)["max_abs"] == 1.0
    c = SolutionField(xs[:3], ts, np.zeros((1, 3)))
    with pytest.raises(ValueError):
        compare_fields(a, c)
    assert compare_fields(c, b, interpolate=True)["max_abs"] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        compare_fields(a, SolutionField(xs, [2.0], np.zeros((1, 5))))
