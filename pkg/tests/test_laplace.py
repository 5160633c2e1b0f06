import math

import numpy as np
import pytest
from scipy import integrate, optimize

from rdlaplace import gallery
from rdlaplace.errors import SpecError
from rdlaplace.functions import SourceFunction, SpaceFunction, TimeFunction
from rdlaplace.kernels import r_field
from rdlaplace.laplace import (OperationalSolution, R_of, U_of, U_unbounded, Ux_of, chi,
                               cramer_traces, det_S, det_S_limit, ode_residual, solve_traces,
                               system)
from rdlaplace.problem import BoundaryCondition, ProblemSpec


def _robin_spec(a1=1.0, b1=-0.5, a2=2.0, b2=0.7, **kw):
    base = dict(a=0.9, b=0.3, l1=0.0, l2=1.5, T=1.0, phi=SpaceFunction.polynomial([0.3, 1.0, -0.4]),
                f=SourceFunction.constant(0.5))
    base.update(kw)
    return ProblemSpec(bc1=BoundaryCondition.robin(a1, b1, TimeFunction.constant(0.2)),
                       bc2=BoundaryCondition.robin(a2, b2, TimeFunction.polynomial([0.1, 1.0])),
                       **base)


def test_chi_values():
    assert chi(0.0, 1.0, 1.0, 0.0) == 1.0
    assert chi(2.0, 4.0, 1.0, 0.0) == pytest.approx(math.exp(-4.0), rel=1e-15)
    assert chi(1.0, 1.0, 0.5, 3.0) == pytest.approx(math.exp(-4.0), rel=1e-15)
    assert chi(1e4, 1e6, 1.0, 0.0) == 0.0
    z = chi(1.0, 1 + 1j, 1.0, 0.0)
    assert z == pytest.approx(np.exp(-np.sqrt(1 + 1j)), rel=1e-15)


def test_R_matches_triangle_closed_form(triangle):
    for x in (0.0, 2.0, 5.0, 7.5, 10.0):
        for p in (1.0, 10.0):
            assert R_of(triangle.spec, x, p) == pytest.approx(triangle.refs["R"](x, p),
                                                              rel=1e-12, abs=1e-15)


def test_R_is_transform_of_r(triangle):
    spec, p, x = triangle.spec, 2.0, 3.0
    num = integrate.quad(lambda t: math.exp(-p * t) * r_field(spec, x, t), 0, 40,
                         epsrel=1e-10, limit=200, points=[0.5, 5])[0]
    assert num == pytest.approx(R_of(spec, x, p), rel=1e-6)


def test_determinant_special_cases():
    dd = ProblemSpec(1.0, 0.0, 0.0, 1.0, 1.0, bc1=BoundaryCondition.dirichlet(),
                     bc2=BoundaryCondition.dirichlet())
    p = 3.0
    assert det_S(dd, p) == pytest.approx((1 - math.exp(-2 * math.sqrt(p))) / (4 * p), rel=1e-14)
    nn = ProblemSpec(1.0, 0.0, 0.0, 1.0, 1.0, bc1=BoundaryCondition.neumann(),
                     bc2=BoundaryCondition.neumann())
    assert det_S(nn, p) == pytest.approx(-(1 - math.exp(-2 * math.sqrt(p))) / 4, rel=1e-14)


@pytest.mark.parametrize("p", [0.5, 3.0, 40.0, 2 + 3j])
def test_closed_form_determinant_equals_matrix_determinant(p):
    spec = _robin_spec()
    rows, _ = system(spec, p)
    assert np.linalg.det(np.array(rows, dtype=complex)) == pytest.approx(det_S(spec, p), rel=1e-12)


def test_cramer_and_lu_agree():
    spec = _robin_spec()
    for p in (0.7, 5.0, 80.0):
        np.testing.assert_allclose(cramer_traces(spec, p).as_array(),
                                   solve_traces(spec, p).as_array(), rtol=1e-11)


def test_boundary_conditions_hold_in_the_p_domain():
    spec = _robin_spec()
    p = 2.5
    tr = solve_traces(spec, p)
    assert spec.bc1.alpha * tr.u_l1 + spec.bc1.beta * tr.ux_l1 == pytest.approx(0.2 / p, rel=1e-12)
    assert spec.bc2.alpha * tr.u_l2 + spec.bc2.beta * tr.ux_l2 == pytest.approx(
        0.1 / p + 1 / p ** 2, rel=1e-12)
    assert U_of(spec, spec.l1, p, tr) == pytest.approx(tr.u_l1, rel=1e-12)
    assert Ux_of(spec, spec.l2, p, tr) == pytest.approx(tr.ux_l2, rel=1e-10)
    assert tr.residual < 1e-14


def test_U_matches_triangle_closed_form(triangle):
    for x in (1.0, 5.0, 8.0):
        for p in (1.0, 10.0, 100.0):
            assert U_of(triangle.spec, x, p) == pytest.approx(triangle.refs["U"](x, p), rel=1e-11)


def test_complex_p_and_conjugate_symmetry():
    spec = _robin_spec()
    p = 1.5 + 2.0j
    u, uc = U_of(spec, 0.6, p), U_of(spec, 0.6, p.conjugate())
    assert u == pytest.approx(uc.conjugate(), rel=1e-12)


def test_ode_residual_is_small_in_double_precision():
    spec = _robin_spec()
    assert ode_residual(spec, 0.7, 3.0, 1e-3) < 1e-6


def test_operational_solution_cache_is_consistent(triangle):
    op = OperationalSolution(triangle.spec)
    assert op.U(3.0, 10.0) == pytest.approx(U_of(triangle.spec, 3.0, 10.0), rel=1e-13)
    assert op.traces(10.0) is op.traces(10.0)


def test_luikov_half_line():
    prob = gallery.luikov_semi_infinite()
    for x in (0.0, 0.5, 2.0):
        for p in (0.5, 4.0):
            assert U_unbounded(prob.spec, x, p) == pytest.approx(prob.refs["U"](x, p), rel=1e-12)
            assert R_of(prob.spec, x, p) == pytest.approx(prob.refs["R"](x, p), rel=1e-12)


def test_bounded_system_rejects_half_line():
    with pytest.raises(SpecError):
        solve_traces(gallery.luikov_semi_infinite().spec, 1.0)


def test_anti_dissipative_signs_can_make_the_system_singular():
    # u - (-u_x) ... alpha1 beta1 > 0 at the left end feeds energy in
    spec = ProblemSpec(1.0, 0.0, 0.0, 1.0, 1.0, bc1=BoundaryCondition.robin(1.0, 1.0),
                       bc2=BoundaryCondition.neumann())
    root = optimize.brentq(lambda p: det_S(spec, p), 0.1, 10.0)
    assert abs(det_S(spec, root)) < 1e-14
    assert det_S_limit(spec, 1e8) != 0
