import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdlaplace import gallery
from rdlaplace.errors import DomainError
from rdlaplace.functions import SpaceFunction
from rdlaplace.inversion import FixedTalbot, invert
from rdlaplace.laplace import OperationalSolution
from rdlaplace.problem import BoundaryCondition, ProblemSpec
from rdlaplace.short_time import (ExpansionKernels, KernelTerm, ShortTimeConfig,
                                  ShortTimeSolution, boundary_flux_approx, convolve_singular,
                                  dirichlet_kernel, laplace_consistency_check, robin_kernels)


def test_convolution_of_abel_kernel_with_one():
    k = KernelTerm("abel", 1.0, 0.0, 0.0)
    for t in (1e-4, 1e-2, 1.0):
        assert convolve_singular(k, lambda s: np.ones_like(s), t) == pytest.approx(
            2 * math.sqrt(t / math.pi), rel=1e-13)


@given(st.floats(0, 5), st.floats(1e-4, 1e-1))
def test_convolution_of_dirichlet_kernel(b, t):
    got = convolve_singular(dirichlet_kernel(1.0, b), lambda s: 1.0, t)
    assert got == pytest.approx(2 * math.sqrt(t / math.pi) * (1 + b * t / 3), rel=1e-12)


def test_convolution_handles_two_singular_factors():
    # (pi s)^-1/2 * (pi tau)^-1/2 convolves to 1/pi * B(1/2, 1/2) = 1
    k = KernelTerm("abel", 1.0, 0.0, 0.0)
    got = convolve_singular(k, lambda s: 1 / np.sqrt(math.pi * s), 0.3)
    assert got == pytest.approx(1.0, rel=1e-13)


def test_convolution_tolerance_halving_is_consistent():
    k = KernelTerm("k", 0.7, -0.2, 1.3)
    f = lambda s: np.cos(3 * s) + s
    a = convolve_singular(k, f, 0.05, tol=1e-8)
    b = convolve_singular(k, f, 0.05, tol=5e-9)
    assert abs(a - b) <= 1e-8 * abs(b) * 2


def test_kernel_reaction_only_changes_the_third_coefficient():
    k0, k1 = robin_kernels(1.2, 0.0, 1.0, 0.5), robin_kernels(1.2, 3.0, 1.0, 0.5)
    for name in k0:
        assert (k0[name].A, k0[name].B) == (k1[name].A, k1[name].B)
        assert k0[name].C != k1[name].C
    d0, d1 = dirichlet_kernel(1.0, 0.0), dirichlet_kernel(1.0, 2.0)
    assert (d0.A, d0.B) == (d1.A, d1.B) and d1.C == 1.0


def test_triangle_flux_matches_closed_form(triangle):
    for t in (1e-4, 1e-3, 1e-2):
        assert boundary_flux_approx(triangle.spec, 1, t) == pytest.approx(
            triangle.refs["ux_l1"](t), abs=1e-13)


def test_table_h_is_half_the_sigma_derivative_of_r(triangle):
    sol = ShortTimeSolution(gallery.robin_unit_problem(b=0.5).spec)
    tab = sol.table(1)
    sig = np.linspace(0.01, 0.09, 7)
    np.testing.assert_allclose(tab.h(sig), 0.5 * tab.r.deriv()(sig), rtol=1e-8, atol=1e-12)


def test_robin_end_agrees_with_inversion():
    spec = gallery.robin_unit_problem(alpha=1.0, beta=1.0, b=0.3).spec
    sol = ShortTimeSolution(spec)
    op = OperationalSolution(spec)
    method = FixedTalbot(32)
    for t in (1e-4, 1e-3):
        ref_u = invert(lambda p: op.traces(p).u_l1, t, method)
        ref_ux = invert(lambda p: op.traces(p).ux_l2, t, method)
        assert sol.value(1, t) == pytest.approx(ref_u, abs=1e-6)
        assert sol.flux(2, t) == pytest.approx(ref_ux, abs=1e-5)


def test_neumann_ends_keep_a_uniform_state():
    spec = ProblemSpec(1.0, 0.0, 0.0, 1.0, 1.0, SpaceFunction.constant(1.0),
                       bc1=BoundaryCondition.neumann(), bc2=BoundaryCondition.neumann())
    sol = ShortTimeSolution(spec)
    for t in (1e-4, 1e-2):
        assert sol.flux(1, t) == pytest.approx(0.0, abs=1e-14)
        # the far end enters only through erfc(L / (2 a sqrt(t))), dropped by the expansion
        assert sol.value(2, t) == pytest.approx(1.0 - math.erfc(0.5 / math.sqrt(t)), abs=1e-13)


def test_mixed_case_shares_the_robin_path_bitwise():
    phi = SpaceFunction.polynomial([1.0, 0.5])
    robin = BoundaryCondition.robin(1.0, -0.8)
    rr = ProblemSpec(1.0, 0.2, 0.0, 1.0, 1.0, phi, bc1=robin, bc2=BoundaryCondition.robin(2.0, 1.0))
    rd = ProblemSpec(1.0, 0.2, 0.0, 1.0, 1.0, phi, bc1=robin, bc2=BoundaryCondition.dirichlet())
    a, b = ShortTimeSolution(rr), ShortTimeSolution(rd)
    for t in (1e-4, 5e-3):
        assert a.value(1, t) == b.value(1, t)
        assert a.flux(1, t) == b.flux(1, t)


def test_short_time_window_is_enforced(triangle):
    sol = ShortTimeSolution(triangle.spec, ShortTimeConfig(dt=1e-3))
    with pytest.raises(DomainError):
        sol.flux(1, 2e-3)
    with pytest.raises(DomainError):
        sol.interior(0.0, 1e-4)


def test_consistency_exponents_for_robin_and_dirichlet():
    spec = gallery.robin_unit_problem(b=0.5).spec
    for end in (1, 2):
        rep = laplace_consistency_check(spec, end)
        assert rep.ok(), rep.exponents
    d = ProblemSpec(1.0, 2.0, 0.0, 1.0, 1.0, bc1=BoundaryCondition.dirichlet(),
                    bc2=BoundaryCondition.dirichlet())
    rep = laplace_consistency_check(d, 1)
    assert rep.exponents["ux"] == pytest.approx(2.5, abs=0.3)


def test_flux_kernels_flip_sign_at_the_right_end():
    spec = gallery.robin_unit_problem().spec
    k1 = ExpansionKernels.for_end(spec, 1).terms
    k2 = ExpansionKernels.for_end(spec, 2).terms
    assert k2["ux1"].A == -k1["ux1"].A
    assert k2["u1"].A == k1["u1"].A
