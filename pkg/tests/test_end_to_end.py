"""All three routes on a problem with a source and time-dependent wall data."""

import numpy as np
import pytest

from rdlaplace import gallery
from rdlaplace.inversion import FixedTalbot, invert, operational_field
from rdlaplace.laplace import OperationalSolution
from rdlaplace.oracles import fd_solve
from rdlaplace.short_time import ShortTimeSolution


@pytest.fixture(scope="module")
def rod():
    spec = gallery.heated_rod_problem().spec
    return spec, ShortTimeSolution(spec), OperationalSolution(spec)


def test_operational_matches_fd(rod):
    spec = rod[0]
    xs, ts = [0.0, 0.5, 1.0, 1.5, 2.0], [0.05, 0.3]
    op = operational_field(spec, xs, ts, FixedTalbot(24), with_flux=True)
    fd = fd_solve(spec, 2e-3, 1e-4, ts, x_out=xs)
    assert np.max(np.abs(op.u - fd.u)) < 1e-6
    assert np.max(np.abs(op.ux - fd.ux)) < 1e-5


def test_short_time_robin_end_converges_like_t_squared(rod):
    spec, sol, op = rod
    method = FixedTalbot(32)
    errs = []
    for t in (1e-4, 1e-3):
        ref = invert(lambda p: op.traces(p).u_l1, t, method)
        errs.append(abs(sol.value(1, t) - ref))
    assert errs[0] < 1e-8
    assert 30 < errs[1] / errs[0] < 300


def test_short_time_dirichlet_end_flux(rod):
    spec, sol, op = rod
    for t in (1e-4, 1e-3):
        ref = invert(lambda p: op.traces(p).ux_l2, t, FixedTalbot(32))
        assert sol.flux(2, t) == pytest.approx(ref, abs=1e-7)
