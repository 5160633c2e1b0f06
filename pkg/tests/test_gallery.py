import math

import pytest

from rdlaplace import gallery
from rdlaplace.errors import SpecError
from rdlaplace.problem import validate


@pytest.mark.parametrize("pid", sorted(gallery.REGISTRY))
def test_every_problem_validates(pid):
    prob = gallery.get(pid)
    assert prob.id == pid
    assert validate(prob.spec).ok


def test_unknown_problem():
    with pytest.raises(SpecError):
        gallery.get("nope")


def test_triangle_references(triangle):
    r = triangle.refs
    assert r["Ux_l1"](1.0) == pytest.approx(
        -0.5 * (-math.exp(-20) + 2 * math.exp(-10) - 1) / (math.exp(-20) + 1), rel=1e-15)
    assert r["ux_l1"](1e-4) == pytest.approx(r["ux_l1_limit"], abs=1e-15)
    assert r["series"](5.0, 0.0, K=2000) == pytest.approx(2.5, abs=1e-3)


def test_luikov_time_domain_reference():
    prob = gallery.luikov_semi_infinite()
    u = prob.refs["u"]
    assert u(0.0, 0.5) == pytest.approx(2.0)
    assert u(50.0, 0.5) == pytest.approx(1.0 + 0.5)


def test_non_default_triangle_has_no_closed_forms():
    assert gallery.triangle_problem(u0=3.0).refs == {}
