import numpy as np

from rdlaplace.fields import SolutionField


def test_csv_round_trip(tmp_path):
    f = SolutionField([0.0, 0.5, 1.0], [0.1, 0.2], np.array([[1 / 3, 2.0, 3.0], [4.0, 5.0, np.pi]]),
                      np.ones((2, 3)), "test")
    path = tmp_path / "f.csv"
    text = f.to_csv(path)
    assert text.splitlines()[0] == "x,t,u,ux"
    g = SolutionField.from_csv(path)
    np.testing.assert_array_equal(g.u, f.u)
    np.testing.assert_array_equal(g.ux, f.ux)
    np.testing.assert_array_equal(g.x, f.x)
    np.testing.assert_array_equal(g.t, f.t)
    assert SolutionField.from_csv(text).u.tolist() == f.u.tolist()


def test_failures_default_empty():
    f = SolutionField([0.0], [1.0], [[0.0]])
    assert f.failures == [] and f.ux is None
