import json

import numpy as np
import pytest

from rdlaplace.cli import UsageError, main, parse_grid, parse_methods
from rdlaplace.fields import SolutionField


def test_parse_grid_forms():
    np.testing.assert_array_equal(parse_grid("3", 0.0, 1.0), [0.0, 0.5, 1.0])
    np.testing.assert_array_equal(parse_grid("0.1,0.2"), [0.1, 0.2])
    np.testing.assert_array_equal(parse_grid("0:1:3"), [0.0, 0.5, 1.0])
    with pytest.raises(UsageError):
        parse_grid("abc")
    with pytest.raises(UsageError):
        parse_grid("5", 0.0, float("inf"))


def test_parse_methods():
    assert parse_methods("short-time,series:K=5") == [("short-time", {}), ("series", {"K": "5"})]
    with pytest.raises(UsageError):
        parse_methods("fd:oops")


def test_solve_writes_csv_and_json(tmp_path):
    out = tmp_path / "sub" / "tri"
    code = main(["solve", "--problem", "triangle", "--x", "1,5,9", "--t", "0.005,0.01",
                 "--method", "short-time", "--flux", "--out", str(out)])
    assert code == 0
    fld = SolutionField.from_csv(out.with_suffix(".csv"))
    assert fld.u.shape == (2, 3) and fld.ux is not None
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["failures"] == []


def test_solve_is_deterministic(tmp_path):
    args = ["solve", "--problem", "robin_unit", "--x", "0,0.5,1", "--t", "0.001",
            "--method", "short-time"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_zero_problem_is_all_zero(tmp_path):
    out = tmp_path / "z"
    assert main(["solve", "--problem", "zero", "--x", "5", "--t", "0.1,0.5",
                 "--method", "operational", "--out", str(out)]) == 0
    assert np.all(SolutionField.from_csv(out.with_suffix(".csv")).u == 0.0)


def test_usage_errors_exit_2(tmp_path, capsys):
    assert main(["solve", "--problem", "nope", "--x", "3", "--t", "0.1"]) == 2
    assert main(["solve", "--problem", "triangle", "--x", "3", "--t", "0.5",
                 "--method", "short-time", "--out", str(tmp_path / "x")]) == 2
    assert "error:" in capsys.readouterr().err


def test_invert_exit_codes(tmp_path):
    assert main(["invert", "--pair", "exp", "--t", "0.5,1", "--inversion", "talbot",
                 "--tol", "1e-9", "--out", str(tmp_path / "e")]) == 0
    assert main(["invert", "--pair", "ramp", "--t", "1", "--inversion", "stehfest",
                 "--tol", "1e-12", "--out", str(tmp_path / "r")]) == 3


def test_compare_and_residual(tmp_path, capsys):
    assert main(["compare", "--problem", "triangle", "--x", "1,3,5,7,9", "--t", "0.01",
                 "--methods", "short-time,series:K=20", "--region", "1,9",
                 "--out", str(tmp_path / "c")]) == 0
    rows = json.loads((tmp_path / "c.json").read_text())["metrics"]
    assert rows[0]["max_abs"] < 5e-2
    assert main(["residual", "--problem", "triangle", "--p", "1,10", "--x", "3,7",
                 "--h", "1e-3", "--out", str(tmp_path / "r")]) == 0


def test_bench_reports_ratio(tmp_path, capsys):
    assert main(["bench", "--n-t", "20", "--repeat", "2", "--out", str(tmp_path / "b")]) == 0
    rep = json.loads((tmp_path / "b.json").read_text())["boundary_flux"]
    assert rep["ratio_series_over_short_time"] > 0 and rep["low_confidence"]
    assert "context only" in capsys.readouterr().out
