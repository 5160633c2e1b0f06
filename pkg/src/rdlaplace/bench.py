"""Wall-clock comparison of solution pipelines."""

from __future__ import annotations

import statistics
import time
from dataclasses import asdict, dataclass

import numpy as np

from .oracles import fd_solve, series_solution
from .short_time import ShortTimeConfig, ShortTimeSolution

# the timing ratio quoted for the triangle problem; shown for context only
REFERENCE_RATIO = 20.0


@dataclass
class Timing:
    name: str
    median_s: float
    runs: list
    n_points: int


def time_call(name, fn, repeat=5, warmup=1, n_points=1) -> Timing:
    for _ in range(warmup):
        fn()
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return Timing(name, statistics.median(runs), runs, n_points)


def bench_boundary_flux(spec, n_t=1000, dt=1e-2, K=20, repeat=5, warmup=1, end=1) -> dict:
    """Short-time flux vs K-term series derivative at one end over n_t times in (0, dt].

    Each short-time run rebuilds its r(end, .) tables, so setup cost is
    included; the series run likewise recomputes its coefficients.
    """
    ts = np.linspace(dt / n_t, dt, n_t)
    x_end = spec.end_position(end)
    cfg = ShortTimeConfig(dt=dt)

    def short():
        sol = ShortTimeSolution(spec, cfg)
        return [sol.flux(end, t) for t in ts]

    def series():
        ser = series_solution(spec, K)
        return [ser.ux(x_end, t) for t in ts]

    st = time_call("short-time", short, repeat, warmup, n_t)
    se = time_call(f"series:K={K}", series, repeat, warmup, n_t)
    ratio = se.median_s / st.median_s
    return {
        "pipelines": [asdict(st), asdict(se)],
        "ratio_series_over_short_time": ratio,
        "low_confidence": n_t < 10 or repeat < 3,
        "reference_ratio_context": REFERENCE_RATIO,
        "note": "machine dependent; the reference ratio is reported, not asserted",
    }


def bench_fd_scaling(spec, t_end=1e-2, dx=1e-2, steps=(200, 400), repeat=3) -> dict:
    """fd timing at two step counts; the ratio should be close to the step ratio."""
    out = []
    for n in steps:
        tm = time_call(f"fd:steps={n}", lambda n=n: fd_solve(spec, dx, t_end / n, [t_end]),
                       repeat, 1, n)
        out.append(asdict(tm))
    return {"pipelines": out, "time_ratio": out[1]["median_s"] / out[0]["median_s"],
            "step_ratio": steps[1] / steps[0]}
