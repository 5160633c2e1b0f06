"""Command-line front end.

Subcommands: solve, compare, invert, residual, bench. Each writes a CSV
(``x,t,u[,ux]``) and/or a JSON summary. Exit status: 0 success, 2 usage or
problem-definition error, 3 finished with per-point numerical failures or
out-of-tolerance entries.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import gallery
from .bench import bench_boundary_flux, bench_fd_scaling
from .errors import SpecError
from .fields import SolutionField
from .inversion import invert, operational_field, parse_method
from .kernels import gamma_inverse_chi
from .laplace import chi, ode_residual
from .oracles import compare_fields, fd_solve, series_solution
from .problem import load_spec, validate
from .short_time import ShortTimeConfig, ShortTimeSolution

EXIT_OK, EXIT_USAGE, EXIT_WARN = 0, 2, 3


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ parsing

def parse_grid(text: str, lo=None, hi=None) -> np.ndarray:
    """'101' (count over [lo, hi]), '1,2,3' (list) or 'a:b:n' (linspace).

    Without an interval a bare number is a single point.
    """
    text = text.strip()
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return np.linspace(float(a), float(b), int(n))
        if "," not in text and text.isdigit() and lo is not None:
            if hi is None or not (math.isfinite(lo) and math.isfinite(hi)):
                raise UsageError("a point count needs a finite interval; give explicit points")
            n = int(text)
            if n < 2:
                raise UsageError("a point count must be >= 2")
            return np.linspace(lo, hi, n)
        vals = np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}: {exc}") from None
    if vals.size == 0:
        raise UsageError("empty grid")
    return vals


def parse_methods(text: str) -> list[tuple[str, dict]]:
    """'short-time,series:K=20,fd:dx=1e-3:dt_fd=1e-5'."""
    out = []
    for item in text.split(","):
        parts = item.strip().split(":")
        kw = {}
        for p in parts[1:]:
            if "=" not in p:
                raise UsageError(f"bad method option {p!r}")
            k, v = p.split("=", 1)
            kw[k] = v
        out.append((parts[0], kw))
    return out


def load_problem(ref: str):
    if ref in gallery.REGISTRY:
        return gallery.get(ref).spec
    if Path(ref).exists():
        return load_spec(ref)
    raise UsageError(f"--problem {ref!r} is neither a gallery id nor a file")


# ---------------------------------------------------------------- pipelines

def run_method(spec, name, kw, xs, ts, args) -> SolutionField:
    flux = getattr(args, "flux", False)
    if name == "short-time":
        cfg = ShortTimeConfig(dt=float(kw.get("dt", args.dt)))
        if max(ts) > cfg.dt * (1 + 1e-12):
            raise UsageError(f"short-time needs t <= dt={cfg.dt}")
        return ShortTimeSolution(spec, cfg).field(xs, ts, with_flux=flux)
    if name == "series":
        return series_solution(spec, int(kw.get("K", 20))).field(xs, ts, with_flux=flux)
    if name == "fd":
        return fd_solve(spec, float(kw.get("dx", 1e-3)), float(kw.get("dt_fd", 1e-5)), ts, xs)
    if name == "operational":
        method = parse_method(kw.get("inversion", args.inversion))
        return operational_field(spec, xs, ts, method, with_flux=flux)
    raise UsageError(f"unknown method {name!r}")


def _outputs(out: str | None, default_stem: str):
    stem = Path(out) if out else Path(default_stem)
    if stem.suffix in (".csv", ".json"):
        stem = stem.with_suffix("")
    stem.parent.mkdir(parents=True, exist_ok=True)
    return stem


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def cmd_solve(args) -> int:
    spec = load_problem(args.problem)
    _require_valid(spec)
    xs = parse_grid(args.x, spec.l1, spec.l2)
    ts = parse_grid(args.t)
    name, kw = parse_methods(args.method)[0]
    t0 = time.perf_counter()
    fld = run_method(spec, name, kw, xs, ts, args)
    elapsed = time.perf_counter() - t0
    stem = _outputs(args.out, f"{spec.name}_{name}")
    fld.to_csv(stem.with_suffix(".csv"))
    summary = {"problem": spec.name, "method": args.method, "seconds": elapsed,
               "points": int(fld.u.size), "failures": fld.meta.get("failures", [])}
    _write_json(stem.with_suffix(".json"), summary)
    print(f"wrote {stem.with_suffix('.csv')} ({fld.u.size} points, {elapsed:.3f} s)")
    return EXIT_WARN if summary["failures"] else EXIT_OK


def cmd_compare(args) -> int:
    spec = load_problem(args.problem)
    _require_valid(spec)
    xs = parse_grid(args.x, spec.l1, spec.l2)
    ts = parse_grid(args.t)
    methods = parse_methods(args.methods)
    if len(methods) < 2:
        raise UsageError("compare needs at least two methods")
    stem = _outputs(args.out, f"{spec.name}_compare")
    fields, timings = {}, {}
    for name, kw in methods:
        label = name + "".join(f":{k}={v}" for k, v in kw.items())
        t0 = time.perf_counter()
        fields[label] = run_method(spec, name, kw, xs, ts, args)
        timings[label] = time.perf_counter() - t0
        fields[label].to_csv(Path(f"{stem}_{name}.csv"))
    labels = list(fields)
    region = None if args.region is None else tuple(float(v) for v in args.region.split(","))
    table = []
    for i, la in enumerate(labels):
        for lb in labels[i + 1:]:
            m = compare_fields(fields[la], fields[lb], region)
            table.append({"a": la, "b": lb, **m})
    failures = {k: f.meta.get("failures", []) for k, f in fields.items()}
    _write_json(stem.with_suffix(".json"), {"problem": spec.name, "t": ts, "metrics": table,
                                            "seconds": timings, "failures": failures})
    print(f"{'a':<28}{'b':<28}{'max_abs':>12}{'l2':>12}{'at x':>8}")
    for row in table:
        print(f"{row['a']:<28}{row['b']:<28}{row['max_abs']:>12.3e}{row['l2']:>12.3e}"
              f"{row['argmax_x']:>8.3g}")
    return EXIT_WARN if any(failures.values()) else EXIT_OK


PAIRS = {
    "one": (lambda p: 1 / p, lambda t: 1.0),
    "ramp": (lambda p: 1 / p ** 2, lambda t: t),
    "exp": (lambda p: 1 / (p + 2.0), lambda t: math.exp(-2.0 * t)),
    "chi": (lambda p: chi(1.0, p, 1.0, 0.0), lambda t: gamma_inverse_chi(1.0, t, 1.0, 0.0)),
}


def cmd_invert(args) -> int:
    method = parse_method(args.inversion)
    ts = parse_grid(args.t)
    stem = _outputs(args.out, f"invert_{args.pair}")
    if args.pair not in PAIRS:
        raise UsageError(f"unknown pair {args.pair!r}; choose from {sorted(PAIRS)}")
    F, f = PAIRS[args.pair]
    rows = []
    for t in ts:
        val = invert(F, t, method)
        ref = f(t)
        rows.append({"t": t, "value": val, "exact": ref,
                     "rel_error": abs(val - ref) / abs(ref) if ref else abs(val)})
    with open(stem.with_suffix(".csv"), "w") as fh:
        fh.write("t,value,exact,rel_error\n")
        for r in rows:
            fh.write(",".join("%.17g" % r[k] for k in ("t", "value", "exact", "rel_error")) + "\n")
    worst = max(r["rel_error"] for r in rows)
    _write_json(stem.with_suffix(".json"), {"pair": args.pair, "method": repr(method),
                                            "max_rel_error": worst, "tol": args.tol})
    print(f"{args.pair}: max relative error {worst:.3e} ({method!r})")
    return EXIT_OK if worst <= args.tol else EXIT_WARN


def cmd_residual(args) -> int:
    spec = load_problem(args.problem)
    _require_valid(spec)
    ps = parse_grid(args.p)
    xs = parse_grid(args.x, spec.l1, spec.l2)
    precision = args.precision or None
    rows = []
    for p in ps:
        for x in xs:
            r = ode_residual(spec, float(x), float(p), args.h, precision)
            rows.append({"p": float(p), "x": float(x), "h": args.h, "residual": r,
                         "ok": r <= args.tol})
    stem = _outputs(args.out, f"{spec.name}_residual")
    with open(stem.with_suffix(".csv"), "w") as fh:
        fh.write("p,x,h,residual\n")
        for r in rows:
            fh.write("%.17g,%.17g,%.17g,%.17g\n" % (r["p"], r["x"], r["h"], r["residual"]))
    _write_json(stem.with_suffix(".json"), {"problem": spec.name, "tol": args.tol, "rows": rows})
    print(f"{'p':>10}{'x':>8}{'residual':>14}")
    for r in rows:
        print(f"{r['p']:>10.4g}{r['x']:>8.4g}{r['residual']:>14.3e}{'' if r['ok'] else '  > tol'}")
    return EXIT_OK if all(r["ok"] for r in rows) else EXIT_WARN


def cmd_bench(args) -> int:
    spec = load_problem(args.problem)
    _require_valid(spec)
    report = {"boundary_flux": bench_boundary_flux(spec, args.n_t, args.dt, args.K, args.repeat)}
    if args.fd:
        report["fd_scaling"] = bench_fd_scaling(spec)
    stem = _outputs(args.out, f"{spec.name}_bench")
    _write_json(stem.with_suffix(".json"), report)
    bf = report["boundary_flux"]
    for p in bf["pipelines"]:
        print(f"{p['name']:<16} median {p['median_s'] * 1e3:10.3f} ms over {p['n_points']} t-points")
    flag = " (low confidence)" if bf["low_confidence"] else ""
    print(f"series / short-time time ratio: {bf['ratio_series_over_short_time']:.3g}{flag}; "
          f"reference figure {bf['reference_ratio_context']:g} (context only)")
    return EXIT_OK


def _require_valid(spec):
    rep = validate(spec)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not rep.ok:
        raise SpecError("; ".join(rep.violations))


# ------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rdlaplace", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, grids=True):
        p.add_argument("--problem", required=True, help="gallery id or JSON file")
        if grids:
            p.add_argument("--x", default="101", help="count, list or a:b:n")
            p.add_argument("--t", default="0.01", help="list or a:b:n")
        p.add_argument("--out", default=None, help="output stem (.csv/.json are appended)")
        p.add_argument("--dt", type=float, default=1e-2, help="short-time window")
        p.add_argument("--inversion", default="talbot", help="stehfest[:N=14] or talbot[:M=24]")
        p.add_argument("--flux", action="store_true", help="also emit ux")

    p = sub.add_parser("solve", help="evaluate one method on a grid")
    common(p)
    p.add_argument("--method", default="short-time",
                   help="short-time | operational | series[:K=20] | fd[:dx=..:dt_fd=..]")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="run several methods and tabulate differences")
    common(p)
    p.add_argument("--methods", default="short-time,series:K=20,fd")
    p.add_argument("--region", default=None, help="xmin,xmax restricting the metrics")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("invert", help="invert a known transform pair")
    p.add_argument("--pair", default="chi", help="one | ramp | exp | chi")
    p.add_argument("--t", default="0.1:3:30")
    p.add_argument("--inversion", default="talbot")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("residual", help="finite-difference check of the transformed ODE")
    p.add_argument("--problem", required=True)
    p.add_argument("--p", default="1,10,100")
    p.add_argument("--x", default="2,3,7")
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--precision", type=int, default=0, help="mpmath digits (0 = double)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("bench", help="time short-time flux against the series")
    p.add_argument("--problem", default="triangle")
    p.add_argument("--n-t", type=int, default=1000)
    p.add_argument("--dt", type=float, default=1e-2)
    p.add_argument("--K", type=int, default=20)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--fd", action="store_true", help="also time fd at two step counts")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SpecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
