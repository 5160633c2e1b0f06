"""Reference solvers: sine series and Crank-Nicolson finite differences."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, sparse
from scipy.sparse.linalg import splu

from .errors import SpecError
from .fields import SolutionField
from .problem import ProblemSpec, beta_is_zero


# ------------------------------------------------------------------- series

@dataclass(frozen=True)
class SeriesSolution:
    """u = sum_n c_n exp(-lambda_n t) sin(n pi (x - l1)/L).

    ``modes`` lists the retained n; K counts modes with a nonzero coefficient,
    so a profile whose even coefficients vanish keeps K odd modes.
    """

    l1: float
    L: float
    modes: np.ndarray
    coefficients: np.ndarray
    rates: np.ndarray

    @property
    def K(self) -> int:
        return len(self.modes)

    def _arg(self, x):
        return np.multiply.outer(np.asarray(x, float) - self.l1, self.modes * math.pi / self.L)

    def u(self, x, t):
        amp = self.coefficients * np.exp(-self.rates * t)
        return np.sin(self._arg(x)) @ amp

    def ux(self, x, t):
        amp = self.coefficients * np.exp(-self.rates * t) * self.modes * math.pi / self.L
        return np.cos(self._arg(x)) @ amp

    def field(self, xs, ts, with_flux=False) -> SolutionField:
        xs, ts = np.atleast_1d(xs), np.atleast_1d(ts)
        u = np.array([self.u(xs, t) for t in ts])
        ux = np.array([self.ux(xs, t) for t in ts]) if with_flux else None
        return SolutionField(xs, ts, u, ux, "series", {"K": self.K})


def _check_series_spec(spec: ProblemSpec):
    if not spec.bounded:
        raise SpecError("series oracle needs a finite interval")
    for bc in (spec.bc1, spec.bc2):
        if bc is None or not beta_is_zero(bc.alpha, bc.beta) or not bc.g.is_zero:
            raise SpecError("series oracle needs homogeneous Dirichlet ends")
    if not spec.f.is_zero:
        raise SpecError("series oracle needs f = 0")


def sine_coefficient(spec: ProblemSpec, n: int) -> float:
    """(2/L) int phi(x) sin(n pi (x - l1)/L) dx, split at the breakpoints of phi."""
    L, l1 = spec.length, spec.l1
    w = n * math.pi / L
    edges = [0.0, *sorted(b - l1 for b in spec.phi.breakpoints if l1 < b < spec.l2), L]
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in zip(edges[:-1], edges[1:]):
            total += integrate.quad(lambda u: spec.phi(l1 + u), lo, hi, weight="sin", wvar=w,
                                    epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    return 2.0 * total / L


def series_solution(spec: ProblemSpec, K: int) -> SeriesSolution:
    """First K modes with nonzero coefficient."""
    _check_series_spec(spec)
    if K < 1:
        raise ValueError("K must be >= 1")
    modes, coefs = [], []
    scale = 0.0
    n = 0
    # give up scanning once 4K + 8 consecutive modes produced too few nonzero ones
    while len(modes) < K and n < 4 * K + 8 + 4 * len(modes):
        n += 1
        c = sine_coefficient(spec, n)
        scale = max(scale, abs(c))
        if abs(c) > 1e-12 * scale and c != 0.0:
            modes.append(n)
            coefs.append(c)
    modes = np.array(modes, dtype=float)
    rates = spec.a ** 2 * (modes * math.pi / spec.length) ** 2 + spec.b
    return SeriesSolution(spec.l1, spec.length, modes, np.array(coefs), rates)


def series_solve(spec: ProblemSpec, K: int, x, t):
    """K-term partial sum at (x, t)."""
    sol = series_solution(spec, K)
    out = sol.u(x, t)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------- FD

def _operator(spec: ProblemSpec, n: int, dx: float):
    """Tridiagonal A and boundary bookkeeping for du/dt = A u + s(t)."""
    a2 = spec.a ** 2
    main = np.full(n, -2 * a2 / dx ** 2 - spec.b)
    lower = np.full(n - 1, a2 / dx ** 2)
    upper = np.full(n - 1, a2 / dx ** 2)
    ends = {}
    for k, bc in ((1, spec.bc1), (2, spec.bc2)):
        if beta_is_zero(bc.alpha, bc.beta):
            ends[k] = ("dirichlet", bc)
            continue
        # ghost node eliminated with a centred difference of the boundary condition
        c = 2 * dx * bc.alpha / bc.beta
        if k == 1:
            upper[0] = 2 * a2 / dx ** 2
            main[0] += a2 / dx ** 2 * c
        else:
            lower[-1] = 2 * a2 / dx ** 2
            main[-1] -= a2 / dx ** 2 * c
        ends[k] = ("robin", bc)
    A = sparse.diags([lower, main, upper], [-1, 0, 1], format="csr")
    return A, ends


def fd_solve(spec: ProblemSpec, dx: float, dt_fd: float, t_out, x_out=None) -> SolutionField:
    """Crank-Nicolson on a uniform grid, started with two backward-Euler half steps.

    The grid spacing is adjusted to divide the interval exactly; the time step
    is shortened where needed to land on every output time.
    """
    if not spec.bounded:
        raise SpecError("fd_solve needs a finite interval")
    t_out = np.sort(np.atleast_1d(np.asarray(t_out, float)))
    n = int(round(spec.length / dx)) + 1
    xs = np.linspace(spec.l1, spec.l2, n)
    dx = xs[1] - xs[0]
    a2 = spec.a ** 2
    A, ends = _operator(spec, n, dx)
    I = sparse.identity(n, format="csr")

    def source(t):
        s = np.zeros(n) if spec.f.is_zero else np.asarray(spec.f(xs, t), float) * np.ones(n)
        for k, (kind, bc) in ends.items():
            if kind == "robin":
                g = float(bc.g(t))
                s[0 if k == 1 else -1] += (-1 if k == 1 else 1) * 2 * a2 * g / (dx * bc.beta)
        return s

    dirichlet_rows = [0 if k == 1 else n - 1 for k, (kind, _) in ends.items() if kind == "dirichlet"]

    def impose(rhs, t):
        for k, (kind, bc) in ends.items():
            if kind == "dirichlet":
                rhs[0 if k == 1 else -1] = float(bc.g(t)) / bc.alpha
        return rhs

    def factor(h):
        M = (I - 0.5 * h * A).tolil()
        for r in dirichlet_rows:
            M.rows[r], M.data[r] = [r], [1.0]
        return splu(M.tocsc())

    u = np.asarray(spec.phi(xs), float).copy()
    impose(u, 0.0)
    out = []
    t = 0.0
    cache = {}
    first = True
    for target in t_out:
        span = target - t
        steps = max(int(math.ceil(span / dt_fd - 1e-9)), 1 if span > 0 else 0)
        h = span / steps if steps else 0.0
        for _ in range(steps):
            if h not in cache:
                cache[h] = factor(h)
            if first:
                # Rannacher start: two backward-Euler half steps damp the kinks of phi;
                # a half step of length h/2 uses the same matrix I - (h/2) A
                for half in (0.5, 1.0):
                    tn = t + half * h
                    u = cache[h].solve(impose(u + 0.5 * h * source(tn), tn))
                first = False
            else:
                rhs = u + 0.5 * h * (A @ u) + 0.5 * h * (source(t) + source(t + h))
                u = cache[h].solve(impose(rhs, t + h))
            t += h
        t = target
        out.append(u.copy())
    U = np.array(out)
    UX = np.gradient(U, dx, axis=1, edge_order=2)
    if x_out is not None:
        x_out = np.atleast_1d(np.asarray(x_out, float))
        U = np.array([np.interp(x_out, xs, row) for row in U])
        UX = np.array([np.interp(x_out, xs, row) for row in UX])
        xs = x_out
    return SolutionField(xs, t_out, U, UX, "fd", {"dx": dx, "dt_fd": dt_fd})


# ------------------------------------------------------------------ compare

def compare_fields(fa: SolutionField, fb: SolutionField, region=None, interpolate=False,
                   use_flux=False) -> dict:
    """Max-abs, RMS and argmax of fa - fb.

    ``region`` is None, an (xmin, xmax) pair, or a predicate mask(x, t) on
    broadcast grids. With ``interpolate`` fb is linearly interpolated onto
    fa's x grid; the t grids must always match.
    """
    if fa.t.shape != fb.t.shape or not np.allclose(fa.t, fb.t, rtol=0, atol=1e-14):
        raise ValueError("fields have different t grids")
    va = fa.ux if use_flux else fa.u
    vb = fb.ux if use_flux else fb.u
    if va is None or vb is None:
        raise ValueError("flux comparison needs ux on both fields")
    if fa.x.shape != fb.x.shape or not np.array_equal(fa.x, fb.x):
        if not interpolate:
            raise ValueError("fields have different x grids; pass interpolate=True")
        vb = np.array([np.interp(fa.x, fb.x, row) for row in vb])
    X, T = np.meshgrid(fa.x, fa.t)
    if region is None:
        mask = np.ones_like(X, dtype=bool)
    elif callable(region):
        mask = np.asarray(region(X, T), dtype=bool)
    else:
        lo, hi = region
        mask = (X >= lo - 1e-12) & (X <= hi + 1e-12)
    diff = np.abs(va - vb)
    diff = np.where(mask & np.isfinite(diff), diff, -1.0)
    if not np.any(mask):
        raise ValueError("empty comparison region")
    k = np.unravel_index(np.argmax(diff), diff.shape)
    sel = diff[mask]
    return {"max_abs": float(diff[k]), "l2": float(np.sqrt(np.mean(sel[sel >= 0] ** 2))),
            "argmax_x": float(X[k]), "argmax_t": float(T[k]), "count": int(mask.sum())}
