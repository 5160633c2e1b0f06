"""Laplace-domain solution: the boundary system and U(x, p).

With s = sqrt(b + p) (principal branch) and chi(x, p) = exp(-x s / a), the
transformed solution on [l1, l2] is

    U(x, p) = a/(2s) [Ux(l2) chi(l2 - x) - Ux(l1) chi(x - l1)]
              + 1/2 [U(l2) chi(l2 - x) + U(l1) chi(x - l1)] + R(x, p)

where R is the transform of the free field r and the four traces solve a
4x4 linear system (two boundary conditions, two self-consistency rows).

Most functions accept real or complex ``p``. Passing ``precision=<digits>``
switches to mpmath arithmetic, which the finite-difference residual check
needs once the truncation error drops below double round-off.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import ConditioningError, SpecError
from .problem import ProblemSpec, _end_index
from .quadrature import quad

# exp(-80) ~ 1.8e-35; the chi-weighted integrals are truncated there
CUTOFF = 80.0
UNDERFLOW = -745.0
R_TOL = 1e-13


def _sqrt(z):
    if isinstance(z, (mpmath.mpf, mpmath.mpc)):
        return mpmath.sqrt(z)
    if isinstance(z, complex) or np.iscomplexobj(z):
        return cmath.sqrt(z)
    return math.sqrt(z)


def _exp(z):
    if isinstance(z, (mpmath.mpf, mpmath.mpc)):
        return mpmath.exp(z)
    if isinstance(z, complex):
        return cmath.exp(z)
    return math.exp(z)


def _real(z):
    return z.real if isinstance(z, (complex, mpmath.mpc)) else z


def chi(x, p, a, b):
    """exp(-x sqrt(b + p)/a); exactly 0 once the real exponent is below -745."""
    if x < 0:
        raise ValueError("chi needs x >= 0")
    e = -x * _sqrt(b + p) / a
    if not isinstance(e, (mpmath.mpf, mpmath.mpc)) and _real(e) < UNDERFLOW:
        return 0.0 * e
    return _exp(e)


def _chi_s(x, s, a):
    e = -x * s / a
    if not isinstance(e, (mpmath.mpf, mpmath.mpc)) and _real(e) < UNDERFLOW:
        return 0.0 * e
    return _exp(e)


# ------------------------------------------------------------------- R(x, p)

def _side_integral(g, x, reach, s, a, direction, breaks, rtol, mp):
    """int_0^reach g(x + direction*u) exp(-u s/a) du, truncated where chi is negligible.

    Uses v = u Re(s)/a so the decay rate is 1 in v.
    """
    rs = _real(s)
    vmax = CUTOFF if mp is None else mpmath.mpf(CUTOFF) * mp / 16
    vmax = min(vmax, reach * rs / a) if math.isfinite(reach) else vmax
    if vmax <= 0:
        return 0.0
    k = s / rs
    scale = a / rs
    cuts = sorted(v for v in ((bp - x) * direction / scale for bp in breaks) if 0 < v < vmax)

    if mp is not None:
        def fn(v):
            return g(x + direction * scale * v) * mpmath.exp(-k * v)
        return scale * mpmath.quad(fn, [0, *cuts, vmax])

    complex_func = isinstance(k, complex)
    if complex_func:
        def fn(v):
            return g(x + direction * scale * v) * cmath.exp(-k * v)
    else:
        def fn(v):
            return g(x + direction * scale * v) * math.exp(-k * v)
    mag = max(abs(fn(v)) for v in np.linspace(0.0, float(vmax), 9))
    return scale * quad(fn, 0.0, float(vmax), rtol=rtol, atol=max(1e-3 * rtol * mag, 1e-300),
                        points=cuts, complex_func=complex_func)


def _r_transform(phi, F, x, lo, hi, p, a, b, rtol, mp, breaks, density=None):
    s = _sqrt(b + p)
    if density is None:
        if F is None:
            density = phi
        else:
            def density(xi):
                return phi(xi) + F(xi, p)
    left = _side_integral(density, x, x - lo, s, a, -1, breaks, rtol, mp)
    right = _side_integral(density, x, hi - x, s, a, 1, breaks, rtol, mp)
    return (left + right) / (2 * a * s), (left, right, s)


def _data(spec, end=None):
    """(phi, F, lo, hi, x0) either in the original frame or from an end."""
    if end is None:
        return spec.phi, spec.f, spec.l1, spec.l2
    origin, direction = spec.end_frame(end)
    other = spec.l2 if _end_index(end) == 1 else spec.l1
    hi = abs(other - origin) if math.isfinite(other) else math.inf
    return spec.phi.reframe(origin, direction), spec.f.reframe(origin, direction), 0.0, hi


def _frame_for(spec, x):
    if x == spec.l1 and math.isfinite(spec.l1):
        return 1
    if x == spec.l2 and math.isfinite(spec.l2):
        return 2
    return None


def R_of(spec: ProblemSpec, x, p, rtol: float = R_TOL, precision: int | None = None,
         _frames=None):
    """Transform of r(x, t): chi-weighted integral of phi + F over the interval."""
    if not spec.l1 <= x <= spec.l2:
        raise ValueError(f"x={x} outside [{spec.l1}, {spec.l2}]")
    if spec.phi.is_zero and spec.f.is_zero:
        return 0.0 * p
    with _maybe_mp(precision):
        end = _frame_for(spec, x)
        if _frames is not None and end is not None:
            phi, f, lo, hi = _frames[end]
        else:
            phi, f, lo, hi = _data(spec, end)
        x0 = 0.0 if end is not None else x
        if precision is not None:
            x0, p = mpmath.mpf(x0), mpmath.mpmathify(p)
        F = None if f.is_zero else f.transform
        val, _ = _r_transform(phi, F, x0, lo, hi, p, spec.a, spec.b, rtol, precision,
                              phi.breakpoints)
        return val


def R_x_of(spec: ProblemSpec, x, p, rtol: float = R_TOL):
    """d R / d x = (1/(2 a^2)) int (phi + F) sign(xi - x) chi(|xi - x|) dxi."""
    if spec.phi.is_zero and spec.f.is_zero:
        return 0.0 * p
    end = _frame_for(spec, x)
    phi, f, lo, hi = _data(spec, end)
    x0 = 0.0 if end is not None else x
    sign = 1 if end in (None, 1) else -1
    F = None if f.is_zero else f.transform
    _, (left, right, s) = _r_transform(phi, F, x0, lo, hi, p, spec.a, spec.b, rtol, None,
                                       phi.breakpoints)
    return sign * (right - left) / (2 * spec.a * spec.a)


class _maybe_mp:
    def __init__(self, precision):
        self.ctx = mpmath.workdps(precision) if precision else None

    def __enter__(self):
        if self.ctx:
            self.ctx.__enter__()

    def __exit__(self, *exc):
        if self.ctx:
            return self.ctx.__exit__(*exc)
        return False


# ------------------------------------------------------------ boundary system

def det_S(spec: ProblemSpec, p):
    """Closed-form determinant of the 4x4 boundary system.

    The cross terms a (alpha1 beta2 - alpha2 beta1) carry 1/sqrt(b + p);
    the squared terms carry 1/(b + p).
    """
    a, b = spec.a, spec.b
    a1, b1 = spec.bc1.alpha, spec.bc1.beta
    a2, b2 = spec.bc2.alpha, spec.bc2.beta
    c2 = chi(2 * spec.length, p, a, b)
    q = b + p
    s = _sqrt(q)
    cross = a * (a1 * b2 - a2 * b1) / s
    return (-(a * a * a1 * a2 / q - cross) * c2 / 4
            + b1 * b2 * c2 / 4
            + (a * a * a1 * a2 / q + cross) / 4
            - b1 * b2 / 4)


def det_S_limit(spec: ProblemSpec, p):
    """The chi-free part of det_S, which it approaches once chi(2L, p) -> 0."""
    a, q = spec.a, spec.b + p
    a1, b1 = spec.bc1.alpha, spec.bc1.beta
    a2, b2 = spec.bc2.alpha, spec.bc2.beta
    return (a * a * a1 * a2 / q + a * (a1 * b2 - a2 * b1) / _sqrt(q)) / 4 - b1 * b2 / 4


def _require_bounded(spec):
    if not spec.bounded:
        raise SpecError("the 4x4 boundary system needs a finite interval; use U_unbounded")
    if spec.bc1 is None or spec.bc2 is None:
        raise SpecError("both boundary conditions are required on a finite interval")


def system(spec: ProblemSpec, p, precision=None, R_ends=None):
    """Matrix and right-hand side for [U(l1), Ux(l1), U(l2), Ux(l2)]."""
    _require_bounded(spec)
    a = spec.a
    s = _sqrt(spec.b + p)
    cL = _chi_s(spec.length, s, a)
    h = a / (2 * s)
    if R_ends is None:
        R_ends = (R_of(spec, spec.l1, p, precision=precision),
                  R_of(spec, spec.l2, p, precision=precision))
    rhs = [spec.bc1.g.transform(p), spec.bc2.g.transform(p), R_ends[0], R_ends[1]]
    rows = [
        [spec.bc1.alpha, spec.bc1.beta, 0, 0],
        [0, 0, spec.bc2.alpha, spec.bc2.beta],
        [0.5, h, -cL / 2, -h * cL],
        [-cL / 2, h * cL, 0.5, -h],
    ]
    return rows, rhs


@dataclass(frozen=True)
class BoundaryTraces:
    """U and Ux at both ends for one value of p."""

    p: complex | float
    u_l1: complex | float
    ux_l1: complex | float
    u_l2: complex | float
    ux_l2: complex | float
    residual: float = 0.0
    rhs: tuple = field(default=(), compare=False)

    def as_array(self):
        return np.array([self.u_l1, self.ux_l1, self.u_l2, self.ux_l2])


def solve_traces(spec: ProblemSpec, p, precision=None, R_ends=None) -> BoundaryTraces:
    """Pivoted LU solve of the boundary system.

    ``residual`` is max_i |S x - rhs|_i / (|S_i| |x| + |rhs_i|), a scaled
    backward error.
    """
    rows, rhs = system(spec, p, precision, R_ends)
    if precision is not None:
        with mpmath.workdps(precision):
            A = mpmath.matrix(rows)
            x = mpmath.lu_solve(A, mpmath.matrix(rhs))
            sol = [x[i] for i in range(4)]
        return BoundaryTraces(p, *sol, residual=0.0, rhs=tuple(rhs))
    dtype = complex if any(isinstance(v, complex) for r in rows for v in r) or \
        any(isinstance(v, complex) for v in rhs) else float
    A = np.array(rows, dtype=dtype)
    y = np.array(rhs, dtype=dtype)
    d = det_S(spec, p)
    if abs(d) < 1e-300:
        raise ConditioningError(f"boundary system singular at p={p} (det={d})", estimate=d)
    try:
        x = np.linalg.solve(A, y)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"boundary system singular at p={p}: {exc}") from None
    scale = np.abs(A) @ np.abs(x) + np.abs(y)
    res = np.abs(A @ x - y)
    resid = float(np.max(np.where(scale > 0, res / np.where(scale > 0, scale, 1), 0)))
    return BoundaryTraces(p, *x.tolist(), residual=resid, rhs=tuple(rhs))


def cramer_traces(spec: ProblemSpec, p) -> BoundaryTraces:
    """Same traces by Cramer's rule with the closed-form determinant."""
    rows, rhs = system(spec, p)
    A = np.array(rows, dtype=complex if np.iscomplexobj(np.array(rhs)) or isinstance(p, complex)
                 else float)
    d = det_S(spec, p)
    sol = []
    for j in range(4):
        Aj = A.copy()
        Aj[:, j] = rhs
        sol.append(np.linalg.det(Aj) / d)
    return BoundaryTraces(p, *sol)


# ----------------------------------------------------------------- U(x, p)

def _assemble(spec, x, s, tr: BoundaryTraces, R):
    a = spec.a
    c2 = _chi_s(spec.l2 - x, s, a)
    c1 = _chi_s(x - spec.l1, s, a)
    return (a / (2 * s) * (tr.ux_l2 * c2 - tr.ux_l1 * c1)
            + 0.5 * (tr.u_l2 * c2 + tr.u_l1 * c1) + R)


def _assemble_dx(spec, x, s, tr: BoundaryTraces, Rx):
    a = spec.a
    c2 = _chi_s(spec.l2 - x, s, a)
    c1 = _chi_s(x - spec.l1, s, a)
    return (0.5 * (tr.ux_l2 * c2 + tr.ux_l1 * c1)
            + s / (2 * a) * (tr.u_l2 * c2 - tr.u_l1 * c1) + Rx)


def U_of(spec: ProblemSpec, x, p, traces: BoundaryTraces | None = None, precision=None):
    """Operational solution at one (x, p)."""
    if not spec.bounded:
        return U_unbounded(spec, x, p)
    if not spec.l1 <= x <= spec.l2:
        raise ValueError(f"x={x} outside [{spec.l1}, {spec.l2}]")
    with _maybe_mp(precision):
        if precision is not None:
            x, p = mpmath.mpf(x), mpmath.mpmathify(p)
        tr = traces if traces is not None else solve_traces(spec, p, precision)
        s = _sqrt(spec.b + p)
        return _assemble(spec, x, s, tr, R_of(spec, x, p, precision=precision))


def Ux_of(spec: ProblemSpec, x, p, traces: BoundaryTraces | None = None):
    """x-derivative of the operational solution."""
    if not spec.l1 <= x <= spec.l2:
        raise ValueError(f"x={x} outside [{spec.l1}, {spec.l2}]")
    tr = traces if traces is not None else solve_traces(spec, p)
    if x == spec.l1:
        return tr.ux_l1
    if x == spec.l2:
        return tr.ux_l2
    s = _sqrt(spec.b + p)
    return _assemble_dx(spec, x, s, tr, R_x_of(spec, x, p))


def ode_residual(spec: ProblemSpec, x, p, h, precision: int | None = None):
    """|-a^2 D2_h U + (b + p) U - F - phi| with a centred second difference.

    In double precision the result bottoms out near ``1e-13 |U| / h^2``;
    pass ``precision`` (decimal digits) to see the O(h^2) truncation term.
    """
    if not spec.l1 < x - h and x + h < spec.l2:
        raise ValueError("ode_residual needs x - h and x + h inside the interval")
    with _maybe_mp(precision):
        if precision is not None:
            x, h, p = mpmath.mpf(x), mpmath.mpf(h), mpmath.mpmathify(p)
        if spec.bounded:
            tr = solve_traces(spec, p, precision)

            def U(xx):
                return U_of(spec, xx, p, tr, precision)
        else:
            def U(xx):
                return U_unbounded(spec, xx, p, precision)
        um, u0, up = U(x - h), U(x), U(x + h)
        F = 0.0 if spec.f.is_zero else spec.f.transform(x, p)
        res = -spec.a ** 2 * (up - 2 * u0 + um) / (h * h) + (spec.b + p) * u0 - F - spec.phi(x)
        return float(abs(res))


def U_unbounded(spec: ProblemSpec, x, p, precision=None):
    """Operational solution on a half-line or the whole line.

    Solutions are taken bounded at infinity, so only the finite end carries
    traces: U(l1) + (a/s) Ux(l1) = 2 R(l1) closes the system on [l1, inf).
    """
    if spec.bounded:
        raise SpecError("U_unbounded needs an infinite endpoint")
    if not spec.l1 <= x <= spec.l2:
        raise ValueError(f"x={x} outside [{spec.l1}, {spec.l2}]")
    inf1, inf2 = not math.isfinite(spec.l1), not math.isfinite(spec.l2)
    with _maybe_mp(precision):
        R = R_of(spec, x, p, precision=precision)
        if inf1 and inf2:
            if spec.bc1 is not None or spec.bc2 is not None:
                raise SpecError("the whole line takes no boundary condition")
            return R
        a = spec.a
        s = _sqrt(spec.b + p)
        if inf2:
            if spec.bc2 is not None or spec.bc1 is None:
                raise SpecError("[l1, inf) needs exactly one condition, at l1")
            bc, end, dist = spec.bc1, spec.l1, x - spec.l1
            row2 = (0.5, a / (2 * s))
        else:
            if spec.bc1 is not None or spec.bc2 is None:
                raise SpecError("(-inf, l2] needs exactly one condition, at l2")
            bc, end, dist = spec.bc2, spec.l2, spec.l2 - x
            row2 = (0.5, -a / (2 * s))
        Rend = R_of(spec, end, p, precision=precision)
        G = bc.g.transform(p)
        det = bc.alpha * row2[1] - bc.beta * row2[0]
        if det == 0:
            raise ConditioningError(f"half-line boundary system singular at p={p}")
        u0 = (G * row2[1] - bc.beta * Rend) / det
        ux0 = (bc.alpha * Rend - row2[0] * G) / det
        c = _chi_s(dist, s, a)
        if inf2:
            return 0.5 * (u0 - a * ux0 / s) * c + R
        return 0.5 * (u0 + a * ux0 / s) * c + R


# ------------------------------------------------------------ solution object

class OperationalSolution:
    """U(x, p) for one spec, caching traces and end frames across calls."""

    def __init__(self, spec: ProblemSpec, rtol: float = R_TOL):
        self.spec = spec
        self.rtol = rtol
        self._traces: dict = {}
        self._frames = {}
        if spec.bounded:
            self._frames = {1: _data(spec, 1), 2: _data(spec, 2)}

    def R(self, x, p):
        return R_of(self.spec, x, p, self.rtol, _frames=self._frames or None)

    def traces(self, p) -> BoundaryTraces:
        tr = self._traces.get(p)
        if tr is None:
            s = self.spec
            R_ends = (self.R(s.l1, p), self.R(s.l2, p))
            tr = solve_traces(s, p, R_ends=R_ends)
            self._traces[p] = tr
        return tr

    def U(self, x, p):
        if not self.spec.bounded:
            return U_unbounded(self.spec, x, p)
        tr = self.traces(p)
        if x == self.spec.l1:
            return tr.u_l1
        if x == self.spec.l2:
            return tr.u_l2
        return _assemble(self.spec, x, _sqrt(self.spec.b + p), tr, self.R(x, p))

    def Ux(self, x, p):
        return Ux_of(self.spec, x, p, self.traces(p))

    __call__ = U
