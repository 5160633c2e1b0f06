"""Short-time approximations on 0 < t <= dt.

Inside the interval u is approximated by the free field r. At an end the
value and flux come from large-p expansions of the exact traces, which
invert to kernels of the form

    k(t) = A / sqrt(pi t) + B + 2 C sqrt(t / pi)   <->   A p^-1/2 + B p^-1 + C p^-3/2

convolved against the boundary data g and against r(end, .). Truncation
error is O(dt); nothing beyond the sqrt(t) terms is attempted.

Every end is handled in "distance from the end" coordinates d, so the l2
formulas are the l1 formulas with beta -> -beta and a sign flip on fluxes.
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Chebyshev

from .errors import DomainError, NumericError, QuadratureError
from .kernels import RField
from .problem import ProblemSpec, _end_index, beta_is_zero
from .quadrature import gauss_legendre, quad

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class ShortTimeConfig:
    """dt: validity window; conv_tol: relative tolerance of each convolution.

    table_tol is the tail size at which the Chebyshev tables of r(end, .)
    stop growing; table_quad_tol is the quadrature tolerance of their samples.
    """

    dt: float = 1e-2
    conv_tol: float = 1e-12
    table_tol: float = 1e-14
    table_quad_tol: float = 1e-13
    max_degree: int = 256

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")


# ------------------------------------------------------------------ kernels

@dataclass(frozen=True)
class KernelTerm:
    """A p^-1/2 + B p^-1 + C p^-3/2 and its inverse; ``exact`` is the untruncated transform."""

    name: str
    A: float
    B: float
    C: float
    exact: object = field(default=None, compare=False, repr=False)

    def __call__(self, t):
        return self.A / (SQRT_PI * np.sqrt(t)) + self.B + 2 * self.C * np.sqrt(t) / SQRT_PI

    def reg(self, s):
        """sqrt(s) k(s): the smooth part the convolution rule integrates."""
        return self.A / SQRT_PI + self.B * np.sqrt(s) + 2 * self.C * s / SQRT_PI

    def laplace(self, p):
        return self.A * p ** -0.5 + self.B / p + self.C * p ** -1.5


def robin_kernels(a, b, alpha, beta) -> dict[str, KernelTerm]:
    """Kernels of a Robin end written in its distance coordinate.

    ``beta`` is the coefficient of the derivative along the inward distance,
    i.e. beta1 at l1 and -beta2 at l2.
    """
    al, be = alpha, beta

    def den(p):
        return be * math.sqrt(b + p) - a * al

    return {
        "u1": KernelTerm("u1", -a / be, -a * a * al / be ** 2,
                         -(-a * b / 2 + a ** 3 * al ** 2 / be ** 2) / be,
                         lambda p: -a / den(p)),
        "u2": KernelTerm("u2", 2 * a * al / be, 2 * a * a * al ** 2 / be ** 2,
                         2 * (-a * al * b / 2 + a ** 3 * al ** 3 / be ** 2) / be,
                         lambda p: 2 * be * math.sqrt(b + p) / den(p) - 2),
        "ux1": KernelTerm("ux1", a * al / be ** 2, a * a * al ** 2 / be ** 3,
                          a * al * (2 * a * a * al ** 2 - b * be ** 2) / (2 * be ** 4),
                          lambda p: math.sqrt(b + p) / den(p) - 1 / be),
        "ux2": KernelTerm("ux2", -2 * al ** 2 * a / be ** 2, -2 * al ** 3 * a * a / be ** 3,
                          al ** 2 * a * (b * be ** 2 - 2 * a * a * al ** 2) / be ** 4,
                          lambda p: -2 * al * math.sqrt(b + p) / den(p) + 2 * al / be),
    }


def dirichlet_kernel(a, b) -> KernelTerm:
    """(b t + 1)/sqrt(pi t), the flux kernel of a Dirichlet end."""
    return KernelTerm("ux", 1.0, 0.0, b / 2, lambda p: math.sqrt(b + p) / p)


@dataclass(frozen=True)
class ExpansionKernels:
    """Kernels of one end, in the printed (original x) orientation."""

    end: int
    dirichlet: bool
    terms: dict

    @classmethod
    def for_end(cls, spec: ProblemSpec, end) -> ExpansionKernels:
        k = _end_index(end)
        bc = spec.bc(k)
        if beta_is_zero(bc.alpha, bc.beta):
            return cls(k, True, {"ux": dirichlet_kernel(spec.a, spec.b)})
        sign = 1 if k == 1 else -1
        raw = robin_kernels(spec.a, spec.b, bc.alpha, sign * bc.beta)
        if sign == 1:
            return cls(k, False, raw)
        # fluxes change sign when read along +x
        out = dict(raw)
        for key in ("ux1", "ux2"):
            t = raw[key]
            ex = t.exact
            out[key] = KernelTerm(key, -t.A, -t.B, -t.C, (lambda e: lambda p: -e(p))(ex))
        return cls(k, False, out)


# ------------------------------------------------------------- convolution

def convolve_singular(kernel, f, t, tol=1e-12, *, f_is_regular=False, n0=16, n_max=4096):
    """int_0^t k(t - tau) f(tau) dtau for k ~ s^-1/2 and f ~ tau^-1/2 at worst.

    With tau = t sin^2(theta) the integrand becomes
    2 [sqrt(t - tau) k(t - tau)] [sqrt(tau) f(tau)], smooth on [0, pi/2];
    Gauss-Legendre is doubled from ``n0`` nodes until two successive
    estimates agree to ``tol`` (relative to the integral of |integrand|).

    Parameters
    ----------
    kernel : KernelTerm or callable
        A KernelTerm supplies ``reg(s) = sqrt(s) k(s)``; a plain callable is
        taken as k itself.
    f : callable
        f(tau), or sqrt(tau) f(tau) as a function of sigma = sqrt(tau) when
        ``f_is_regular`` is set.
    """
    if t <= 0:
        raise DomainError("convolution needs t > 0")
    kreg = _vectorized(kernel.reg if hasattr(kernel, "reg") else (lambda s: np.sqrt(s) * kernel(s)))
    if f_is_regular:
        freg = _vectorized(f)
    else:
        fv = _vectorized(f)

        def freg(sig):
            return sig * fv(sig * sig)
    sqrt_t = math.sqrt(t)
    half = math.pi / 4

    def rule(n):
        x, w = gauss_legendre(n)
        th = half * (x + 1)
        vals = 2.0 * kreg(t * np.cos(th) ** 2) * freg(sqrt_t * np.sin(th))
        return half * float(w @ vals), half * float(w @ np.abs(vals))

    prev, _ = rule(n0)
    n = 2 * n0
    while n <= n_max:
        cur, l1 = rule(n)
        if abs(cur - prev) <= tol * max(abs(cur), l1) or l1 == 0.0:
            return cur
        prev, n = cur, 2 * n
    raise QuadratureError(f"convolution did not converge at t={t}", estimate=prev,
                          error=abs(cur - prev))


def _vectorized(func):
    """Call ``func`` on arrays, falling back to elementwise calls for scalar-only code."""
    def wrapped(arr):
        try:
            out = np.asarray(func(arr), dtype=float)
            if out.shape == arr.shape:
                return out
            if out.ndim == 0:
                return np.full(arr.shape, float(out))
        except (TypeError, ValueError):
            pass
        return np.array([func(float(v)) for v in arr], dtype=float)
    return wrapped


# ------------------------------------------------------------ r(end, .) tables

class EndTable:
    """Chebyshev interpolants in sigma = sqrt(tau) on [0, sqrt(dt)].

    ``r(sigma)`` is r(end, sigma^2); ``h(sigma)`` is sigma * r_t(end, sigma^2),
    which stays bounded even when r_t ~ tau^-1/2.
    """

    def __init__(self, rfield: RField, end: int, cfg: ShortTimeConfig):
        self.end = end
        self.sigma_max = math.sqrt(cfg.dt)
        self.r0 = rfield.initial(end)
        pos = rfield.spec.end_position(end)
        self.r = self._fit(lambda s: rfield.value(pos, s * s), cfg)
        self.h = self._fit(lambda s: s * rfield.dt(pos, s * s), cfg)

    def _fit(self, func, cfg):
        vf = np.vectorize(lambda s: func(float(s)) if s > 0 else math.nan, otypes=[float])
        deg = 8
        while True:
            cheb = Chebyshev.interpolate(vf, deg, domain=[0.0, self.sigma_max])
            c = np.abs(cheb.coef)
            scale = max(c.max(), 1e-300)
            if c[-3:].max() <= cfg.table_tol * scale or c.max() == 0.0:
                return cheb
            if deg >= cfg.max_degree:
                raise NumericError(f"r table at end l{self.end} did not resolve "
                                   f"(tail {c[-3:].max() / scale:.2e})")
            deg *= 2


# ----------------------------------------------------------------- solution

class ShortTimeSolution:
    """All short-time quantities of one spec, sharing tables across calls."""

    def __init__(self, spec: ProblemSpec, cfg: ShortTimeConfig | None = None):
        self.spec = spec
        self.cfg = cfg or ShortTimeConfig()
        self.rfield = RField(spec)
        self._table_field = RField(spec, self.cfg.table_quad_tol, self.cfg.table_quad_tol * 100)
        self._tables: dict[int, EndTable] = {}
        self._lock = threading.Lock()

    def kernels(self, end) -> ExpansionKernels:
        return ExpansionKernels.for_end(self.spec, end)

    def table(self, end) -> EndTable:
        k = _end_index(end)
        with self._lock:
            if k not in self._tables:
                self._tables[k] = EndTable(self._table_field, k, self.cfg)
            return self._tables[k]

    def _check_t(self, t):
        if not 0 < t <= self.cfg.dt * (1 + 1e-12):
            raise DomainError(f"short-time formulas need 0 < t <= dt={self.cfg.dt}, got {t}")

    def _conv(self, kernel, freg, t):
        return convolve_singular(kernel, freg, t, self.cfg.conv_tol, f_is_regular=True)

    # -- interior -----------------------------------------------------------
    def interior(self, x, t):
        self._check_t(t)
        if not self.spec.l1 < x < self.spec.l2:
            raise DomainError("interior_approx needs l1 < x < l2")
        return self.rfield.value(x, t)

    def interior_flux(self, x, t):
        self._check_t(t)
        if not self.spec.l1 < x < self.spec.l2:
            raise DomainError("interior_flux_approx needs l1 < x < l2")
        return self.rfield.dx(x, t)

    # -- ends ---------------------------------------------------------------
    def _robin_parts(self, k, t):
        """Shared pieces of the Robin value/flux formulas at end k."""
        bc = self.spec.bc(k)
        tab = self.table(k)
        g = bc.g

        def g_reg(sig):
            return sig * g.value(sig * sig)

        def r_reg(sig):
            return sig * tab.r(sig)

        return bc, tab, g, g_reg, r_reg

    def robin_value(self, end, t):
        """u1 * g + u2 * r + 2 r at a Robin end."""
        self._check_t(t)
        k = _end_index(end)
        kern = self.kernels(k).terms
        bc, tab, g, g_reg, r_reg = self._robin_parts(k, t)
        r_t = float(tab.r(math.sqrt(t)))
        conv_g = 0.0 if g.is_zero else self._conv(kern["u1"], g_reg, t)
        return conv_g + self._conv(kern["u2"], r_reg, t) + 2 * r_t

    def robin_flux(self, end, t):
        """g / beta + ux1 * g + ux2 * r - 2 (alpha / beta) r at a Robin end."""
        self._check_t(t)
        k = _end_index(end)
        kern = self.kernels(k).terms
        bc, tab, g, g_reg, r_reg = self._robin_parts(k, t)
        r_t = float(tab.r(math.sqrt(t)))
        conv_g = 0.0 if g.is_zero else self._conv(kern["ux1"], g_reg, t)
        return (float(g.value(t)) / bc.beta + conv_g + self._conv(kern["ux2"], r_reg, t)
                - 2 * (bc.alpha / bc.beta) * r_t)

    def dirichlet_value(self, end, t):
        self._check_t(t)
        bc = self.spec.bc(end)
        return float(bc.g.value(t)) / bc.alpha

    def dirichlet_flux(self, end, t):
        """(1/a)(-g(0)/alpha + 2 r(end, 0)) K(t) + (1/a) K * (-g'/alpha + 2 r'), along d."""
        self._check_t(t)
        k = _end_index(end)
        a = self.spec.a
        bc = self.spec.bc(k)
        K = self.kernels(k).terms["ux"]
        tab = self.table(k)
        direction = 1 if k == 1 else -1
        gd = bc.g.derivative

        if bc.g.is_zero:
            def src(sig):
                return 2 * tab.h(sig)
        else:
            def src(sig):
                return -sig * gd(sig * sig) / bc.alpha + 2 * tab.h(sig)

        jump = -bc.g.value_at_zero / bc.alpha + 2 * tab.r0
        ud = (jump * K(t) if jump else 0.0) + self._conv(K, src, t)
        return direction * ud / a

    def value(self, end, t):
        bc = self.spec.bc(end)
        if beta_is_zero(bc.alpha, bc.beta):
            return self.dirichlet_value(end, t)
        return self.robin_value(end, t)

    def flux(self, end, t):
        bc = self.spec.bc(end)
        if beta_is_zero(bc.alpha, bc.beta):
            return self.dirichlet_flux(end, t)
        return self.robin_flux(end, t)

    # -- fields -------------------------------------------------------------
    def field(self, xs, ts, with_flux=False):
        from .fields import SolutionField

        xs = np.atleast_1d(np.asarray(xs, float))
        ts = np.atleast_1d(np.asarray(ts, float))
        u = np.full((len(ts), len(xs)), np.nan)
        ux = np.full_like(u, np.nan) if with_flux else None
        failures = []
        s = self.spec
        for i, t in enumerate(ts):
            for j, x in enumerate(xs):
                try:
                    if x == s.l1 or x == s.l2:
                        end = 1 if x == s.l1 else 2
                        u[i, j] = self.value(end, t)
                        if with_flux:
                            ux[i, j] = self.flux(end, t)
                    else:
                        u[i, j] = self.interior(x, t)
                        if with_flux:
                            ux[i, j] = self.interior_flux(x, t)
                except NumericError as exc:
                    failures.append({"x": float(x), "t": float(t), "error": str(exc)})
        return SolutionField(xs, ts, u, ux, "short-time",
                             {"dt": self.cfg.dt, "conv_tol": self.cfg.conv_tol,
                              "failures": failures})


@functools.lru_cache(maxsize=32)
def _solution(spec, cfg):
    return ShortTimeSolution(spec, cfg)


def _get(spec, cfg):
    return _solution(spec, cfg or ShortTimeConfig())


def interior_approx(spec, x, t, cfg=None):
    return _get(spec, cfg).interior(x, t)


def interior_flux_approx(spec, x, t, cfg=None):
    return _get(spec, cfg).interior_flux(x, t)


def boundary_value_approx(spec, end, t, cfg=None):
    return _get(spec, cfg).value(end, t)


def boundary_flux_approx(spec, end, t, cfg=None):
    return _get(spec, cfg).flux(end, t)


def short_time_field(spec, xs, ts, cfg=None, with_flux=False):
    return _get(spec, cfg).field(xs, ts, with_flux)


# --------------------------------------------------------- p-order checks

def numeric_laplace(kernel, p, rtol=1e-13):
    """int_0^inf k(t) exp(-p t) dt by quadrature in u = sqrt(p t)."""
    sp = math.sqrt(p)

    def integrand(u):
        # dt = 2 u du / p and sqrt(t) k(t) = reg(t)
        return 2.0 * kernel.reg(u * u / p) * math.exp(-u * u) / sp

    return quad(integrand, 0.0, 12.0, rtol=rtol, atol=0.0)


@dataclass
class ConsistencyReport:
    end: int
    p: list
    errors: dict
    exponents: dict
    expected: dict

    def ok(self, tol=0.3) -> bool:
        return all(v == math.inf or abs(v - self.expected[k]) <= tol
                   for k, v in self.exponents.items())


def laplace_consistency_check(spec, end, p_samples=(1e4, 1e5, 1e6)) -> ConsistencyReport:
    """Measure how fast |L{k}(p) - exact(p)| decays for each kernel of ``end``.

    The transform of each closed-form time kernel is computed by quadrature;
    the exponent is the least-squares slope of -log(error) against log(p).
    """
    ps = [float(p) for p in p_samples]
    if min(ps) < 1e3:
        raise ValueError("p samples must be large (>= 1e3)")
    kern = ExpansionKernels.for_end(spec, end)
    errors, exps, expected = {}, {}, {}
    for name, term in kern.terms.items():
        exact = [term.exact(p) for p in ps]
        errs = [abs(numeric_laplace(term, p) - e) for p, e in zip(ps, exact)]
        errors[name] = errs
        expected[name] = 2.5 if kern.dirichlet else 2.0
        if all(e <= 1e-12 * abs(x) for e, x in zip(errs, exact)):
            # truncation vanishes (e.g. the Dirichlet kernel at b = 0); only round-off is left
            exps[name] = math.inf
            continue
        logs = np.log(np.maximum(errs, 1e-300))
        slope = np.polyfit(np.log(ps), logs, 1)[0] if len(ps) > 1 else float("nan")
        exps[name] = float(-slope)
    return ConsistencyReport(_end_index(end), ps, errors, exps, expected)
