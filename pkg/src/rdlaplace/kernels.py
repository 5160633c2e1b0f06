"""Gaussian reaction-diffusion kernel and the free-space field r(x, t).

r(x, t) is the solution of the free problem on [l1, l2] with the data
extended by zero outside: the initial profile convolved with the damped
Gaussian, plus the Duhamel integral of the source.

All spatial integrals use the scaled variable ``xi = x + 2 a sqrt(t) z`` so the
kernel becomes ``exp(-z^2) / sqrt(pi)``; the Duhamel time integral uses
``t - theta = sigma^2`` which removes the ``1/sqrt(t - theta)`` singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SpecError
from .problem import ProblemSpec, _end_index
from .quadrature import quad

SQRT_PI = math.sqrt(math.pi)
# exp(-Z^2) ~ 5e-32: the Gaussian tail beyond |xi - x| = 12 a sqrt(2 t)/2 is negligible
Z_CUT = 6.0 * math.sqrt(2.0)
PHI_TOL = 1e-10
DUHAMEL_TOL = 1e-8


def gauss_kernel(x, xi, t, a, b):
    """exp(-b t) exp(-(xi - x)^2 / (4 a^2 t)) / (2 a sqrt(pi t))."""
    if np.any(np.asarray(t) <= 0):
        raise DomainError("gauss_kernel needs t > 0")
    x, xi, t = np.asarray(x, float), np.asarray(xi, float), np.asarray(t, float)
    out = np.exp(-b * t - (xi - x) ** 2 / (4 * a * a * t)) / (2 * a * np.sqrt(np.pi * t))
    return out if out.ndim else float(out)


def gamma_inverse_chi(eta, t, a, b):
    """Inverse transform of chi(eta, p): eta exp(-b t - eta^2/(4 a^2 t)) / (2 a sqrt(pi) t^1.5)."""
    if eta <= 0 or np.any(np.asarray(t) <= 0):
        raise DomainError("gamma_inverse_chi needs eta > 0 and t > 0")
    t = np.asarray(t, float)
    out = eta * np.exp(-b * t - eta * eta / (4 * a * a * t)) / (2 * a * SQRT_PI * t ** 1.5)
    return out if out.ndim else float(out)


def _z_window(lo, hi, x, scale):
    zlo = max((lo - x) / scale, -Z_CUT) if math.isfinite(lo) else -Z_CUT
    zhi = min((hi - x) / scale, Z_CUT) if math.isfinite(hi) else Z_CUT
    return zlo, zhi


def _z_breaks(breaks, x, scale):
    return [(bp - x) / scale for bp in breaks]


def _abs_floor(integrand, lo, hi, tol):
    """Absolute tolerance scaled by the integrand size, for integrals that cancel to ~0."""
    mag = max(abs(integrand(z)) for z in np.linspace(lo, hi, 17))
    return max(tol * 1e-3 * mag * (hi - lo), 1e-300)


@dataclass(frozen=True)
class _Frame:
    """Data seen from a point: phi, f on [lo, hi], evaluated at x.

    ``sign`` converts an x-derivative computed in the frame back to the
    original orientation.
    """

    phi: object
    f: object
    lo: float
    hi: float
    x: float
    sign: int = 1


class RField:
    """Evaluator for r(x, t) and the derivatives the short-time formulas need.

    Parameters
    ----------
    spec : ProblemSpec
    quad_tol : float
        Relative tolerance of the initial-profile integral.
    duhamel_tol : float
        Relative tolerance of the nested source integral.
    """

    def __init__(self, spec: ProblemSpec, quad_tol: float = PHI_TOL,
                 duhamel_tol: float = DUHAMEL_TOL):
        self.spec = spec
        self.quad_tol = quad_tol
        self.duhamel_tol = duhamel_tol
        self._frames: dict[int, _Frame] = {}

    # -- frames ------------------------------------------------------------
    def end_frame(self, end) -> _Frame:
        """Distance-from-end coordinates, so both ends share identical arithmetic."""
        k = _end_index(end)
        if k not in self._frames:
            s = self.spec
            origin, direction = s.end_frame(k)
            if not math.isfinite(origin):
                raise DomainError(f"end l{k} is at infinity")
            other = s.l2 if k == 1 else s.l1
            hi = abs(other - origin) if math.isfinite(other) else math.inf
            self._frames[k] = _Frame(s.phi.reframe(origin, direction), s.f.reframe(origin, direction),
                                     0.0, hi, 0.0, direction)
        return self._frames[k]

    def _frame_at(self, x) -> _Frame:
        s = self.spec
        if x == s.l1 and math.isfinite(s.l1):
            return self.end_frame(1)
        if x == s.l2 and math.isfinite(s.l2):
            return self.end_frame(2)
        if not s.l1 <= x <= s.l2:
            raise DomainError(f"x={x} outside [{s.l1}, {s.l2}]")
        return _Frame(s.phi, s.f, s.l1, s.l2, float(x), 1)

    # -- building blocks ---------------------------------------------------
    def _gauss_avg(self, func, fr: _Frame, t, weight=None, subtract=None, tol=None,
                   breaks=()):
        """exp(-b t)/sqrt(pi) * int func(x + 2 a sqrt(t) z) w(z) exp(-z^2) dz over the window.

        ``subtract`` is the constant removed from func before integrating; the
        caller adds back its analytic contribution.
        """
        s = self.spec
        scale = 2 * s.a * math.sqrt(t)
        zlo, zhi = _z_window(fr.lo, fr.hi, fr.x, scale)
        if zlo >= zhi:
            return 0.0, (zlo, zhi)
        c = 0.0 if subtract is None else subtract
        pp = getattr(func, "pp", None)
        if subtract is not None and pp is not None:
            delta = pp.increment(fr.x, c)
        else:
            def delta(h):
                return func(fr.x + h) - c
        if weight is None:
            def integrand(z):
                return delta(scale * z) * math.exp(-z * z)
        else:
            def integrand(z):
                return delta(scale * z) * weight(z) * math.exp(-z * z)
        tol = tol or self.quad_tol
        val = quad(integrand, zlo, zhi, rtol=tol, atol=_abs_floor(integrand, zlo, zhi, tol),
                   points=_z_breaks(breaks, fr.x, scale))
        return math.exp(-s.b * t) * val / SQRT_PI, (zlo, zhi)

    def _phi_term(self, fr: _Frame, t):
        if self.spec.phi.is_zero:
            return 0.0
        return self._gauss_avg(fr.phi, fr, t, breaks=fr.phi.breakpoints)[0]

    def _source_slice(self, fr: _Frame, sigma, t, fsel, weight=None):
        """Inner Duhamel integral at s = sigma^2, time t - sigma^2."""
        if sigma == 0.0:
            return 0.0
        s = self.spec
        scale = 2 * s.a * sigma
        zlo, zhi = _z_window(fr.lo, fr.hi, fr.x, scale)
        if zlo >= zhi:
            return 0.0
        tau = t - sigma * sigma
        if weight is None:
            def integrand(z):
                return fsel(fr.x + scale * z, tau) * math.exp(-z * z)
        else:
            def integrand(z):
                return fsel(fr.x + scale * z, tau) * weight(z) * math.exp(-z * z)
        val = quad(integrand, zlo, zhi, rtol=self.duhamel_tol,
                   atol=_abs_floor(integrand, zlo, zhi, self.duhamel_tol))
        return math.exp(-s.b * sigma * sigma) * val / SQRT_PI

    def _duhamel(self, fr: _Frame, t, fsel, weight=None, jac=None):
        jac = jac or (lambda sg: 2.0 * sg)
        def outer(sg):
            return jac(sg) * self._source_slice(fr, sg, t, fsel, weight)
        hi = math.sqrt(t)
        return quad(outer, 0.0, hi, rtol=self.duhamel_tol,
                    atol=_abs_floor(outer, 0.0, hi, self.duhamel_tol))

    # -- public evaluators -------------------------------------------------
    def value(self, x, t):
        """r(x, t) for t > 0."""
        if t <= 0:
            raise DomainError("r(x, t) needs t > 0; use initial() for the limit")
        fr = self._frame_at(x)
        total = self._phi_term(fr, t)
        if not self.spec.f.is_zero:
            total += self._duhamel(fr, t, fr.f.value)
        return total

    __call__ = value

    def dx(self, x, t):
        """d r / d x (one-sided at the ends)."""
        if t <= 0:
            raise DomainError("r_x needs t > 0")
        s = self.spec
        fr = self._frame_at(x)
        total = 0.0
        if not s.phi.is_zero:
            sq = math.sqrt(t)
            c = fr.phi.limit(fr.x, "right") if fr.x == fr.lo else (
                fr.phi.limit(fr.x, "left") if fr.x == fr.hi else fr.phi(fr.x))
            val, (zlo, zhi) = self._gauss_avg(fr.phi, fr, t, weight=lambda z: z, subtract=c,
                                              breaks=fr.phi.breakpoints)
            # int z exp(-z^2) dz = [-exp(-z^2)/2]
            exact = (math.exp(-zlo * zlo) - math.exp(-zhi * zhi)) / 2
            total += (val + c * math.exp(-s.b * t) * exact / SQRT_PI) / (s.a * sq)
        if not s.f.is_zero:
            total += self._duhamel(fr, t, fr.f.value, weight=lambda z: z,
                                   jac=lambda sg: 2.0 / s.a)
        return fr.sign * total

    def dt(self, x, t):
        """d r / d t, differentiating the kernel under the integral."""
        if t <= 0:
            raise DomainError("r_t needs t > 0")
        s = self.spec
        fr = self._frame_at(x)
        total = 0.0
        if not s.phi.is_zero:
            c = fr.phi.limit(fr.x, "right") if fr.x == fr.lo else (
                fr.phi.limit(fr.x, "left") if fr.x == fr.hi else fr.phi(fr.x))
            val, (zlo, zhi) = self._gauss_avg(fr.phi, fr, t, weight=lambda z: z * z - 0.5,
                                              subtract=c, breaks=fr.phi.breakpoints)
            # int (z^2 - 1/2) exp(-z^2) dz = [-z exp(-z^2)/2]
            exact = (zlo * math.exp(-zlo * zlo) - zhi * math.exp(-zhi * zhi)) / 2
            total += (val + c * math.exp(-s.b * t) * exact / SQRT_PI) / t
            if s.b:
                total -= s.b * self._phi_term(fr, t)
        if not s.f.is_zero:
            ft = fr.f.time_derivative
            if ft is None:
                raise SpecError("source needs an explicit time derivative for r_t")
            f0 = fr.f.value
            total += self._gauss_avg(lambda xi: f0(xi, 0.0), fr, t, tol=self.duhamel_tol)[0]
            total += self._duhamel(fr, t, ft)
        return total

    def initial(self, end) -> float:
        """lim r(end, t) as t -> 0+: half the one-sided value of phi."""
        k = _end_index(end)
        s = self.spec
        pos = s.l1 if k == 1 else s.l2
        if not math.isfinite(pos):
            raise DomainError(f"end l{k} is at infinity")
        side = "right" if k == 1 else "left"
        return 0.5 * s.phi.limit(pos, side)


def r_field(spec, x, t, quad_tol=PHI_TOL):
    return RField(spec, quad_tol).value(x, t)


def r_field_dx(spec, x, t, quad_tol=PHI_TOL):
    return RField(spec, quad_tol).dx(x, t)


def r_time_derivative(spec, end, t, quad_tol=PHI_TOL):
    rf = RField(spec, quad_tol)
    return rf.dt(spec.end_position(end), t)


def r_boundary_initial(spec, end):
    return RField(spec).initial(end)
