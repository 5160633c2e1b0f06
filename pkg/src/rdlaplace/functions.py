"""User-supplied data functions: initial profile, boundary data, source.

Every built-in expression (constant, polynomial, piecewise-linear table) is a
:class:`PiecewisePolynomial` underneath. Evaluation only uses ``+`` and ``*``
so the same objects work on floats, numpy arrays and mpmath numbers.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate


def _horner(coeffs, u):
    acc = coeffs[-1] + 0 * u
    for c in reversed(coeffs[:-1]):
        acc = acc * u + c
    return acc


def _taylor_flip(coeffs, h):
    """Coefficients of Q(v) = P(h - v) for P given in ascending powers."""
    n = len(coeffs)
    out = [0.0] * n
    for k, ck in enumerate(coeffs):
        if ck == 0:
            continue
        for j in range(k + 1):
            hk = 1.0 if k == j else h ** (k - j)
            out[j] += ck * math.comb(k, j) * hk * (-1) ** j
    return tuple(out)


class PiecewisePolynomial:
    """Piecewise polynomial on the whole real line.

    ``breaks`` holds the n finite breakpoints; there are n + 1 pieces, the
    first extending to -inf and the last to +inf. Piece i is stored as a
    polynomial in the local offset ``x - origins[i]`` (ascending powers).
    Evaluation is right-continuous at breakpoints.
    """

    def __init__(self, breaks: Sequence[float], coeffs: Sequence[Sequence[float]],
                 origins: Sequence[float] | None = None):
        self.breaks = tuple(float(b) for b in breaks)
        if any(b1 >= b2 for b1, b2 in zip(self.breaks[:-1], self.breaks[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(coeffs) != len(self.breaks) + 1:
            raise ValueError("need one coefficient tuple per piece (len(breaks) + 1)")
        self.coeffs = tuple(tuple(float(c) for c in cs) if len(cs) else (0.0,) for cs in coeffs)
        if origins is None:
            # piece 0 is anchored at the first break, piece i at break i-1
            origins = (self.breaks[0],) + self.breaks if self.breaks else (0.0,)
        self.origins = tuple(float(o) for o in origins)

    def _index(self, x, side="right"):
        if side == "right":
            return bisect.bisect_right(self.breaks, x)
        return bisect.bisect_left(self.breaks, x)

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            idx = np.searchsorted(self.breaks, x, side="right")
            out = np.empty_like(x, dtype=float)
            for i in np.unique(idx):
                m = idx == i
                out[m] = _horner(self.coeffs[i], x[m] - self.origins[i])
            return out
        i = self._index(x)
        return _horner(self.coeffs[i], x - self.origins[i])

    def limit(self, x, side):
        """One-sided limit; ``side`` is 'left' or 'right'."""
        i = self._index(x, "left" if side == "left" else "right")
        return _horner(self.coeffs[i], x - self.origins[i])

    def increment(self, x, c):
        """Return h -> self(x + h) - c without cancellation for small h.

        Within a piece, P(y + h) - P(y) is summed as h * sum_m (y + h)^m y^(j-1-m),
        so when ``c`` is a value of P at x the result keeps full relative accuracy.
        """
        x = float(x)

        def inc(h):
            i = self._index(x + h)
            cs = self.coeffs[i]
            y = x - self.origins[i]
            u = y + h
            diff = 0.0
            for j in range(1, len(cs)):
                if cs[j]:
                    diff += cs[j] * sum(u ** m * y ** (j - 1 - m) for m in range(j))
            return diff * h + (_horner(cs, y) - c)

        return inc

    def derivative(self) -> PiecewisePolynomial:
        dc = [tuple(k * c for k, c in enumerate(cs))[1:] or (0.0,) for cs in self.coeffs]
        return PiecewisePolynomial(self.breaks, dc, self.origins)

    def reframe(self, origin: float, direction: int) -> PiecewisePolynomial:
        """Return q(d) = self(origin + direction * d).

        The transform is done on the coefficients, so mirror-symmetric data
        yields bit-identical pieces in both frames when the arithmetic is exact.
        """
        if direction == 1:
            return PiecewisePolynomial([b - origin for b in self.breaks], self.coeffs,
                                       [o - origin for o in self.origins])
        if direction != -1:
            raise ValueError("direction must be +1 or -1")
        n = len(self.breaks)
        new_breaks = [origin - b for b in reversed(self.breaks)]
        new_coeffs, new_origins = [], []
        for i in reversed(range(n + 1)):
            cs, o = self.coeffs[i], self.origins[i]
            hi = self.breaks[i] if i < n else math.inf
            if math.isfinite(hi):
                new_coeffs.append(_taylor_flip(cs, hi - o))
                new_origins.append(origin - hi)
            else:
                new_coeffs.append(_taylor_flip(cs, 0.0))
                new_origins.append(origin - o)
        return PiecewisePolynomial(new_breaks, new_coeffs, new_origins)

    def __repr__(self):
        return f"PiecewisePolynomial(breaks={self.breaks}, coeffs={self.coeffs})"


@dataclass(frozen=True)
class SpaceFunction:
    """phi(x): piecewise continuous with declared breakpoints."""

    value: Callable
    breakpoints: tuple = ()
    pp: PiecewisePolynomial | None = field(default=None, compare=False)
    is_zero: bool = False

    def __call__(self, x):
        return self.value(x)

    def limit(self, x, side):
        if self.pp is not None:
            return self.pp.limit(x, side)
        return self.value(x)

    def reframe(self, origin: float, direction: int) -> SpaceFunction:
        if self.pp is not None:
            return SpaceFunction.from_pp(self.pp.reframe(origin, direction), is_zero=self.is_zero)
        f = self.value
        bps = tuple(sorted(direction * (b - origin) for b in self.breakpoints))
        return SpaceFunction(lambda d: f(origin + direction * d), bps, is_zero=self.is_zero)

    def derivative(self) -> SpaceFunction:
        if self.pp is None:
            raise NotImplementedError("derivative only available for piecewise polynomials")
        return SpaceFunction.from_pp(self.pp.derivative())

    @classmethod
    def from_pp(cls, pp: PiecewisePolynomial, is_zero=False):
        return cls(pp, pp.breaks, pp, is_zero)

    @classmethod
    def constant(cls, c: float):
        return cls.from_pp(PiecewisePolynomial((), [(c,)]), is_zero=(c == 0))

    @classmethod
    def zero(cls):
        return cls.constant(0.0)

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]):
        """Ascending powers of x."""
        return cls.from_pp(PiecewisePolynomial((), [tuple(coeffs)]),
                           is_zero=all(c == 0 for c in coeffs))

    @classmethod
    def piecewise_linear(cls, points: Sequence[Sequence[float]]):
        """Linear interpolation through (x, y) points, held constant outside."""
        pts = [(float(x), float(y)) for x, y in points]
        if len(pts) < 2:
            raise ValueError("piecewise-linear table needs at least two points")
        xs = [p[0] for p in pts]
        coeffs = [(pts[0][1],)]
        for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
            coeffs.append((y0, (y1 - y0) / (x1 - x0)))
        coeffs.append((pts[-1][1],))
        origins = [xs[0], *xs]
        return cls.from_pp(PiecewisePolynomial(xs, coeffs, origins),
                           is_zero=all(p[1] == 0 for p in pts))

    @classmethod
    def piecewise_polynomial(cls, breaks, coeffs, origins=None):
        return cls.from_pp(PiecewisePolynomial(breaks, coeffs, origins))

    @classmethod
    def from_callable(cls, func: Callable, breakpoints: Sequence[float] = ()):
        return cls(func, tuple(sorted(float(b) for b in breakpoints)))


def _poly_laplace(coeffs, p):
    # L{t^j} = j! / p^(j+1)
    total = 0
    for j, c in enumerate(coeffs):
        if c:
            total = total + c * math.factorial(j) / p ** (j + 1)
    return total


@dataclass(frozen=True)
class TimeFunction:
    """g(t) on [0, T] with its derivative; optional analytic transform."""

    value: Callable
    derivative: Callable
    laplace: Callable | None = None
    is_zero: bool = False

    def __call__(self, t):
        return self.value(t)

    @property
    def value_at_zero(self) -> float:
        return float(self.value(0.0))

    def transform(self, p):
        """G(p); numeric time quadrature when no closed form is attached."""
        if self.is_zero:
            return 0.0 * p
        if self.laplace is not None:
            return self.laplace(p)
        return _numeric_laplace(self.value, p)

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]):
        """Ascending powers of t."""
        cs = tuple(float(c) for c in coeffs) or (0.0,)
        dcs = tuple(k * c for k, c in enumerate(cs))[1:] or (0.0,)
        return cls(lambda t: _horner(cs, t), lambda t: _horner(dcs, t),
                   lambda p: _poly_laplace(cs, p), all(c == 0 for c in cs))

    @classmethod
    def constant(cls, c: float):
        return cls.polynomial((c,))

    @classmethod
    def zero(cls):
        return cls.polynomial((0.0,))

    @classmethod
    def from_callable(cls, func, derivative, laplace=None):
        return cls(np.vectorize(func, otypes=[float]), np.vectorize(derivative, otypes=[float]),
                   laplace)


def _numeric_laplace(func, p):
    if np.iscomplexobj(p) and np.imag(p) != 0:
        re = integrate.quad(lambda u: func(u / p.real) * np.cos(p.imag * u / p.real) * np.exp(-u),
                            0, np.inf, limit=200)[0]
        im = integrate.quad(lambda u: -func(u / p.real) * np.sin(p.imag * u / p.real) * np.exp(-u),
                            0, np.inf, limit=200)[0]
        return (re + 1j * im) / p.real
    p = float(np.real(p))
    return integrate.quad(lambda u: func(u / p) * math.exp(-u), 0, np.inf, limit=200)[0] / p


@dataclass(frozen=True)
class SourceFunction:
    """f(x, t), optionally with its transform F(x, p) and time derivative."""

    value: Callable
    laplace_value: Callable | None = None
    time_derivative: Callable | None = None
    is_zero: bool = False

    def __call__(self, x, t):
        return self.value(x, t)

    def transform(self, x, p):
        if self.is_zero:
            return 0.0 * p
        if self.laplace_value is not None:
            return self.laplace_value(x, p)
        return _numeric_laplace(lambda t: self.value(x, t), p)

    def reframe(self, origin: float, direction: int) -> SourceFunction:
        if self.is_zero:
            return self
        f, F, ft = self.value, self.laplace_value, self.time_derivative
        return SourceFunction(
            lambda d, t: f(origin + direction * d, t),
            None if F is None else (lambda d, p: F(origin + direction * d, p)),
            None if ft is None else (lambda d, t: ft(origin + direction * d, t)),
        )

    @classmethod
    def zero(cls):
        return cls(lambda x, t: 0.0 * x, lambda x, p: 0.0 * p, lambda x, t: 0.0 * x, True)

    @classmethod
    def constant(cls, c: float):
        if c == 0:
            return cls.zero()
        return cls(lambda x, t: c + 0.0 * x, lambda x, p: c / p, lambda x, t: 0.0 * x)

    @classmethod
    def polynomial(cls, coeffs: Sequence[Sequence[float]]):
        """f = sum_ij coeffs[i][j] x^i t^j."""
        cs = [[float(c) for c in row] for row in coeffs]
        if all(c == 0 for row in cs for c in row):
            return cls.zero()

        def value(x, t):
            return sum(_horner(row, t) * x ** i for i, row in enumerate(cs))

        def lap(x, p):
            return sum(_poly_laplace(row, p) * x ** i for i, row in enumerate(cs))

        def dt(x, t):
            total = 0.0 * x
            for i, row in enumerate(cs):
                drow = [k * c for k, c in enumerate(row)][1:] or [0.0]
                total = total + _horner(drow, t) * x ** i
            return total

        return cls(value, lap, dt)

    @classmethod
    def from_callable(cls, func, laplace_value=None, time_derivative=None):
        return cls(func, laplace_value, time_derivative)
