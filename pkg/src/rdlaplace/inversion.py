"""Numerical inverse Laplace transforms.

Two independent families: Gaver-Stehfest samples F on the real axis only,
fixed Talbot integrates along a deformed Bromwich contour and needs complex
evaluations. Both use node sets computed once per instance.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, InversionError, NumericError
from .fields import SolutionField

LN2 = math.log(2.0)


def _stehfest_weights(N: int) -> tuple[float, ...]:
    half = N // 2
    fact = math.factorial
    out = []
    for k in range(1, N + 1):
        acc = Fraction(0)
        for j in range((k + 1) // 2, min(k, half) + 1):
            acc += Fraction(j ** half * fact(2 * j),
                            fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k))
        out.append(float((-1) ** (k + half) * acc))
    return tuple(out)


@dataclass(frozen=True)
class GaverStehfest:
    """f(t) ~ (ln 2 / t) sum_k V_k F(k ln 2 / t), N even in [4, 20]."""

    N: int = 14
    weights: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.N % 2 or not 4 <= self.N <= 20:
            raise ValueError("Gaver-Stehfest needs an even N with 4 <= N <= 20")
        object.__setattr__(self, "weights", _stehfest_weights(self.N))

    def nodes(self, t):
        c = LN2 / t
        return [c * k for k in range(1, self.N + 1)]

    def combine(self, t, values):
        return LN2 / t * math.fsum(w * v for w, v in zip(self.weights, values))

    def __call__(self, F, t):
        return self.combine(t, [F(p) for p in self.nodes(t)])


@dataclass(frozen=True)
class FixedTalbot:
    """Fixed-Talbot contour p(theta) = r theta (cot theta + i), r = 2M/(5t)."""

    M: int = 24
    theta: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.M < 8:
            raise ValueError("fixed Talbot needs M >= 8")
        object.__setattr__(self, "theta", np.arange(1, self.M) * math.pi / self.M)

    def nodes(self, t):
        r = 2.0 * self.M / (5.0 * t)
        th = self.theta
        cot = 1.0 / np.tan(th)
        p = r * th * (cot + 1j)
        sigma = th + (th * cot - 1.0) * cot
        w = np.exp(t * p) * (1 + 1j * sigma)
        # nodes whose weight is negligible next to exp(r t) are skipped
        keep = np.abs(w) > 1e-30 * math.exp(r * t)
        return r, p[keep], w[keep]

    def __call__(self, F, t):
        r, ps, ws = self.nodes(t)
        total = 0.5 * F(r) * math.exp(r * t)
        total += sum((w * F(complex(p))).real for p, w in zip(ps, ws))
        return float(np.real(total)) * r / self.M


DEFAULT_METHOD = GaverStehfest(14)


def parse_method(text: str | None):
    """'stehfest', 'stehfest:N=16', 'talbot', 'talbot:M=32'."""
    if text is None or text in ("", "default"):
        return DEFAULT_METHOD
    name, _, arg = text.partition(":")
    kw = dict(item.split("=") for item in arg.split(",") if item)
    name = name.lower().replace("-", "_")
    if name in ("stehfest", "gaver_stehfest", "gs"):
        return GaverStehfest(int(kw.get("N", 14)))
    if name in ("talbot", "fixed_talbot"):
        return FixedTalbot(int(kw.get("M", 24)))
    raise ValueError(f"unknown inversion method {text!r}")


def invert(F, t, method=None):
    """Approximate f(t) from its transform F."""
    if t <= 0:
        raise DomainError("inversion needs t > 0")
    method = method or DEFAULT_METHOD
    with np.errstate(over="raise", invalid="raise"):
        try:
            val = method(F, t)
        except (OverflowError, FloatingPointError) as exc:
            raise InversionError(f"inversion overflow at t={t}: {exc}") from None
    if not math.isfinite(val):
        raise InversionError(f"non-finite inverse at t={t}", estimate=val)
    return val


@dataclass(frozen=True)
class StehfestEstimate:
    value: float
    error: float
    flagged: bool


def stehfest_error_estimate(F, t, N=14, rel_flag=1e-3) -> StehfestEstimate:
    """|f_N - f_{N-2}| as an error proxy; flagged above ``rel_flag`` relative."""
    hi = invert(F, t, GaverStehfest(N))
    lo = invert(F, t, GaverStehfest(N - 2))
    err = abs(hi - lo)
    return StehfestEstimate(hi, err, err > rel_flag * abs(hi))


def worker_count(default: int = 1) -> int:
    env = os.environ.get("RDLAPLACE_WORKERS")
    if env:
        return max(1, int(env))
    return default


def _map(fn, items, workers):
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


def invert_grid(F_family, xs, ts, method=None, dF_family=None, workers=None,
                provenance="operational") -> SolutionField:
    """Invert ``F_family(x, p)`` at every grid point.

    A failing point is stored as NaN and listed in ``field.meta['failures']``.
    """
    xs = np.atleast_1d(np.asarray(xs, float))
    ts = np.atleast_1d(np.asarray(ts, float))
    if np.any(ts <= 0):
        raise DomainError("invert_grid needs all t > 0")
    method = method or DEFAULT_METHOD
    failures = []

    def one(ij):
        i, j = ij
        x, t = xs[j], ts[i]
        out = []
        for fam in (F_family, dF_family):
            if fam is None:
                out.append(np.nan)
                continue
            try:
                out.append(invert(lambda p: fam(x, p), t, method))
            except NumericError as exc:
                failures.append({"x": float(x), "t": float(t), "error": str(exc)})
                out.append(np.nan)
        return out

    idx = [(i, j) for i in range(len(ts)) for j in range(len(xs))]
    vals = np.array(_map(one, idx, worker_count() if workers is None else workers))
    u = vals[:, 0].reshape(len(ts), len(xs))
    ux = vals[:, 1].reshape(len(ts), len(xs)) if dF_family is not None else None
    failures.sort(key=lambda d: (d["t"], d["x"]))
    return SolutionField(xs, ts, u, ux, provenance,
                         {"method": repr(method), "failures": failures})


def operational_field(spec, xs, ts, method=None, with_flux=False, workers=None):
    """Time-domain field from the exact transform of ``spec``."""
    from .laplace import OperationalSolution

    sol = OperationalSolution(spec)
    return invert_grid(sol.U, xs, ts, method, sol.Ux if with_flux else None, workers)
