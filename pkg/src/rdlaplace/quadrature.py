"""Thin wrappers around QUADPACK (``scipy.integrate.quad``).

QUADPACK's adaptive Gauss-Kronrod subdivision is used as-is; these helpers
add interval splitting at known kinks and turn silent budget exhaustion into
:class:`~rdlaplace.errors.QuadratureError`.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from .errors import QuadratureError

LIMIT = 200


def split_points(lo, hi, points):
    """Sorted unique cut points strictly inside (lo, hi), with the ends."""
    inner = sorted({float(p) for p in points if lo < p < hi})
    return [lo, *inner, hi]


def quad(func, lo, hi, *, rtol=1e-10, atol=0.0, points=(), complex_func=False):
    """Integrate ``func`` over [lo, hi], splitting at ``points``.

    Returns the value; raises QuadratureError when QUADPACK reports failure
    and its own error estimate exceeds the requested tolerance by 100x.
    """
    if lo == hi:
        return 0.0
    sign = 1.0
    if lo > hi:
        lo, hi, sign = hi, lo, -1.0
    total = 0.0
    err_total = 0.0
    edges = split_points(lo, hi, points)
    for a, b in zip(edges[:-1], edges[1:]):
        if a == b:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            if complex_func:
                val, err = integrate.quad(func, a, b, epsabs=atol, epsrel=rtol,
                                          limit=LIMIT, complex_func=True)
                # scipy packs the real and imaginary error estimates into one complex number
                err = abs(err.real) + abs(err.imag) if isinstance(err, complex) else err
            else:
                val, err = integrate.quad(func, a, b, epsabs=atol, epsrel=rtol, limit=LIMIT)
        total += val
        err_total += err
    allowed = 100.0 * max(atol, rtol * abs(total), 1e-300)
    # QUADPACK error estimates are pessimistic near round-off; 1e-15 relative is the floor
    if not math.isfinite(abs(total)) or err_total > max(allowed, 1e-14 * abs(total) + 1e-300):
        raise QuadratureError(
            f"quadrature on [{lo}, {hi}] did not converge (estimate {total}, error {err_total})",
            estimate=sign * total, error=err_total)
    return sign * total


def gauss_legendre(n):
    """Cached Gauss-Legendre nodes/weights on [-1, 1]."""
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}
