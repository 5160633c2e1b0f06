"""Relative error of Gaver-Stehfest and fixed Talbot on known transform pairs."""

import math

import numpy as np

from rdlaplace.inversion import FixedTalbot, GaverStehfest, invert
from rdlaplace.kernels import gamma_inverse_chi
from rdlaplace.laplace import chi

PAIRS = {
    "1/p": (lambda p: 1 / p, lambda t: 1.0),
    "1/p^2": (lambda p: 1 / p ** 2, lambda t: t),
    "1/(p+2)": (lambda p: 1 / (p + 2), lambda t: math.exp(-2 * t)),
    "chi(1,p)": (lambda p: chi(1.0, p, 1.0, 0.0), lambda t: gamma_inverse_chi(1.0, t, 1.0, 0.0)),
}


def main():
    ts = np.array([0.1, 0.5, 1.0, 2.0, 5.0])
    methods = [GaverStehfest(10), GaverStehfest(14), GaverStehfest(18), FixedTalbot(16),
               FixedTalbot(24), FixedTalbot(32)]
    print(f"{'pair':<10}" + "".join(f"{repr(m):>22}" for m in methods))
    for name, (F, f) in PAIRS.items():
        row = []
        for m in methods:
            row.append(max(abs(invert(F, t, m) - f(t)) / abs(f(t)) for t in ts))
        print(f"{name:<10}" + "".join(f"{e:>22.2e}" for e in row))


if __name__ == "__main__":
    main()
