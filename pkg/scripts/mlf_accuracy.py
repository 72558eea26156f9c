"""Relative error of the Mittag-Leffler evaluator against mpmath.

The reference sums the Taylor series at a working precision chosen from
the size of the largest term, so cancellation never eats the digits.
"""

from __future__ import annotations

import argparse

import mpmath as mp
import numpy as np

from frachum import mittag_leffler_array


def reference(alpha, beta, z, digits=20):
    x = -z
    # the largest term is about exp(x**(1/alpha)); carry that many extra digits
    extra = int(x ** (1.0 / alpha) / 2.3) + 10 if x > 0 else 0
    with mp.workdps(digits + extra):
        a, b, zz = mp.mpf(alpha), mp.mpf(beta), mp.mpf(z)
        return float(mp.nsum(lambda k: zz**k / mp.gamma(a * k + b), [0, mp.inf]))


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--alphas", type=float, nargs="+", default=[0.3, 0.5, 0.7, 0.9, 0.99])
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--zmax", type=float, default=200.0)
    args = p.parse_args()
    print(f"{'alpha':>6} {'beta':>6} {'worst rel err':>14} {'at z':>10}")
    for alpha in args.alphas:
        # keep the reference affordable: the series needs ~x**(1/alpha) terms
        zmax = min(args.zmax, 1500.0**alpha)
        z = -np.geomspace(1e-3, zmax, args.points)
        for beta in (alpha, 1.0):
            got = mittag_leffler_array(alpha, beta, z)
            ref = np.array([reference(alpha, beta, v) for v in z])
            rel = np.abs(got - ref) / np.abs(ref)
            i = int(np.argmax(rel))
            print(f"{alpha:6.3f} {beta:6.3f} {rel[i]:14.2e} {z[i]:10.3g}")


if __name__ == "__main__":
    main()
