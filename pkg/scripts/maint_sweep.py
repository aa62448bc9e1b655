#!/usr/bin/env python3
"""Transition-window residuals of the newform Petersson sums: the main
Bessel term is subtracted and the leftover is scaled by sqrt(k).

Warning: the k = 4000 cells take a few minutes each on first run.

Usage: python3 scripts/maint_sweep.py [--k 500 1000] [--levels 1 2 3 5 6]
"""

import argparse
import math

from hecke_spectra.petersson import maint_main_terms, maint_residual


def window_cell(k, N):
    x_target = k + 0.8086 * k ** (1.0 / 3.0)
    n = round((x_target / (4.0 * math.pi)) ** 2)
    while math.gcd(n, N) != 1 or abs(4.0 * math.pi * math.sqrt(n) - k) >= 2.0 * k ** (1.0 / 3.0):
        n += 1
    return n


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, nargs="+", default=[500, 1000])
    ap.add_argument("--levels", type=int, nargs="+", default=[1, 2, 3, 5, 6])
    args = ap.parse_args()

    print(f"{'k':>6} {'N':>3} {'n':>8} {'residual':>12} {'res*sqrt(k)':>12} {'|main|':>10} {'ratio':>8}")
    for k in args.k:
        for N in args.levels:
            n = window_cell(k, N)
            res = maint_residual(k, N, 1, n)
            main = maint_main_terms(k, N, 1, n)
            print(f"{k:>6} {N:>3} {n:>8} {res:>12.3e} {res * math.sqrt(k):>12.4f} "
                  f"{abs(main):>10.3e} {abs(res) / abs(main):>8.4f}")


if __name__ == "__main__":
    main()
