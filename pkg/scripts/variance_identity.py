#!/usr/bin/env python3
"""Compare the weight-averaged trace variance against its diagonal closed
form over a small grid of odd n and squarefree levels.

Usage: python3 scripts/variance_identity.py [--n 15 27 105 625] [--levels 2 3 5 6]
"""

import argparse
import math

from hecke_spectra.eichler_selberg import diagonal_side, variance_window


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[15, 27, 105, 625, 2401])
    ap.add_argument("--levels", type=int, nargs="+", default=[2, 3, 5, 6])
    args = ap.parse_args()

    print(f"{'n':>6} {'N':>3} {'T':>6} {'variance':>18} {'diagonal':>18} {'diff':>12} {'diff/n^0.6':>12}")
    C = 0.0
    for n in args.n:
        for N in args.levels:
            if math.gcd(n, N) != 1:
                continue
            T = 2.0 * math.ceil(math.sqrt(n))
            v = variance_window(n, N, T)
            d = diagonal_side(n, N, T)
            scaled = abs(v - d) / n ** 0.6
            C = max(C, scaled)
            print(f"{n:>6} {N:>3} {T:>6.0f} {v:>18.8f} {d:>18.8f} {v - d:>12.3e} {scaled:>12.3e}")
    print(f"# fitted C = {C:.5f}")


if __name__ == "__main__":
    main()
