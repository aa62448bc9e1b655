#!/usr/bin/env python3
"""Unweighted short-window trace average against its Bessel main term.

Usage: python3 scripts/noweight_convergence.py [--n 2280 9120 36480] [--delta 0.25]
"""

import argparse
import math

from hecke_spectra.eichler_selberg import (
    WindowSpec,
    averaged_trace_window,
    noweight_main_term,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[2280, 9120, 36480])
    ap.add_argument("--N", type=int, default=1)
    ap.add_argument("--delta", type=float, default=0.25)
    args = ap.parse_args()

    print(f"{'n':>8} {'K':>6} {'average':>14} {'main term':>14} {'ratio':>10}")
    for n in args.n:
        K = int(4.0 * math.pi * math.sqrt(n))
        spec = WindowSpec(float(K), args.delta, 1.0, K ** args.delta)
        lhs = averaged_trace_window(n, args.N, spec)
        main = noweight_main_term(n, args.N, K)
        print(f"{n:>8} {K:>6} {lhs:>14.6f} {main:>14.6f} {lhs / main:>10.5f}")


if __name__ == "__main__":
    main()
