#!/usr/bin/env python3
"""Print normalized newform traces against the q-expansion oracles.

Usage: python3 scripts/trace_oracle_table.py [--k 12] [--nmax 50]
"""

import argparse

from hecke_spectra.eichler_selberg import trace_new
from hecke_spectra.oracles import delta_tau, level_one_eigenform


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=12)
    ap.add_argument("--nmax", type=int, default=50)
    args = ap.parse_args()

    f = delta_tau(args.nmax) if args.k == 12 else level_one_eigenform(args.k, args.nmax)
    print(f"# weight {args.k}, level 1: trace formula vs q-expansion")
    print(f"{'n':>6} {'trace':>22} {'a(n)/n^((k-1)/2)':>22} {'diff':>10}")
    worst = 0.0
    for n in range(1, args.nmax + 1):
        tr = trace_new(n, args.k, 1).total
        want = f.a(n) / n ** ((args.k - 1) / 2.0)
        worst = max(worst, abs(tr - want))
        print(f"{n:>6} {tr:>22.15f} {want:>22.15f} {tr - want:>10.2e}")
    print(f"# worst |diff| = {worst:.3e}")


if __name__ == "__main__":
    main()
