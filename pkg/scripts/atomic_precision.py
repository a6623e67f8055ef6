"""gamma_n for the 40-atom measure z_k = exp(2 pi i / k), weight 2^-k: double vs mpmath.

The double-precision sweep breaks down at a small order; the high-precision
column shows where double values lose accuracy and that gamma_n is 0 once
n reaches the number of atoms.  Needs mpmath.
"""
import argparse

import mpmath as mp

from momidx import catalog
from momidx import indexes as ix
from momidx.matrix_source import MomentOracle


def exact_gamma(points, weights, n):
    G = mp.matrix(n + 1, n + 1)
    for j in range(n + 1):
        for k in range(n + 1):
            G[j, k] = mp.fsum(w * z**j * mp.conj(z) ** k for z, w in zip(points, weights))
    if n == 0:
        return mp.re(G[0, 0])
    return mp.re(mp.det(G)) / mp.re(mp.det(G[1:, 1:]))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--atoms", type=int, default=40)
    p.add_argument("--N", type=int, default=42)
    p.add_argument("--dps", type=int, default=150)
    args = p.parse_args()

    mp.mp.dps = args.dps
    points = [mp.expjpi(mp.mpf(2) / k) for k in range(1, args.atoms + 1)]
    weights = [mp.mpf(2) ** -k for k in range(1, args.atoms + 1)]
    dbl = ix.gamma_sequence(MomentOracle(catalog.roots_of_unity_atomic(args.atoms)), args.N, "truncate")
    print(f"double-precision sweep reached order {dbl.order_reached} (breakdown at {dbl.breakdown_order})")
    print(f"{'n':>3} {'gamma_n (mpmath)':>22} {'gamma_n (double)':>22} {'rel err':>10}")
    for n in range(args.N + 1):
        e = exact_gamma(points, weights, n)
        if n <= dbl.order_reached:
            d = dbl.values[n]
            print(f"{n:3d} {mp.nstr(e, 12):>22} {d:22.12g} {float(abs(d - e) / abs(e)):10.2e}")
        else:
            print(f"{n:3d} {mp.nstr(e, 12):>22} {'-':>22}")


if __name__ == "__main__":
    main()
