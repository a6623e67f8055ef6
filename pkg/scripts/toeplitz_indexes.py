"""Index sequences of the Toeplitz matrix with symbol (1 - a^2) / (1 + 2a cos t + a^2).

Prints lambda_n, gamma_n, alpha_n at a few orders next to their limits
min w = (1 - a) / (1 + a) and exp(mean log w) = 1 - a^2.
"""
import argparse

import numpy as np

from momidx import catalog
from momidx import indexes as ix
from momidx import measures as ms


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--N", type=int, default=256)
    args = p.parse_args()

    o = catalog.geometric_toeplitz(args.a)
    lam = ix.lambda_sequence(o, args.N).values
    sw = ix.factor_sweep(o, args.N)
    gam = ix.gamma_sequence(o, args.N, sweep=sw).values
    alp = ix.alpha_sequence(o, args.N, sweep=sw).values

    print(f"{'n':>5} {'lambda_n':>14} {'gamma_n':>14} {'alpha_n':>14}")
    for n in sorted({1, 2, 4, 8, 16, 32, 64, 128, args.N} & set(range(args.N + 1))):
        print(f"{n:5d} {lam[n]:14.10f} {gam[n]:14.10f} {alp[n]:14.10f}")
    a = abs(args.a)
    print(f"min w           = {(1 - a) / (1 + a):.10f}")
    print(f"exp(mean log w) = {ix.szego_integral(ms.geometric(args.a)):.10f}")
    print(f"lambda non-increasing: {bool(np.all(np.diff(lam) <= 0))}")


if __name__ == "__main__":
    main()
