"""gamma_{z0,N} over a grid for a bundled measure, written as re,im,value CSV.

Example: python scripts/bpe_heatmap.py ellipse --N 40 --steps 81 --out ellipse_map.csv
"""
import argparse

import numpy as np

from momidx import catalog
from momidx.indexes import bpe_map
from momidx.matrix_source import oracle_for


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("measure", choices=sorted(catalog.BUNDLED))
    p.add_argument("--N", type=int, default=40)
    p.add_argument("--extent", type=float, default=1.5)
    p.add_argument("--steps", type=int, default=61)
    p.add_argument("--out", default="gamma_map.csv")
    args = p.parse_args()

    o = oracle_for(catalog.BUNDLED[args.measure]())
    r = (-args.extent, args.extent)
    gm = bpe_map(o, r, r, args.steps, args.N)
    gm.write_csv(args.out)
    pos = gm.values > 1e-8
    print(f"order reached {gm.order_reached}; {pos.sum()} of {pos.size} points with gamma > 1e-8")
    print(f"max {gm.values.max():.6g} at {gm.re[np.argmax(gm.values) % len(gm.re)]:+.3f}"
          f"{gm.im[np.argmax(gm.values) // len(gm.re)]:+.3f}i; wrote {args.out}")


if __name__ == "__main__":
    main()
