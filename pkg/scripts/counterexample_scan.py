#!/usr/bin/env python3
"""Scan the exponential-model parameter lattice for the supersolution check.

For each (beta, m, alpha) the bounded function 1 - exp(-r^2) must satisfy
the supersolution inequality with coefficient a = 2^(3-beta-m-alpha); the
worst signed residual over the radius grid is recorded (<= 0 everywhere).
"""

import argparse
import csv

import numpy as np

from deadcore.liouville import exp_counterexample_residual


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--betas", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    ap.add_argument("--ms", type=float, nargs="+", default=[0.3, 0.6, 1.0])
    ap.add_argument("--alphas", type=float, nargs="+", default=[-0.9, -0.5, 0.0])
    ap.add_argument("--r-max", type=float, default=5.0)
    ap.add_argument("--points", type=int, default=300)
    ap.add_argument("--out", default="counterexample_scan.csv")
    args = ap.parse_args()

    radii = np.linspace(0.0, args.r_max, args.points)
    rows = []
    for beta in args.betas:
        for m in args.ms:
            for alpha in args.alphas:
                worst = exp_counterexample_residual(beta, m, alpha, 1.0, 1.0, radii)
                rows.append((beta, m, alpha, 2.0 ** (3 - beta - m - alpha), worst))
                status = "ok" if worst <= 0.0 else "VIOLATED"
                print(f"beta={beta:4.1f} m={m:4.1f} alpha={alpha:5.2f}  "
                      f"worst residual = {worst:+.3e}  {status}")

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["beta", "m", "alpha", "a", "max_signed_residual"])
        writer.writerows(rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
