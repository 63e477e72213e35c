#!/usr/bin/env python3
"""Sweep the absorption strength and datum: closed-form vs shot thickness.

Writes a CSV with one row per (lambda, d) pair and prints a short table.
"""

import argparse
import csv

from deadcore.balance import thickness
from deadcore.model import ModelSpec
from deadcore.radial import shoot_bvp


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=0.0)
    ap.add_argument("--gamma", type=float, default=0.0)
    ap.add_argument("--alpha", type=float, default=0.0)
    ap.add_argument("--lams", type=float, nargs="+", default=[0.5, 1.0, 2.0, 4.0])
    ap.add_argument("--data", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0])
    ap.add_argument("--out", default="thickness_sweep.csv")
    args = ap.parse_args()

    rows = []
    for lam in args.lams:
        for d in args.data:
            spec = ModelSpec(beta=args.beta, gamma=args.gamma, alpha=args.alpha, lam=lam, d=d)
            T_closed = thickness(spec)
            T_shot, _ = shoot_bvp(spec, d, (0.5 * T_closed, 1.5 * T_closed))
            rows.append((lam, d, T_closed, T_shot, abs(T_shot - T_closed) / T_closed))
            print(f"lambda={lam:6.3f} d={d:6.3f}  T={T_closed:.8f}  shot={T_shot:.8f}  "
                  f"rel={rows[-1][-1]:.2e}")

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "d", "T_closed", "T_shot", "rel_error"])
        writer.writerows(rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
