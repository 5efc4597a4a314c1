"""Contour-resolution accuracy landscape for the transform inversion.

Sweeps horizons and node counts against the tightly truncated series to
show the double-precision behaviour that shaped the inversion defaults:
accuracy improves with nodes only up to the mid-40s (the contour factor
e^(2M/5) then amplifies rounding), and the worst horizon window is where
the narrowing contour passes the transform's first complex pole pair.

    python scripts/talbot_accuracy.py --nodes 24 32 48 64 96
"""

import argparse

import numpy as np

from restock.laplace import _talbot
from restock.valuation import LinearCost, ModelParams, series_value


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--r", type=float, default=0.02)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--t-min", type=float, default=2.0, dest="t_min")
    p.add_argument("--t-max", type=float, default=200.0, dest="t_max")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--nodes", type=int, nargs="+", default=[24, 32, 48, 64, 96])
    args = p.parse_args()

    params = ModelParams(k=args.k, mu=args.mu, r=args.r, cost=LinearCost(a=args.a, b=args.b))
    times = np.linspace(args.t_min, args.t_max, args.points)
    truth = {float(t): series_value(params, float(t), 1e-12) for t in times}

    print(f"{'nodes':>6} {'worst_abs_err':>14} {'at_t':>8} {'median_abs_err':>15}")
    for m in args.nodes:
        errs = np.array([abs(_talbot(params, float(t), m) - truth[float(t)]) for t in times])
        print(f"{m:6d} {errs.max():14.3e} {times[errs.argmax()]:8.1f} {np.median(errs):15.3e}")


if __name__ == "__main__":
    main()
