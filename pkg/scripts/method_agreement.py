"""Cross-method agreement experiment.

Evaluates the convolution series, the renewal-equation solver, the
contour inversion, and (optionally) Monte Carlo on one horizon grid and
prints the worst pairwise gaps.  Defaults reproduce the flagship 10-unit
example.

    python scripts/method_agreement.py
    python scripts/method_agreement.py --k 4 --mu 0.8 --r 0.05 --theta 2 --with-mc
"""

import argparse
import math

from restock.laplace import invert
from restock.montecarlo import simulate_wk
from restock.valuation import FixedCost, LinearCost, ModelParams, perpetual_value, series_value
from restock.volterra import GridSpec, solve_renewal


def build_args():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--r", type=float, default=0.02)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=500.0, dest="t_max")
    p.add_argument("--step", type=float, default=50.0)
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--with-mc", action="store_true", dest="with_mc")
    p.add_argument("--paths", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=1)
    return p.parse_args()


def main():
    args = build_args()
    cost = FixedCost(args.theta) if args.theta is not None else LinearCost(a=args.a, b=args.b)
    params = ModelParams(k=args.k, mu=args.mu, r=args.r, cost=cost)
    times = [i * args.step for i in range(1, int(round(args.t_max / args.step)) + 1)]

    curve = solve_renewal(params, GridSpec(t_max=times[-1], h=args.h))
    header = f"{'t':>8} {'series':>14} {'volterra':>14} {'laplace':>14}"
    if args.with_mc:
        header += f" {'mc':>14} {'mc_z':>6}"
    print(header)

    worst = 0.0
    for t in times:
        s = series_value(params, t, 1e-9)
        w = float(curve.values[round(t / args.h)])
        l = invert(params, t)
        worst = max(worst, abs(s - w), abs(s - l), abs(w - l))
        line = f"{t:8.1f} {s:14.8f} {w:14.8f} {l:14.8f}"
        if args.with_mc:
            est = simulate_wk(params, t, args.paths, args.seed)
            z = (est.mean - s) / est.stderr if est.stderr else math.inf
            line += f" {est.mean:14.8f} {z:+6.2f}"
        print(line)
    print(f"\nperpetual value: {perpetual_value(params):.8f}")
    print(f"worst analytic pairwise gap: {worst:.3e}")


if __name__ == "__main__":
    main()
