"""Step-size convergence study of the renewal-equation solver.

For the single-unit model the closed form is exact, so halving the step
repeatedly exposes the solver's O(h^2) order directly.

    python scripts/volterra_convergence.py --t-max 500 --h0 0.2 --levels 4
"""

import argparse

import numpy as np

from restock.valuation import FixedCost, ModelParams, exact_k1_value
from restock.volterra import GridSpec, solve_renewal


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--r", type=float, default=0.02)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=500.0, dest="t_max")
    p.add_argument("--h0", type=float, default=0.2, help="coarsest step")
    p.add_argument("--levels", type=int, default=4, help="number of halvings")
    args = p.parse_args()

    params = ModelParams(k=1, mu=args.mu, r=args.r, cost=FixedCost(args.theta))
    print(f"{'h':>10} {'max_abs_err':>14} {'ratio':>8}")
    previous = None
    h = args.h0
    for _ in range(args.levels):
        curve = solve_renewal(params, GridSpec(t_max=args.t_max, h=h))
        exact = np.array([exact_k1_value(params, float(t)) for t in curve.times])
        err = float(np.abs(curve.values - exact).max())
        ratio = f"{previous / err:8.3f}" if previous is not None else "       -"
        print(f"{h:10.5f} {err:14.4e} {ratio}")
        previous = err
        h /= 2.0


if __name__ == "__main__":
    main()
