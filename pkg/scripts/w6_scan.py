"""Scan the g_t family on SU(3)/T^2 and optionally optimize the diagonal family."""
import argparse

import numpy as np

from curvlab.homspace import flag_w6, gt_metric, tangent_curvature_fn, w6_diagonal_metric
from curvlab.optimize import Budget, min_sectional, optimize_family


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tmin", type=float, default=0.1)
    ap.add_argument("--tmax", type=float, default=1.3)
    ap.add_argument("--steps", type=int, default=13)
    ap.add_argument("--samples", type=int, default=8192)
    ap.add_argument("--diagonal", action="store_true", help="also optimize the 3-parameter diagonal family (slow)")
    args = ap.parse_args()
    spec = flag_w6()
    budget = Budget(args.samples, 8, 200)
    print(f"{'t':>6} {'min':>10} {'max':>10} {'pinching':>10}")
    for t in np.linspace(args.tmin, args.tmax, args.steps):
        ext = min_sectional(tangent_curvature_fn(gt_metric(spec, t), spec), 6, budget)
        print(f"{t:6.3f} {ext.min_value:10.5f} {ext.max_value:10.5f} {ext.pinching:10.5f}")
    if args.diagonal:
        family = lambda x: tangent_curvature_fn(w6_diagonal_metric(spec, x), spec)  # noqa: E731
        g = np.array([0.25, 0.5, 0.75, 1.0])
        params, delta = optimize_family(family, lambda fn: min_sectional(fn, 6, budget).pinching, [g, g, g])
        print(f"diagonal optimum {tuple(round(p, 4) for p in params)} pinching {delta:.5f} (1/64 = {1 / 64:.5f})")


if __name__ == "__main__":
    main()
