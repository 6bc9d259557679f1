"""Pinching of the normal homogeneous metric on SO(5)/SO(3)."""
import argparse

from curvlab.homspace import berger_b7, tangent_curvature_fn
from curvlab.metric import LeftInvariantMetric
from curvlab.optimize import DEFAULT_BUDGET, Budget, min_sectional


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=DEFAULT_BUDGET.samples)
    ap.add_argument("--restarts", type=int, default=DEFAULT_BUDGET.restarts)
    args = ap.parse_args()
    spec = berger_b7()
    fn = tangent_curvature_fn(LeftInvariantMetric.biinvariant(spec.G), spec)
    ext = min_sectional(fn, spec.tangent_dim, Budget(args.samples, args.restarts, DEFAULT_BUDGET.iterations), args.seed)
    print(f"min {ext.min_value:.6f}  max {ext.max_value:.6f}  pinching {ext.pinching:.6f}  (1/37 = {1 / 37:.6f})")


if __name__ == "__main__":
    main()
