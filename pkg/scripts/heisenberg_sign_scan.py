"""Residuals of both signs of the Heisenberg bivector on the transformation groupoid.

Usage: python3 scripts/heisenberg_sign_scan.py [--example su2_standard] [--samples 20] [--seed 0]
"""
import argparse

import numpy as np

from poisson_lift.examples import load_example
from poisson_lift.groupoid import heisenberg_sign_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--example", default="su2_standard")
    ap.add_argument("--samples", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    scan = heisenberg_sign_scan(load_example(args.example).dm, np.random.default_rng(args.seed), args.samples)
    print(f"{'sign':>4}  {'source':>10}  {'target':>10}  {'mult':>10}  {'min |det|':>10}  passed")
    for sign in (1, -1):
        e = scan[sign]
        print(f"{sign:>4}  {e['source_poisson']:10.2e}  {e['target_anti_poisson']:10.2e}  "
              f"{e['multiplicativity']:10.2e}  {e['min_abs_det']:10.2e}  {e['passed']}")
    print(f"accepted sign: {scan['accepted']}")


if __name__ == "__main__":
    main()
