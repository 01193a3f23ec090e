"""Convergence order of RK4 path reconstruction on every bundled example with a non-abelian dual group.

Usage: python3 scripts/convergence_study.py [--grid 250 500 1000 2000]
"""
import argparse

from poisson_lift.examples import bundled_examples, load_example
from poisson_lift.paths import convergence_slope, reconstruction_errors
from poisson_lift.suites import CONVERGENCE_GRID, _oracle_vectors


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, nargs="+", default=list(CONVERGENCE_GRID))
    args = ap.parse_args()
    for name in bundled_examples():
        ex = load_example(name)
        model = ex.dm.gstar_model
        if not ex.bialgebra.dual.c.any():
            print(f"{name}: abelian dual group, reconstruction is exact")
            continue
        a, b = _oracle_vectors(model.dim)
        errs = reconstruction_errors(model, a, b, args.grid)
        print(f"{name}: slope {convergence_slope(args.grid, errs):.3f}")
        for n, e in zip(args.grid, errs):
            print(f"  N = {n:6d}  endpoint error {e:.3e}")


if __name__ == "__main__":
    main()
