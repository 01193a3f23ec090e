"""Run every suite on every bundled example and write one merged JSON report.

Usage: python3 scripts/run_all.py [--samples 200] [--seed 0] [--out reports/all.json]
"""
import argparse
import json
from pathlib import Path

from poisson_lift.examples import bundled_examples
from poisson_lift.report import SCHEMA_VERSION
from poisson_lift.suites import SuiteConfig, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="reports/all.json")
    args = ap.parse_args()
    reports = []
    for name in bundled_examples():
        rep = run_suite(SuiteConfig(name, "all", args.samples, args.seed, timing=True))
        reports.append(rep)
        bad = [c.name for c in rep.checks if not c.succeeded]
        skipped = [c.name for c in rep.checks if c.status == "not-computed"]
        print(f"{name:18s} {'PASS' if rep.passed else 'FAIL'}  {len(rep.checks):3d} checks  "
              f"{rep.wall_time:6.1f}s" + (f"  failing: {', '.join(bad)}" if bad else "")
              + (f"  not computed: {', '.join(skipped)}" if skipped else ""))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    merged = {"schema_version": SCHEMA_VERSION, "passed": all(r.passed for r in reports),
              "reports": [r.to_dict() for r in reports]}
    out.write_text(json.dumps(merged, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")
    return 0 if merged["passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
