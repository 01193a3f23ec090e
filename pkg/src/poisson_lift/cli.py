"""Command-line entry point: ``poisson-lift <verb> ...``.

Exit codes: 0 when every requested check behaves as intended (negative
controls must fail), 1 when some check does not, 2 on errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .examples import ExampleError, bundled_examples, load_example
from .report import SCHEMA_VERSION, SuiteReport
from .suites import SUITES, SuiteConfig, coverage_manifest, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _parse_tol(items: list[str]) -> dict[str, float]:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"--tol expects KEY=VALUE, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise argparse.ArgumentTypeError(f"--tol value for {key!r} is not a number") from None
    return out


def _exit_code(report: SuiteReport) -> int:
    if report.error is not None:
        return EXIT_ERROR
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    try:
        tol = _parse_tol(args.tol)
        cfg = SuiteConfig(args.example, args.suite, args.samples, args.seed, tol, args.fd_step, args.out,
                          args.timing)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = run_suite(cfg)
    if args.markdown:
        Path(args.markdown).write_text(report.to_markdown())
    if args.json:
        print(report.to_json())
    else:
        print(report.to_markdown(), end="")
    return _exit_code(report)


def cmd_list_examples(args) -> int:
    for name in bundled_examples():
        try:
            ex = load_example(name)
        except ExampleError as exc:
            print(f"{name:20s} BROKEN: {exc}")
            continue
        flags = [f"groupoid={ex.groupoid_kind or '-'}", f"complete={str(ex.complete).lower()}",
                 f"factorizer={ex.dm.factorizer}"]
        if ex.subgroup is not None:
            flags.append("subgroup")
        print(f"{name:20s} {' '.join(flags)}\n    {ex.description}")
    return EXIT_PASS


def cmd_list_checks(args) -> int:
    rows = coverage_manifest(load_example(n) for n in bundled_examples())
    if args.json:
        print(json.dumps(rows, indent=2))
        return EXIT_PASS
    for suite in SUITES:
        print(f"[{suite}]")
        for r in rows:
            if r["suite"] != suite:
                continue
            tol = r["tolerance"] if isinstance(r["tolerance"], str) else f"{r['tolerance']:.0e}"
            ctl = " (negative control)" if r["expect_fail"] else ""
            print(f"  {r['check']:42s} tol {tol:9s} {r['what']}{ctl}")
            print(f"  {'':42s} on: {', '.join(r['examples']) or 'none'}")
    return EXIT_PASS


def cmd_report_merge(args) -> int:
    reports = []
    for p in args.reports:
        try:
            reports.append(SuiteReport.from_dict(json.loads(Path(p).read_text())))
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: cannot read report {p}: {exc}", file=sys.stderr)
            return EXIT_ERROR
    merged = {
        "schema_version": SCHEMA_VERSION,
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    text = json.dumps(merged, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    if any(r.error for r in reports):
        return EXIT_ERROR
    return EXIT_PASS if merged["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="poisson-lift", description="Residual checks for lifted Poisson actions.")
    sub = p.add_subparsers(dest="verb", required=True)

    v = sub.add_parser("verify", help="run a suite on an example")
    v.add_argument("suite", choices=["all", *SUITES])
    v.add_argument("--example", required=True, help="bundled example name or path to a TOML file")
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE",
                   help="override a tolerance; KEY is a suite, a check or suite/check")
    v.add_argument("--fd-step", type=float, default=1e-5)
    v.add_argument("--out", help="write the JSON report here")
    v.add_argument("--markdown", help="write the Markdown report here")
    v.add_argument("--json", action="store_true", help="print JSON instead of Markdown")
    v.add_argument("--timing", action="store_true", help="record wall times (reports stop being reproducible)")
    v.set_defaults(func=cmd_verify)

    le = sub.add_parser("list-examples", help="list bundled examples")
    le.set_defaults(func=cmd_list_examples)

    lc = sub.add_parser("list-checks", help="print the coverage manifest")
    lc.add_argument("--json", action="store_true")
    lc.set_defaults(func=cmd_list_checks)

    rm = sub.add_parser("report-merge", help="combine JSON reports")
    rm.add_argument("reports", nargs="+")
    rm.add_argument("--out")
    rm.set_defaults(func=cmd_report_merge)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ExampleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
