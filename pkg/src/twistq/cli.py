"""Command line: ``twistq check <scenario> [--suite ...] [--format ...] [--seed k]``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .faults import FAULTS
from .report import FORMATS, emit_report
from .scenario import ScenarioError, load_scenario, shipped
from .suite import SUITES, run_checks

ENV_SUITES = "TWISTQ_SUITES"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _split(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def _resolve(path: str) -> Path:
    p = Path(path)
    if not p.exists() and "/" not in path and shipped(p.stem).exists():
        return shipped(p.stem)
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="twistq", description="Exact checks of twist deformation identities.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    chk = sub.add_parser("check", help="run check suites on a scenario file")
    chk.add_argument("scenario", help="scenario file, or the name of a shipped one (moyal2d, klein)")
    chk.add_argument("--suite", type=_split, default=None,
                     help=f"comma-separated suites or prefixes (default: ${ENV_SUITES} or the scenario's list)")
    chk.add_argument("--format", choices=FORMATS, default="human")
    chk.add_argument("--seed", type=int, default=None, help="seed for sampled probes")
    chk.add_argument("--fault", type=_split, default=[], metavar="NAME,...",
                     help="inject named faults: " + ", ".join(FAULTS))
    chk.add_argument("--progress", action="store_true", help="print suite names to stderr as they run")
    sub.add_parser("suites", help="list suite names")
    sub.add_parser("faults", help="list fault injections")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "suites":
        for name, st in SUITES.items():
            print(name)
        return 0
    if args.command == "faults":
        for name, (target, what) in FAULTS.items():
            print(f"{name:24s} {target:18s} {what}")
        return 0
    suites = args.suite
    env = os.environ.get(ENV_SUITES)
    if suites is None and env:
        suites = _split(env)
    progress = (lambda n: print(f"running {n}", file=sys.stderr)) if args.progress else None
    try:
        sc = load_scenario(_resolve(args.scenario))
        report = run_checks(sc, suites, seed=args.seed, faults=args.fault, progress=progress)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if env:
        report.header[ENV_SUITES] = env
    sys.stdout.write(emit_report(report, args.format))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
