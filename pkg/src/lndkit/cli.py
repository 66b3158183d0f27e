"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when an expectation fails or a
certificate is refused, 2 for unreadable input.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .automorphisms import CONVENTION
from .certify import build_model_pair, certify_non_algebraic, certify_not_locally_finite, kernel_lift
from .derivations import Derivation
from .errors import LndkitError, ScenarioError
from .parse import parse_poly
from .poly import MultiPoly, format_poly
from .scenario import exit_code, load_scenario, report_json, report_text, run, to_jsonable


def _scenario_bytes(name: str) -> bytes:
    path = Path(name)
    if path.is_file():
        return path.read_bytes()
    bundled = resources.files("lndkit") / "scenarios" / name
    if not name.endswith(".json"):
        bundled = resources.files("lndkit") / "scenarios" / f"{name}.json"
    if bundled.is_file():
        return bundled.read_bytes()
    raise ScenarioError(f"no such scenario: {name}")


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _cmd_run(args) -> int:
    try:
        scenario, resolved = load_scenario(_scenario_bytes(args.scenario))
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run(scenario, resolved, jobs=args.jobs, timings=args.timings)
    if args.format == "json":
        _emit(report_json(report), args.out)
        if args.out is not None:
            sys.stdout.write(report_text(report))
    else:
        _emit(report_text(report), args.out)
    return exit_code(report)


def _cmd_certify(args) -> int:
    try:
        pair = build_model_pair(args.d)
        seed = MultiPoly.variable(2, 1) + MultiPoly.variable(2, 2)
        ladder = certify_not_locally_finite(pair.derivation, seed, args.K)
        probe = certify_non_algebraic(args.d, args.budget, args.cap)
    except LndkitError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    sections = [ladder, probe]
    report = {
        "version": __version__,
        "convention": CONVENTION,
        "model_pair": {"derivation": pair.derivation, "checks": pair.checks},
        "sections": sections,
        "status": "ALL_VERIFIED" if pair.valid and all(s.verified for s in sections) else "FAILURES",
    }
    print(json.dumps(to_jsonable(report), indent=2, ensure_ascii=False))
    return 0 if report["status"] == "ALL_VERIFIED" else 1


def _cmd_lift(args) -> int:
    try:
        delta = Derivation.parse(args.derivation)
        g0 = parse_poly(args.g0, delta.nvars)
        g = kernel_lift(delta, g0, args.cap)
    except LndkitError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    print(format_poly(g))
    return 0


def _cmd_check(args) -> int:
    try:
        nvars = args.nvars
        if nvars is None:
            nvars = max((int(k) for k in re.findall(r"x(\d+)", args.poly)), default=1)
        p = parse_poly(args.poly, max(nvars, 1))
    except LndkitError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    print(format_poly(p))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lndkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lndkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file (or a bundled scenario by name)")
    p.add_argument("scenario")
    p.add_argument("--out", help="write the JSON report here; a text summary goes to standard output")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--timings", action="store_true", help="record per-task microseconds")
    p.add_argument("--jobs", type=int, default=1, help="tasks to run concurrently")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("certify", help="certify the model pair x2^d d/dx1 + x1^d d/dx2")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--cap", type=int, required=True)
    p.add_argument("--K", type=int, default=8, help="ladder length")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("lift", help="lift g0 into the kernel of a derivation")
    p.add_argument("--derivation", required=True)
    p.add_argument("--g0", required=True)
    p.add_argument("--cap", type=int, required=True)
    p.set_defaults(func=_cmd_lift)

    p = sub.add_parser("check", help="parse a polynomial and print it canonically")
    p.add_argument("--poly", required=True)
    p.add_argument("--nvars", type=int)
    p.set_defaults(func=_cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
