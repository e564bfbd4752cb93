"""Command-line entry point: ``cstarmod verify | demo | list``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence, TextIO

from .errors import CStarModError, InvariantError
from .gallery import DEMOS, run_demo
from .module import is_matrix_backend, parse_algebra, parse_module
from .suites import DEFAULT_SEED, DEFAULT_TRIALS, SUITES, SuiteConfig, list_suites, run_suite
from .tolerances import DEFAULT_TOL

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("trials must be at least 1")
    return n


def _seed(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return n


def _tol(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    name = name.strip()
    if name not in DEFAULT_TOL.as_dict():
        raise argparse.ArgumentTypeError(f"unknown tolerance {name!r}; known: {', '.join(DEFAULT_TOL.as_dict())}")
    try:
        v = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value {value!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerances must be positive")
    return name, v


def default_seed() -> int:
    env = os.environ.get("CSTARMOD_SEED")
    if env is None or env == "":
        return DEFAULT_SEED
    try:
        return _seed(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"CSTARMOD_SEED: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cstarmod", description="Verify Hilbert C*-module properties.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("--suite", required=True, choices=sorted(SUITES), metavar="NAME")
    v.add_argument("--algebra", help='descriptor such as "M2+M3", or "random"')
    v.add_argument("--module", help='module spec such as "free(M2+C, rank=3)", or "random"')
    v.add_argument("--trials", type=_positive_int, default=DEFAULT_TRIALS)
    v.add_argument("--seed", type=_seed, default=None, help=f"default {DEFAULT_SEED} or $CSTARMOD_SEED")
    v.add_argument("--tol", type=_tol, action="append", default=[], metavar="NAME=VALUE")
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.add_argument("--out")
    v.add_argument("--timing", action="store_true", help="include wall time in the summary")

    d = sub.add_parser("demo", help="run a gallery demo")
    d.add_argument("demo_id", choices=sorted(DEMOS), metavar="DEMO_ID")
    d.add_argument("--format", choices=("json", "text"), default="text")
    d.add_argument("--out")

    sub.add_parser("list", help="list suites and demos")
    return parser


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def validate_config(config: SuiteConfig) -> SuiteConfig:
    """Parse the algebra and module specs up front so grammar errors are usage errors."""
    try:
        desc = parse_algebra(config.algebra) if config.algebra not in (None, "random") else None
        if desc is not None and not is_matrix_backend(desc):
            raise UsageError("property suites run on finite-dimensional descriptors")
        if config.module not in (None, "random"):
            space = parse_module(config.module)
            if not space.is_matrix:
                raise UsageError("property suites run on finite-dimensional descriptors")
            if desc is not None and space.algebra != desc:
                raise UsageError(f"module {space.spec} is not over {desc}")
    except (CStarModError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return config


def _verify(args, out: TextIO) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    config = validate_config(SuiteConfig(args.suite, args.algebra, args.module, args.trials, seed, dict(args.tol)))

    def emit(event: dict):
        if args.format == "json":
            out.write(_dump(event) + "\n")

    report = run_suite(config, emit, timing=args.timing)
    summary = report.to_json()
    if args.format == "json":
        out.write(_dump(summary) + "\n")
    else:
        out.write(f"suite {report.suite}: {report.passed}/{report.trials} trials passed ({summary['verdict']})\n")
        out.write(f"seed {seed}, algebra {summary['config']['algebra']}, module {summary['config']['module']}\n")
        for name, w in summary["worst_residuals"].items():
            out.write(f"  {name}: worst residual {w['residual']:.3e} (tolerance {w['tolerance']:.1e})\n")
        for ex in report.exemplars:
            out.write(f"  failure at trial {ex['trial']}: {', '.join(c['name'] for c in ex['failures'])}\n")
        if report.wall_time is not None:
            out.write(f"wall time {report.wall_time:.2f} s\n")
    return EXIT_PASS if report.ok else EXIT_FAIL


def _demo(args, out: TextIO) -> int:
    cert = run_demo(args.demo_id)
    if args.format == "json":
        out.write(cert.dumps() + "\n")
    else:
        out.write(f"demo {cert.demo_id} (backend {cert.backend}, exact {str(cert.exact).lower()})\n")
        for c in cert.claims:
            out.write(f"  [{'true' if c.verdict else 'FALSE'}] {c.statement}\n")
    return EXIT_PASS if cert.passed else EXIT_FAIL


def _list(out: TextIO) -> int:
    out.write("suites:\n")
    for line in list_suites().splitlines():
        out.write(f"  {line}\n")
    out.write("demos:\n")
    for name in DEMOS:
        out.write(f"  {name}\n")
    return EXIT_PASS


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    out: TextIO = sys.stdout
    handle = None
    try:
        if getattr(args, "out", None):
            handle = open(args.out, "w", encoding="utf-8")
            out = handle
        if args.command == "verify":
            return _verify(args, out)
        if args.command == "demo":
            return _demo(args, out)
        return _list(out)
    except InvariantError as exc:
        print(f"cstarmod: internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, OSError) as exc:
        print(f"cstarmod: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if handle is not None:
            handle.close()


if __name__ == "__main__":
    sys.exit(main())
