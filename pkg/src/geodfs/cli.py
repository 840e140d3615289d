"""Command-line entry point: ``geodfs verify | eval | simulate | compare``.

Machine-readable output goes to stdout (JSON, or CSV for ``simulate``
without ``--out``); diagnostics go to stderr.  Exit codes: 0 success,
1 failed verdict, 2 usage error, 3 resource limit.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .dfs import GeometricCapError, ModelParams, parse_probability
from .exact import DegreeCapError, PoleError
from .exact.polynomial import as_rational, format_rational
from .recursion import IDENTITIES, Family, build, eval_family, verify
from .stats import (
    JointCounts,
    compare_fb,
    compare_ft,
    compare_quadruples,
    paired_mean_test,
    run_monte_carlo,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

FAMILY_ALIASES = {"G": "StdG", "StdG": "StdG", "HatG": "HatG", "CheckG": "CheckG", "F": "F"}
COMPARE_TESTS = ("mean", "fb", "ft", "quad")


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    if any(ch in text for ch in ".eE"):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r} (use an integer or num/den, not a decimal)")
    try:
        return Fraction(as_rational(text.strip()))
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r} (use an integer or num/den)")


def _probability(text: str) -> Fraction:
    try:
        return parse_probability(_rational(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if not 0 <= value < 1 << 128:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**128)")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _point(text: str) -> dict:
    out = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or name not in ("w", "x", "z"):
            raise argparse.ArgumentTypeError(f"bad point component {part!r}; expected w=..,x=..,z=..")
        out[name] = _rational(value)
    if set(out) != {"w", "x", "z"}:
        raise argparse.ArgumentTypeError("the point must assign w, x and z")
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 already; keep the message on stderr
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="geodfs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="check an identity over an index range")
    v.add_argument("--identity", required=True, choices=IDENTITIES + ("all",))
    v.add_argument("--n-max", required=True, type=_positive)
    v.add_argument("--mode", default="symbolic", choices=("symbolic", "numeric"))
    v.add_argument("--points", type=_positive, default=20)
    v.add_argument("--seed", type=_seed)
    v.add_argument("--bound", type=_positive, default=1000, help="numerator/denominator bound for sampled points")
    v.add_argument("--cap", type=_positive, help="largest n accepted in symbolic mode (default 10)")
    v.add_argument("--timing", action="store_true", help="report elapsed_ms (makes output non-reproducible)")

    e = sub.add_parser("eval", help="evaluate one family member exactly")
    e.add_argument("--family", required=True, choices=sorted(FAMILY_ALIASES))
    e.add_argument("--n", required=True, type=_positive)
    e.add_argument("--k", type=_positive)
    e.add_argument("--at", type=_point, help="w=..,x=..,z=.. with integer or num/den values")
    e.add_argument("--symbolic", action="store_true", help="also print the rational function")

    s = sub.add_parser("simulate", help="Monte Carlo tally of arc classes")
    s.add_argument("--n", required=True, type=_positive)
    s.add_argument("--p", required=True, type=_probability)
    s.add_argument("--samples", required=True, type=_positive)
    s.add_argument("--seed", required=True, type=_seed)
    s.add_argument("--start", type=int, default=0, help="first sample index (for split runs)")
    s.add_argument("--out", dest="out_path", help="CSV path; a .meta.json sidecar is written next to it")
    s.add_argument("--trace", help="write one JSON line per sample to this path")
    s.add_argument("--workers", type=_positive, help="worker processes (default from GEODFS_THREADS)")

    c = sub.add_parser("compare", help="statistical comparisons of simulated batches")
    c.add_argument("--in", dest="in_paths", nargs="+", required=True, help="one or two CSV files with sidecars")
    c.add_argument("--tests", help=f"comma-separated subset of {','.join(COMPARE_TESTS)}")
    c.add_argument("--significance", type=float, default=0.001)
    c.add_argument("--threshold", type=float, default=3.5, help="|z| bound for the paired mean test")
    c.add_argument("--min-cell", type=_positive, default=5)
    return parser


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_verify(args) -> int:
    if args.mode == "numeric" and args.seed is None:
        raise UsageError("numeric verification is randomized and needs an explicit --seed")
    seed = 0 if args.seed is None else args.seed
    names = IDENTITIES if args.identity == "all" else (args.identity,)
    reports = []
    for name in names:
        try:
            reports.append(verify(name, args.n_max, args.mode, args.points, seed, bound=args.bound, cap=args.cap))
        except ValueError as exc:
            raise UsageError(str(exc))
    payload = [r.to_json(timing=args.timing) for r in reports]
    for r in reports:
        print(f"{r.identity}: {r.verdict} ({r.checks} checks, {r.elapsed_ms:.0f} ms)", file=sys.stderr)
    _emit(payload if args.identity == "all" else payload[0])
    failed = [r.identity for r in reports if not r.ok]
    if failed:
        print(f"identity check failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_eval(args) -> int:
    tag = FAMILY_ALIASES[args.family]
    try:
        fam = Family(tag, args.n, args.k)
    except (ValueError, IndexError) as exc:
        raise UsageError(str(exc))
    if args.at is None and not args.symbolic:
        raise UsageError("give --at and/or --symbolic")
    out = {"family": str(fam)}
    if args.symbolic:
        out["function"] = build(fam).to_json()
    if args.at is not None:
        out["point"] = {k: format_rational(v) for k, v in args.at.items()}
        try:
            out["value"] = format_rational(eval_family(fam, args.at))
        except PoleError as exc:
            out["value"] = None
            out["error"] = "pole"
            _emit(out)
            print(f"the point is a pole: {exc}", file=sys.stderr)
            return EXIT_FAIL
    _emit(out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.start < 0:
        raise UsageError("--start must be non-negative")
    params = ModelParams(args.n, args.p)
    trace = open(args.trace, "w") if args.trace else None
    try:
        joint = run_monte_carlo(params, args.samples, args.seed, start=args.start, workers=args.workers, trace=trace)
    finally:
        if trace is not None:
            trace.close()
    if args.out_path:
        meta = joint.write(args.out_path)
        _emit({"csv": args.out_path, "metadata": meta, **joint.metadata()})
    else:
        sys.stdout.write(joint.to_csv())
    return EXIT_OK


def cmd_compare(args) -> int:
    if len(args.in_paths) > 2:
        raise UsageError("compare takes one or two inputs")
    try:
        batches = [JointCounts.read(path) for path in args.in_paths]
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read input: {exc}")
    if args.tests:
        tests = [t.strip() for t in args.tests.split(",") if t.strip()]
    else:
        tests = ["mean"] if len(batches) == 1 else ["mean", "fb", "quad"]
    unknown = [t for t in tests if t not in COMPARE_TESTS]
    if unknown:
        raise UsageError(f"unknown tests {unknown}; choose from {COMPARE_TESTS}")
    if len(batches) < 2 and any(t != "mean" for t in tests):
        raise UsageError("two-sample tests need two independent inputs")
    results = []
    try:
        for t in tests:
            if t == "mean":
                for path, b in zip(args.in_paths, batches):
                    rep = paired_mean_test(b, args.threshold).to_json()
                    rep.update(input=path, expected="accept")
                    results.append(rep)
            elif t == "fb":
                for rep in compare_fb(batches[0], batches[1], args.significance, args.min_cell):
                    results.append({**rep.to_json(), "expected": "accept"})
            elif t == "ft":
                rep = compare_ft(batches[0], batches[1], args.significance, args.min_cell)
                results.append({**rep.to_json(), "expected": "reject"})
            elif t == "quad":
                rep = compare_quadruples(batches[0], batches[1], args.significance, args.min_cell)
                results.append({**rep.to_json(), "expected": "accept"})
    except ValueError as exc:
        raise UsageError(str(exc))
    ok = all(r["decision"] == r["expected"] for r in results)
    _emit({"reports": results, "verdict": "pass" if ok else "fail"})
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "eval": cmd_eval, "simulate": cmd_simulate, "compare": cmd_compare}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"geodfs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegreeCapError, MemoryError, GeometricCapError) as exc:
        print(f"geodfs: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
