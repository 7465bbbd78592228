"""Command-line entry point: ``symspace --suite <name> [options]`` or ``symspace verify <name>``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from . import __version__
from .suites import SUITES, FnSpecError, Options, parse_fn_spec, run_suite

SUITE_NAMES = list(SUITES) + ["all"]


def _pow2(text: str) -> int:
    n = int(text)
    if n < 2 or n & (n - 1):
        raise argparse.ArgumentTypeError(f"{n} is not a power of two")
    return n


def _fn_spec(text: str) -> str:
    try:
        parse_fn_spec(text)
    except FnSpecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="symspace",
        description="Numerical checks of rearrangement-invariant norm inequalities.",
    )
    p.add_argument("verb", nargs="?", choices=["verify"], help="optional verb; 'verify NAME' equals '--suite NAME'")
    p.add_argument("name", nargs="?", choices=SUITE_NAMES, metavar="SUITE", help="suite name after 'verify'")
    p.add_argument("--suite", choices=SUITE_NAMES, help="suite to run")
    p.add_argument("--d", type=int, choices=[1, 2], help="dimension for field suites")
    p.add_argument("--n", type=_pow2, help="samples per axis")
    p.add_argument("--L", type=float, help="half width of the box")
    p.add_argument("--trials", type=int, help="number of random cases")
    p.add_argument("--seed", type=int, default=0, help="seed for numpy.random.default_rng (default 0)")
    p.add_argument("--fn", type=_fn_spec, help="function spec, e.g. indicator:0,0.5 or power:-0.25,400")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--csv", help="write a CSV table here")
    p.add_argument("--tol", type=float, help="comparison tolerance (suite default otherwise)")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def make_report(suite: str, opts: Options, cases, wall_time: float) -> dict:
    params = {k: v for k, v in vars(opts).items() if v is not None and k != "seed"}
    counts = {s: sum(c.status == s for c in cases) for s in ("pass", "fail", "inconclusive")}
    return {
        "schema": 1,
        "suite": suite,
        "seed": opts.seed,
        "version": __version__,
        "parameters": params,
        "summary": counts,
        "cases": [c.as_dict() for c in cases],
        "wall_time": wall_time,
    }


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb == "verify":
        if args.name is None:
            parser.error("verify needs a suite name")
        suite = args.name
    elif args.name is not None:
        parser.error(f"unexpected argument {args.name!r}")
    else:
        suite = args.suite
    if suite is None:
        parser.error("choose a suite with --suite or 'verify NAME'")
    if args.suite and args.verb and args.suite != suite:
        parser.error("conflicting suite names")
    opts = Options(d=args.d, n=args.n, L=args.L, trials=args.trials, seed=args.seed, fn=args.fn, tol=args.tol)

    start = time.perf_counter()
    try:
        out = run_suite(suite, opts)
    except (ValueError, RuntimeError) as exc:
        print(f"symspace: {suite}: {exc}", file=sys.stderr)
        return 2
    report = make_report(suite, opts, out.cases, time.perf_counter() - start)

    for c in out.cases:
        print(f"{c.status:<12} {c.name:<40} lhs={c.lhs:.6g} rhs={c.rhs:.6g} margin={c.margin:.3g}")
    s = report["summary"]
    print(f"{suite}: {s['pass']} pass, {s['fail']} fail, {s['inconclusive']} inconclusive "
          f"in {report['wall_time']:.2f}s")

    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            if out.csv_header:
                w.writerow(out.csv_header)
                w.writerows(out.csv_rows)
            else:
                w.writerow(["case", "lhs", "rhs", "margin", "status"])
                w.writerows([[c.name, c.lhs, c.rhs, c.margin, c.status] for c in out.cases])
    return 0 if s["fail"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
