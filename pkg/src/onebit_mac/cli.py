"""Command-line front end.

Exit codes: 0 success, 1 runtime error, 2 result not certified by the KKT
check, 64 bad usage, 65 malformed input file.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from .dist import DistributionFormatError, PowerBudget, load_distribution, second_moment
from .info import ChannelParams, ProductInput, i_lambda, rate_tuple
from .scalar_core import DomainError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNCERTIFIED = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65

log = logging.getLogger("onebit_mac")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(lo=None, hi=None, lo_open=False, kind=float):
    def parse(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a valid {kind.__name__}: {text!r}")
        if kind is float and not math.isfinite(v):
            raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
        if lo is not None and (v <= lo if lo_open else v < lo):
            raise argparse.ArgumentTypeError(f"must be {'>' if lo_open else '>='} {lo}: {text!r}")
        if hi is not None and v > hi:
            raise argparse.ArgumentTypeError(f"must be <= {hi}: {text!r}")
        return v

    return parse


def _lambda_list(text):
    parse = _num(0.0, lo_open=True)
    parts = [t for t in text.split(",") if t.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("empty lambda list")
    return [parse(t.strip()) for t in parts]


def _round(obj, digits=12):
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}") if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, digits) for v in obj]
    return obj


def _dumps(obj):
    return json.dumps(_round(obj), indent=2) + "\n"


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _solver_config(args):
    from .solver import SolverConfig

    return SolverConfig(rng_seed=args.seed, multistarts=args.multistarts, workers=args.workers)


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _add_common(p, budget=True):
    if budget:
        p.add_argument("--p1", type=_num(0.0), required=True, help="power budget of user 1")
        p.add_argument("--p2", type=_num(0.0), required=True, help="power budget of user 2")
    p.add_argument("--threshold", type=_num(), default=0.0, help="quantizer threshold (default 0)")


def _add_solver(p):
    p.add_argument("--seed", type=_num(0, kind=int), default=0, help="multistart seed (default 0)")
    p.add_argument("--multistarts", type=_num(1, kind=int), default=16, help="number of starts (default 16)")
    p.add_argument("--workers", type=_num(1, kind=int), default=os.cpu_count() or 1,
                   help="worker processes (default: available CPUs)")


def build_parser():
    parser = _Parser(prog="onebit-mac", description="Capacity region of the two-user Gaussian MAC with a one-bit receiver.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="maximize R1 + lambda R2 over product inputs")
    p.add_argument("--lambda", dest="lam", type=_num(0.0, lo_open=True), required=True)
    _add_common(p)
    _add_solver(p)
    p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("trace", help="trace the region boundary over a lambda list")
    p.add_argument("--lambdas", type=_lambda_list, required=True, help="comma-separated positive values")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--grid-n", type=_num(2, kind=int), default=17, help="power levels per axis (default 17)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("verify", help="check the KKT conditions for inputs read from files")
    p.add_argument("--f1", required=True, help="JSON distribution of user 1")
    p.add_argument("--f2", required=True, help="JSON distribution of user 2")
    p.add_argument("--lambda", dest="lam", type=_num(0.0, lo_open=True), required=True)
    _add_common(p)
    p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("remark2", help="ternary product inputs against on/off time sharing")
    p.add_argument("--grid-n", type=_num(2, kind=int), default=101, help="points per parameter axis (default 101)")
    _add_common(p, budget=False)
    p.add_argument("--out", help="output directory for remark2.json and a CDF figure")

    p = sub.add_parser("selftest", help="run the invariant checks")
    p.add_argument("--seed", type=_num(0, kind=int), default=0)
    p.add_argument("--inject-fault", default=None, help=argparse.SUPPRESS)
    return parser


def cmd_solve(args):
    from .solver import alternate_maximize

    budget = PowerBudget(args.p1, args.p2)
    res = alternate_maximize(args.lam, budget, ChannelParams(args.threshold), _solver_config(args))
    _emit(_dumps(res.as_dict()), args.out)
    return EXIT_OK if res.kkt.passed else EXIT_UNCERTIFIED


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "r1", "r2", "corner", "atoms", "kkt_passed"])
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def cmd_trace(args):
    from .plotting import plot_region
    from .region import boundary_rows, trace_boundary, upper_boundary

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        log.error("cannot write to %s: %s", out, exc)
        return EXIT_ERROR
    budget = PowerBudget(args.p1, args.p2)
    # parallelism goes to the power-grid cells; each cell runs its starts serially
    cfg = replace(_solver_config(args), workers=1)
    points = trace_boundary(args.lambdas, budget, ChannelParams(args.threshold), cfg, args.grid_n, args.workers)
    _write_csv(out / "region.csv", boundary_rows(points))
    (out / "points.json").write_text(_dumps({
        "budget": {"p1": budget.p1, "p2": budget.p2},
        "threshold": args.threshold,
        "grid_n": args.grid_n,
        "points": [pt.as_dict() for pt in points],
    }))
    with open(out / "boundary.dat", "w") as fh:
        fh.write("# r1 r2\n")
        for r1, r2 in upper_boundary(points):
            fh.write(f"{r1:.12g} {r2:.12g}\n")
    plot_region(points, out / "region.png", budget)
    for pt in points:
        print(f"lambda={pt.lam:.6g} r1={pt.corner[0]:.12g} r2={pt.corner[1]:.12g} "
              f"atoms={len(pt.solution.atoms)} kkt={'pass' if pt.kkt_passed else 'FAIL'}")
    return EXIT_OK if all(pt.kkt_passed for pt in points) else EXIT_UNCERTIFIED


def cmd_verify(args):
    from .solver import SolveResult, SolverConfig, verify_kkt

    try:
        f1, f2 = load_distribution(args.f1), load_distribution(args.f2)
    except DistributionFormatError as exc:
        print(f"onebit-mac: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    except OSError as exc:
        print(f"onebit-mac: {exc}", file=sys.stderr)
        return EXIT_ERROR
    budget = PowerBudget(args.p1, args.p2)
    ch = ChannelParams(args.threshold)
    inp = ProductInput(f1, f2)
    feasible = second_moment(f1) <= budget.p1 * (1 + 1e-9) + 1e-12 and second_moment(f2) <= budget.p2 * (1 + 1e-9) + 1e-12
    res = SolveResult(input=inp, lam=args.lam, value=i_lambda(inp, args.lam, ch), rates=rate_tuple(inp, ch),
                      kkt=None, converged=True, budget=budget)
    report = verify_kkt(res, SolverConfig(), ch)
    passed = report.passed and feasible
    _emit(_dumps({"value": res.value, "power_feasible": feasible, "passed": passed, "kkt": report.as_dict()}), args.out)
    return EXIT_OK if passed else EXIT_UNCERTIFIED


def cmd_remark2(args):
    from .region import remark2_scan

    report = remark2_scan(args.grid_n, ChannelParams(args.threshold))
    text = _dumps(report)
    sys.stdout.write(text)
    if args.out:
        from .plotting import plot_remark2

        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "remark2.json").write_text(text)
            plot_remark2(report, out / "remark2_cdf.png")
        except OSError as exc:
            log.error("cannot write to %s: %s", out, exc)
            return EXIT_ERROR
    return EXIT_OK


def cmd_selftest(args):
    from .selftest import run_selftest

    try:
        results = run_selftest(inject=args.inject_fault, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name:12s} margin={r.margin:.6g}  {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


COMMANDS = {"solve": cmd_solve, "trace": cmd_trace, "verify": cmd_verify, "remark2": cmd_remark2, "selftest": cmd_selftest}


def _setup_logging():
    level = os.environ.get("ONEBIT_MAC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"onebit-mac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"onebit-mac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - report and map to the error exit code
        log.debug("unhandled error", exc_info=True)
        print(f"onebit-mac: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
