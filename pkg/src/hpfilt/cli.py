"""
Command line interface.

    hpfilt filter INPUT {hp,bhp,ohp,sohp} [--lambda L] [--log] [--n N]
                  [--max-iter K] [--out PATH] [--format csv|json]
    hpfilt si INPUT [--lambda L] [--log] [--max-iter K]
    hpfilt bench [--lengths 250,500,1000,2000] [--repeats 10] [--out PATH]

Exit status is 0 on success, 1 for data or runtime errors and 2 for usage
errors.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench as _bench
from . import filters
from . import io as hpio
from .exceptions import HpFilterError

METHODS = ("hp", "bhp", "ohp", "sohp")


class UsageError(Exception):
    pass


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _smoothing(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _lengths(text):
    try:
        out = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}") from None
    if not out or any(n < 3 for n in out):
        raise argparse.ArgumentTypeError("lengths must be integers >= 3")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise argparse.ArgumentTypeError("lengths must be strictly increasing")
    return out


def _add_input_args(p):
    p.add_argument("input", help="CSV file with a header row ('-' for stdin)")
    p.add_argument("--lambda", dest="eta", type=_smoothing,
                   default=filters.MONTHLY_SMOOTHING,
                   help="smoothing parameter (default: %(default)s)")
    p.add_argument("--log", action="store_true",
                   help="take the natural log of the values first")
    p.add_argument("--value-column", default="Close",
                   help="column holding the series (default: %(default)s)")
    p.add_argument("--date-column", default="Date",
                   help="date column, used if present (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hpfilt",
        description="Hodrick-Prescott trend filters (HP, boosted, one-sided, "
                    "successive one-sided).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="decompose a series into trend and cycle")
    _add_input_args(p)
    p.add_argument("method", choices=METHODS)
    p.add_argument("--n", type=_positive_int, default=None,
                   help="boosting rounds (bhp only, required)")
    p.add_argument("--max-iter", type=_positive_int, default=None,
                   help="largest n probed by SI (sohp only, default 20)")
    p.add_argument("--out", default="-",
                   help="output file (default: stdout; the summary then goes "
                        "to stderr)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("si", help="tabulate the SI criterion for SOHP")
    _add_input_args(p)
    p.add_argument("--max-iter", type=_positive_int, default=20)
    p.set_defaults(func=cmd_si)

    p = sub.add_parser("bench", help="time dense direct vs incremental HP")
    p.add_argument("--lengths", type=_lengths,
                   default=list(_bench.DEFAULT_LENGTHS),
                   help="comma-separated series lengths (default: 250,500,1000,2000)")
    p.add_argument("--repeats", type=_positive_int,
                   default=_bench.DEFAULT_REPEATS)
    p.add_argument("--lambda", dest="eta", type=_smoothing,
                   default=filters.MONTHLY_SMOOTHING)
    p.add_argument("--out", default=None, help="write the report here")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_bench)
    return parser


def _load(args):
    source = sys.stdin if args.input == "-" else args.input
    records = hpio.read_csv(source, value_column=args.value_column,
                            date_column=args.date_column)
    if args.log:
        y = hpio.log_transform(records)
    else:
        y = np.array([r.value for r in records])
    dates = [r.date for r in records]
    if all(d is None for d in dates):
        dates = None
    return y, dates


def cmd_filter(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    if args.method == "bhp" and args.n is None:
        raise UsageError("method bhp requires --n")
    if args.method != "bhp" and args.n is not None:
        raise UsageError("--n is only valid with method bhp")
    if args.method != "sohp" and args.max_iter is not None:
        raise UsageError("--max-iter is only valid with method sohp")

    y, dates = _load(args)
    eta = args.eta
    extra = ""
    meta = {"method": args.method, "lambda": eta}
    if args.method == "hp":
        result = filters.hp_direct(y, eta)
    elif args.method == "bhp":
        result = filters.bhp(y, eta, args.n)
        meta["n"] = args.n
        extra = f" n={args.n}"
    elif args.method == "ohp":
        result = filters.Decomposition.from_trend(y, filters.ohp(y, eta))
    else:
        cfg = filters.FilterConfig(smoothing=eta,
                                   max_iterations=args.max_iter or 20)
        result = filters.sohp(y, eta, cfg)
        if result.degenerate:
            extra = " n=1 SI=undefined (degenerate: first-stage cycle is zero)"
        else:
            extra = f" n={result.chosen_n} SI={result.si_values[result.chosen_n - 1]:.4f}"

    if args.out == "-":
        hpio.write_decomposition(result, out, args.format, dates, meta)
        summary_to = err
    else:
        hpio.write_decomposition(result, args.out, args.format, dates, meta)
        summary_to = out
    print(f"l={y.size} method={args.method} lambda={eta:g}{extra}",
          file=summary_to)
    return 0


def cmd_si(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    y, _ = _load(args)
    cfg = filters.FilterConfig(smoothing=args.eta, max_iterations=args.max_iter)
    result = filters.sohp(y, args.eta, cfg)
    print(f"l={y.size} lambda={args.eta:g}", file=out)
    if result.degenerate:
        print("degenerate: first-stage cycle is zero, SI undefined; "
              "stopping at n=1", file=out)
    else:
        print(f"{'n':>3}  {'SI':<22}", file=out)
        for n, v in enumerate(result.si_values, start=1):
            mark = "<- min" if n == result.chosen_n else ""
            print(f"{n:>3}  {v!r:<22}{mark}".rstrip(), file=out)
    m = filters.cycle_moments(result.final_cycle)
    print(f"chosen n={result.chosen_n}", file=out)
    print(f"final cycle mean={m['mean']:.3e} "
          f"variance(population)={m['variance_population']:.3e} "
          f"variance(sample)={m['variance_sample']:.3e}", file=out)
    return 0


def cmd_bench(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    def progress(n, d, i):
        print(f"{n:>7}  {d:12.6f}  {i:12.6f}", file=out)

    print(f"{'length':>7}  {'direct_s':>12}  {'incremental_s':>12}", file=out)
    report = _bench.run_bench(args.lengths, args.repeats, eta=args.eta,
                              progress=progress)
    print(f"log-log slope: direct={report.direct_slope:.3f} "
          f"incremental={report.incremental_slope:.3f}", file=out)
    if args.out:
        report.write(args.out, args.format)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"hpfilt {args.command}: error: {e}", file=sys.stderr)
        return 2
    except (HpFilterError, OSError, ValueError) as e:
        print(f"hpfilt {args.command}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
