"""Command-line interface.

    tailrisk [--seed S] [--format csv|json] [--threads N] COMMAND ...

Commands: ``ingest``, ``estimate``, ``simulate``, ``coverage``, ``plot``.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .core import DataError, Level, NumericalError, Series, TailRiskError
from .coverage import run_coverage
from .inference import BlockScheme
from .ingest import IngestConfig, ingest
from .mes import BivariateSeries
from .pipeline import METHODS, MES_METHODS, EstimateRow, Estimator
from .simulate import BIVARIATE, ModelSpec, alpha_for_tau_prime, simulate, true_expectile, true_qmes

log = logging.getLogger("tailrisk")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_k_grid(text: str) -> list[int]:
    """``"200"``, ``"50,100,150"`` or ``"start:stop:step"`` (stop inclusive)."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            start, stop, step = parts
            if step < 1 or stop < start:
                raise ValueError
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"bad k grid {text!r}") from None


def _column(text: str | None):
    if text is None:
        return None
    return int(text) if text.isdigit() else text


def _blocks(text: str, n: int) -> BlockScheme | None:
    if text == "auto":
        return None
    try:
        r, l = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--blocks expects 'auto' or 'r,l', got {text!r}") from None
    return BlockScheme.for_length(n, r, l)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def write_table(rows: Sequence[dict], fields: Sequence[str], fmt: str, out: str | None) -> None:
    if fmt == "json":
        text = json.dumps([{f: r.get(f) for f in fields} for r in rows], indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([_fmt(r.get(f)) for f in fields])
        text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load(args) -> Series | BivariateSeries:
    cfg = IngestConfig(
        path=args.data,
        column=_column(args.column),
        transform=args.transform,
        delimiter=args.delimiter,
        y_column=_column(args.y_column),
    )
    res = ingest(cfg)
    if res.dropped:
        print(f"dropped {res.dropped} row(s) with missing values", file=sys.stderr)
    return res.data


# -- commands --------------------------------------------------------------------


def cmd_ingest(args) -> int:
    data = _load(args)
    if isinstance(data, BivariateSeries):
        rows = [{"x": float(a), "y": float(b)} for a, b in zip(data.x.values, data.y.values)]
        fields = ["x", "y"]
    else:
        rows = [{"value": float(v)} for v in data.values]
        fields = ["value"]
    write_table(rows, fields, args.format, args.out)
    return EXIT_OK


def estimate_rows(data, args) -> list[EstimateRow]:
    if args.method in MES_METHODS and not isinstance(data, BivariateSeries):
        raise UsageError(f"--method {args.method} needs --y-column")
    if args.method not in MES_METHODS and isinstance(data, BivariateSeries):
        raise UsageError(f"--method {args.method} takes a single column; drop --y-column")
    if args.tau_prime is not None and args.method not in ("laws", "qb"):
        raise UsageError("--tau-prime applies to --method laws|qb only")
    ks = parse_k_grid(args.k_grid) if args.k_grid else [args.k]
    ci = None if args.ci == "none" else args.ci.replace("-", "_")
    est = Estimator(
        data,
        args.method,
        alpha=None if args.alpha is None else Level.extreme(args.alpha),
        tau_prime=None if args.tau_prime is None else Level.extreme(args.tau_prime),
        ci=ci,
        level=args.level,
        blocks=_blocks(args.blocks, data.n),
    )
    rows = []
    for k in ks:
        try:
            rows.append(est.row(k))
        except TailRiskError as exc:
            exc.args = (f"k={k}: {exc}",)
            raise
    return rows


def cmd_estimate(args) -> int:
    if args.k is None and not args.k_grid:
        raise UsageError("one of --k or --k-grid is required")
    data = _load(args)
    rows = [r.as_dict() for r in estimate_rows(data, args)]
    write_table(rows, EstimateRow.FIELDS, args.format, args.out)
    if args.plot:
        from .plotting import plot_estimates

        plot_estimates(rows, args.plot, title=f"{args.method} ({Path(args.data).name})")
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = ModelSpec(args.model, args.n, args.seed, args.burn_in)
    data = simulate(spec)
    if spec.bivariate:
        rows = [{"x": float(a), "y": float(b)} for a, b in zip(data.x.values, data.y.values)]
        fields = ["x", "y"]
    else:
        rows = [{"value": float(v)} for v in data.values]
        fields = ["value"]
    try:
        write_table(rows, fields, args.format, args.out)
    except OSError as exc:
        raise DataError(f"cannot write {args.out}: {exc.strerror or exc}") from None
    return EXIT_OK


def _coverage_level_and_truth(args) -> tuple[Level, float, dict]:
    if args.truth_file:
        meta = json.loads(Path(args.truth_file).read_text())
        level = Level.from_tail(meta["tail"], "extreme")
        return level, float(meta["value"]), meta
    spec = ModelSpec(args.model, 0, args.seed)
    points = args.truth_points
    if args.model in BIVARIATE:
        if args.alpha is not None:
            alpha = Level.extreme(args.alpha)
        else:
            alpha = alpha_for_tau_prime(spec, Level.extreme(args.alpha_from_tau_prime), points)
        if args.truth is not None:
            return alpha, args.truth, {"tail": alpha.tail, "value": args.truth}
        tv = true_qmes(spec, alpha, points)
    else:
        level = Level.extreme(args.tau_prime)
        if args.truth is not None:
            return level, args.truth, {"tail": level.tail, "value": args.truth}
        tv = true_expectile(spec, level, points)
    meta = {
        "model": args.model,
        "quantity": tv.quantity,
        "level": tv.level.tau,
        "tail": tv.level.tail,
        "value": tv.value,
        "mc_points": tv.mc_points,
        "mc_se": tv.mc_se,
    }
    return tv.level, tv.value, meta


def cmd_coverage(args) -> int:
    level, truth, meta = _coverage_level_and_truth(args)
    print(
        f"model {args.model}: true value {truth:.6g} at level {level.tau:.7f}"
        + (f" (mc_se {meta['mc_se']:.3g})" if "mc_se" in meta else ""),
        file=sys.stderr,
    )
    if args.save_truth:
        Path(args.save_truth).write_text(json.dumps(meta, indent=2) + "\n")
    report = run_coverage(
        args.model,
        truth,
        level,
        parse_k_grid(args.k_grid),
        reps=args.reps,
        n=args.n,
        seed=args.seed,
        workers=args.threads,
        conf=args.level,
    )
    fields = ["model", "k", "variant", "error_rate", "misses", "valid", "failed", "nominal"]
    write_table(report.rows(), fields, args.format, args.out)
    if args.plot:
        from .plotting import plot_coverage

        plot_coverage(report, args.plot)
    return EXIT_OK


def cmd_plot(args) -> int:
    from .plotting import plot_estimates

    try:
        with open(args.input, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {args.input}: {exc.strerror or exc}") from None
    plot_estimates(rows, args.out, title=args.title)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="base RNG seed")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes")

    p = _Parser(prog="tailrisk", description="Extreme expectile and MES estimation for dependent series.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="table output format")
    p.add_argument("--threads", type=int, default=1, help="worker processes for coverage runs")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_args(sp):
        sp.add_argument("data", help="delimited file with a header row")
        sp.add_argument("--column", default="0", help="column name or 0-based index (default 0)")
        sp.add_argument("--y-column", help="market column; makes the input bivariate (x = --column)")
        sp.add_argument("--transform", choices=("none", "neg_log_return"), default="none")
        sp.add_argument("--delimiter", default=",")
        sp.add_argument("--out", help="output file (default stdout)")

    sp = sub.add_parser("ingest", parents=[common], help="read prices/returns and write the return series")
    data_args(sp)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("estimate", parents=[common], help="point estimates and intervals over k")
    data_args(sp)
    sp.add_argument("--k", type=int)
    sp.add_argument("--k-grid", help="e.g. 6:700:2 or 100,150,200")
    sp.add_argument("--alpha", type=float, help="quantile level (default 1 - 1/n)")
    sp.add_argument("--tau-prime", type=float, help="fixed expectile level instead of the composite one")
    sp.add_argument("--method", choices=METHODS, default="laws")
    sp.add_argument("--ci", choices=("iid", "d", "d-adj", "none"), default="d")
    sp.add_argument("--level", type=float, default=0.95)
    sp.add_argument("--blocks", default="auto", help="'auto' or 'r,l'")
    sp.add_argument("--plot", help="also write the estimate-vs-k figure here")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("simulate", parents=[common], help="write a simulated path as CSV")
    sp.add_argument("--model", choices=list("abcdefgh"), required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--burn-in", type=int)
    sp.add_argument("--out", help="output file (default stdout)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("coverage", parents=[common], help="Monte Carlo interval error rates")
    sp.add_argument("--model", choices=list("abcdefgh"), required=True)
    sp.add_argument("--reps", type=int, default=500)
    sp.add_argument("--n", type=int, default=2500)
    sp.add_argument("--tau-prime", type=float, default=0.9995, help="expectile level, models a-d")
    sp.add_argument("--alpha", type=float, help="QMES level, models e-h")
    sp.add_argument(
        "--alpha-from-tau-prime",
        type=float,
        default=0.9995,
        help="models e-h: pick alpha so that q_alpha equals this expectile of y (default 0.9995)",
    )
    sp.add_argument("--k-grid", default="100,150,200")
    sp.add_argument("--level", type=float, default=0.95)
    sp.add_argument("--truth", type=float, help="true value; skips the long-run simulation")
    sp.add_argument("--truth-file", help="JSON written by --save-truth")
    sp.add_argument("--save-truth", help="write the true value and its level as JSON")
    sp.add_argument("--truth-points", type=int, default=10_000_000)
    sp.add_argument("--out", help="output file (default stdout)")
    sp.add_argument("--plot", help="also write the error-rate figure here")
    sp.set_defaults(func=cmd_coverage)

    sp = sub.add_parser("plot", parents=[common], help="SVG of an estimate CSV against k")
    sp.add_argument("input", help="CSV written by 'estimate'")
    sp.add_argument("--out", required=True)
    sp.add_argument("--title")
    sp.set_defaults(func=cmd_plot)
    return p


def main(argv: Iterable[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(None if argv is None else list(argv))
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tailrisk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"tailrisk: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError) as exc:
        print(f"tailrisk: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TailRiskError as exc:
        print(f"tailrisk: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"tailrisk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
