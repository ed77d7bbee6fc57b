"""Command-line interface.

Exit codes: 0 on success, 2 on invalid input or usage, 1 on internal errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

from . import ar1demo, simlab
from .core import BinningScheme, ForecastSeries
from .results import SCHEMA_VERSION, decompose_series, flatten

REFERENCE_BETA = "13.2,-10.7,-3.1,-0.6,0.03"


class InputError(ValueError):
    pass


def parse_thresholds(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InputError(f"threshold range must be start:stop:step, got {text!r}")
        start, stop, step = (float(v) for v in parts)
        if step <= 0 or stop < start:
            raise InputError(f"invalid threshold range {text!r}")
        count = math.floor((stop - start) / step + 1e-9) + 1
        return [start + i * step for i in range(count)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"invalid threshold list {text!r}") from exc


def parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"invalid number list {text!r}") from exc


def _read_rows(path: str, columns: tuple[str, str]):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != list(columns):
            raise InputError(f"{path}: line 1: expected header {','.join(columns)!r}")
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            yield reader.line_num, row


def read_forecasts(path: str) -> ForecastSeries:
    p, y = [], []
    for line, row in _read_rows(path, ("p", "y")):
        if len(row) != 2:
            raise InputError(f"{path}: line {line}: expected 2 fields, got {len(row)}")
        try:
            pv, yv = float(row[0]), float(row[1])
        except ValueError:
            raise InputError(f"{path}: line {line}: non-numeric value in {row!r}") from None
        if not 0.0 <= pv <= 1.0:
            raise InputError(f"{path}: line {line}: probability {row[0].strip()} outside [0, 1]")
        if yv not in (0.0, 1.0):
            raise InputError(f"{path}: line {line}: outcome {row[1].strip()} is not 0 or 1")
        p.append(pv)
        y.append(yv)
    if not p:
        raise InputError(f"{path}: no data rows")
    return ForecastSeries(p, y)


def read_daily(path: str) -> ar1demo.DailySeries:
    day, temp = [], []
    for line, row in _read_rows(path, ("day", "temp")):
        if len(row) != 2:
            raise InputError(f"{path}: line {line}: expected 2 fields, got {len(row)}")
        try:
            d, t = int(row[0]), float(row[1])
        except ValueError:
            raise InputError(f"{path}: line {line}: invalid value in {row!r}") from None
        if day and d <= day[-1]:
            raise InputError(f"{path}: line {line}: day index {d} is not increasing")
        day.append(d)
        temp.append(t)
    if not day:
        raise InputError(f"{path}: no data rows")
    return ar1demo.DailySeries(day, temp)


def _csv_text(rows: Sequence[Sequence], header: Sequence[str] | None = None, comments=()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    w.writerows([["" if v is None else (repr(v) if isinstance(v, float) else v) for v in r] for r in rows])
    return buf.getvalue()


def _json_text(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


# --- decompose ---------------------------------------------------------------

def cmd_decompose(args) -> str:
    series = read_forecasts(args.input)
    if args.edges is not None:
        scheme = BinningScheme(parse_floats(args.edges))
    else:
        scheme = BinningScheme.equal_width(args.bins)
    doc = decompose_series(series, scheme)
    if args.format == "csv":
        return _csv_text(flatten(doc.to_dict()), header=("field", "value"))
    return doc.to_json()


# --- simulate ----------------------------------------------------------------

def simulate_report(mode: str, trials: int, n: int, seed: int, k: float = 2.0, grid=None) -> dict:
    rel, res, unc = simlab.true_components()
    report = {
        "schema_version": SCHEMA_VERSION,
        "mode": mode,
        "trials": trials,
        "seed": seed,
        "truths": {"rel": rel, "res": res, "unc": unc},
    }
    truths = simlab.estimator_truths()
    if mode == "convergence":
        result = simlab.convergence_study(grid, trials, seed)
        report["n_grid"] = list(result.n_grid)
        report["mean_abs_diff"] = {k_: list(v) for k_, v in result.mean_abs_diff.items()}
        report["slopes"] = result.slopes
        return report
    report["n"] = n
    records = simlab.run_experiment(trials, n, seed)
    if mode == "table1":
        summary = simlab.summarize_trials(records, truths)
        report["summary"] = {name: row.as_dict() for name, row in summary.items()}
    else:
        counts = simlab.coverage(records, truths, k)
        report["k"] = k
        report["coverage"] = counts
        report["coverage_fraction"] = {name: c / trials for name, c in counts.items()}
    return report


def cmd_simulate(args) -> str:
    for name in ("trials", "n"):
        if getattr(args, name) < 1:
            raise InputError(f"--{name} must be positive")
    grid = None
    if args.mode == "convergence":
        if not args.grid:
            raise InputError("--mode convergence requires --grid")
        grid = [int(v) for v in parse_floats(args.grid)]
    elif args.trials < 2 and args.mode == "table1":
        raise InputError("table1 mode needs at least 2 trials")
    if args.n < 2 and args.mode != "convergence":
        raise InputError("--n must be at least 2")
    if not args.k > 0:
        raise InputError("--k must be positive")
    report = simulate_report(args.mode, args.trials, args.n, args.seed, args.k, grid)
    if args.format == "json":
        return _json_text(report)
    if args.mode == "table1":
        cols = ("sample_variance", "mean_estimated_variance", "mean_squared_error", "mean_bias")
        rows = [[name, *(report["summary"][name][c] for c in cols)] for name in report["summary"]]
        return _csv_text(rows, header=("estimator", *cols))
    if args.mode == "coverage":
        rows = [[name, c, report["coverage_fraction"][name]] for name, c in report["coverage"].items()]
        return _csv_text(rows, header=("estimator", "covered", "fraction"))
    rows = [[name, report["slopes"][name], *report["mean_abs_diff"][name]] for name in report["slopes"]]
    return _csv_text(rows, header=("estimator", "slope", *(f"n={v}" for v in report["n_grid"])))


# --- ar1 ---------------------------------------------------------------------

SWEEP_COLUMNS = (
    "threshold", "n", "skipped", "brier", "brier_se",
    "rel", "res", "unc", "rel_bc", "res_bc", "unc_bc", "rel_cc", "res_cc", "unc_cc", "gamma",
    "var_rel", "var_res", "var_unc", "var_rel_bc", "var_res_bc", "var_unc_bc",
)


def sweep_row(row: ar1demo.SweepRow) -> dict:
    out = {"threshold": row.threshold, "n": row.n, "skipped": row.skipped,
           "brier": row.brier, "brier_se": row.brier_se}
    suffix = {"traditional": "", "bias_corrected": "_bc", "consistency_corrected": "_cc"}
    for family, tag in suffix.items():
        d = row.decompositions.get(family)
        for comp in ("rel", "res", "unc"):
            out[comp + tag] = None if d is None else getattr(d, comp)
    cc = row.decompositions.get("consistency_corrected")
    out["gamma"] = None if cc is None else cc.gamma
    for name, v in row.variances.as_dict().items():
        out["var_" + name] = v
    return out


def ar1_report(train, test, thresholds, bins) -> dict:
    models, rows = ar1demo.threshold_sweep(train, test, thresholds, bins)
    return {
        "schema_version": SCHEMA_VERSION,
        "model": {
            "beta": list(models.seasonal.beta),
            "alpha": models.ar1.alpha,
            "sigma": models.ar1.sigma,
        },
        "train": {"days": len(train), "gaps": train.gaps},
        "test": {"days": len(test), "gaps": test.gaps},
        "bins": bins,
        "rows": [sweep_row(r) for r in rows],
    }


def cmd_ar1(args) -> str:
    file_mode = any(v is not None for v in (args.train, args.test, args.input))
    if args.synthetic == file_mode:
        raise InputError("use exactly one of --synthetic or file input (--train/--test or --input)")
    thresholds = parse_thresholds(args.thresholds)
    if not thresholds:
        raise InputError("no thresholds given")
    if args.bins < 1:
        raise InputError("--bins must be positive")
    if args.synthetic:
        beta = parse_floats(args.beta)
        if len(beta) != 5:
            raise InputError("--beta needs 5 comma-separated coefficients")
        if args.days < 20:
            raise InputError("--days must be at least 20")
        series = ar1demo.generate_synthetic(
            ar1demo.SeasonalModel(beta), ar1demo.Ar1Model(args.alpha, args.sigma), args.days, args.seed
        )
        train, test = series.split(int(series.day[0]) + args.days // 2)
    elif args.input is not None:
        if args.train is not None or args.test is not None:
            raise InputError("--input cannot be combined with --train/--test")
        series = read_daily(args.input)
        split = args.split_day if args.split_day is not None else int(series.day[0]) + ar1demo.DAY_1980
        train, test = series.split(split)
    else:
        if args.train is None or args.test is None:
            raise InputError("file mode needs both --train and --test")
        train, test = read_daily(args.train), read_daily(args.test)
    report = ar1_report(train, test, thresholds, args.bins)
    if args.format == "json":
        return _json_text(report)
    m = report["model"]
    comments = [
        f"alpha={m['alpha']!r}",
        f"sigma={m['sigma']!r}",
        "beta=" + ",".join(repr(b) for b in m["beta"]),
    ]
    rows = [[r[c] for c in SWEEP_COLUMNS] for r in report["rows"]]
    return _csv_text(rows, header=SWEEP_COLUMNS, comments=comments)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brierdecomp",
        description="Brier score decomposition with first-order variance estimates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="decompose a CSV archive with columns p,y")
    p.add_argument("input")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--bins", type=int, default=10, help="number of equal-width bins")
    grp.add_argument("--edges", help="comma-separated bin edges from 0 to 1")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("simulate", help="Monte Carlo experiment on the artificial scheme")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--n", type=int, default=250)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("table1", "coverage", "convergence"), default="table1")
    p.add_argument("--k", type=float, default=2.0, help="interval half-width in standard deviations")
    p.add_argument("--grid", help="comma-separated sample sizes for convergence mode")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ar1", help="AR(1) exceedance forecasts: threshold sweep")
    p.add_argument("--train", help="training CSV with columns day,temp")
    p.add_argument("--test", help="test CSV with columns day,temp")
    p.add_argument("--input", help="single CSV split at --split-day")
    p.add_argument("--split-day", type=int, help="first day index of the test period")
    p.add_argument("--synthetic", action="store_true")
    p.add_argument("--alpha", type=float, default=0.77)
    p.add_argument("--sigma", type=float, default=2.97)
    p.add_argument("--beta", default=REFERENCE_BETA)
    p.add_argument("--days", type=int, default=7305)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--thresholds", default="0:10:1")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_ar1)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
