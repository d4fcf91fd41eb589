"""Command-line interface.

One subcommand per construct: ``metrics`` (JSON report), ``curve`` (roc,
pr, p3, f1, pr-auc), ``uncertainty`` (band, delta, plan, solve-cv),
``subsample-sim`` and ``compare``.  Exit codes: 0 success, 1 usage error,
2 data error, 3 numeric precondition error.  The master seed comes from
``--seed`` when given, else the ``IMBEVAL_SEED`` environment variable,
else 0.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import io as iomod
from ._version import __version__
from .curves import (
    Curve,
    default_prevalence_grid,
    f1_curve,
    find_ordering_flip,
    operating_point_at_recall,
    p3_curve,
    pr_auc,
    pr_auc_curve,
    pr_curve,
    prevalence_grid,
    roc_from_predictions,
)
from .errors import DataError, NumericError
from .metrics import adjusted_f1, confusion_from_predictions, dataset_prevalence, rates_from_confusion
from .simulation import SyntheticDatasetSpec, generate_synthetic, subsample_study
from .uncertainty import (
    RateEstimate,
    hoeffding_sample_size,
    max_cv_bound,
    max_uncertainty_closed_form,
    max_uncertainty_numeric,
    precision_band,
    solve_companion_cv,
)

USAGE_ERROR = 1
DATA_ERROR = 2
NUMERIC_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; this tool reserves 2 for data errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_ERROR)


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("IMBEVAL_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise SystemExit(USAGE_ERROR) from None
    return 0


def _parse_eta_grid(spec: str) -> tuple[float, ...]:
    """Parse 'min:max:points' into a log-spaced prevalence grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise DataError(f"--eta-grid expects min:max:points, got {spec!r}")
    try:
        lo, hi, num = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise DataError(f"--eta-grid expects numeric min:max:points, got {spec!r}") from None
    return prevalence_grid(lo, hi, num)


def _write_or_print(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot write {out}: {exc}") from exc


def _json_text(payload: object) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _ingest(args: argparse.Namespace, attr: str = "input") -> list:
    return iomod.ingest_predictions(getattr(args, attr), getattr(args, "input_format", None))


def _select_op(records, args) -> tuple[object, float]:
    """Operating point + threshold from --threshold or --at-recall (default recall 0.5)."""
    if args.threshold is not None:
        counts = confusion_from_predictions(records, args.threshold)
        return rates_from_confusion(counts), args.threshold
    recall = args.at_recall if args.at_recall is not None else 0.5
    roc = roc_from_predictions(records)
    idx = next(i for i, p in enumerate(roc.points) if p.tpr >= recall)
    return roc.points[idx], roc.thresholds[idx]


def _rate_estimate(value: float, half_width: float, alpha: float, name: str) -> RateEstimate:
    try:
        return RateEstimate(value=value, half_width=half_width, confidence=alpha)
    except NumericError as exc:
        raise NumericError(f"{name}: {exc}") from exc


def _cmd_metrics(args: argparse.Namespace) -> int:
    records = _ingest(args)
    thresholds = args.threshold or []
    if not thresholds and not args.at_recall:
        thresholds = [0.5]
    digest = iomod.sha256_of_file(args.input)
    report = iomod.build_report(
        records,
        thresholds=thresholds,
        at_recalls=args.at_recall or [],
        etas=args.eta or [],
        bootstrap_replicates=args.bootstrap,
        alpha=args.alpha,
        seed=_resolve_seed(args.seed),
        input_digest=digest,
    )
    _write_or_print(iomod.report_json(report), args.out)
    return 0


def _cmd_curve(args: argparse.Namespace) -> int:
    records = _ingest(args)
    roc = roc_from_predictions(records)
    counts = confusion_from_predictions(records, roc.thresholds[-1])
    p_plus, _ = dataset_prevalence(counts)
    grid = _parse_eta_grid(args.eta_grid) if args.eta_grid else default_prevalence_grid(extra=[p_plus])

    kind = args.kind
    if kind == "roc":
        curve = Curve(
            x=tuple(p.fpr for p in roc.points),
            y=tuple(p.tpr for p in roc.points),
            x_axis="fpr",
            y_axis="tpr",
        )
    elif kind == "pr":
        curve = pr_curve(roc, args.eta[0] if args.eta else p_plus)
    elif kind == "p3":
        op, _ = _select_op(records, args)
        curve = p3_curve(op, grid)
    elif kind == "f1":
        op, _ = _select_op(records, args)
        curve = f1_curve(op, grid)
    else:  # pr-auc
        curve = pr_auc_curve(roc, grid)
    text = iomod.curve_csv(curve) if args.format == "csv" else iomod.curve_svg(curve)
    _write_or_print(text, args.out)
    return 0


def _estimates_from_args(args: argparse.Namespace) -> tuple[RateEstimate, RateEstimate]:
    tpr = _rate_estimate(args.tpr, args.tpr_half_width, args.alpha, "tpr")
    fpr = _rate_estimate(args.fpr, args.fpr_half_width, args.alpha, "fpr")
    return tpr, fpr


def _cmd_uncertainty(args: argparse.Namespace) -> int:
    action = args.action
    if action == "plan":
        n = hoeffding_sample_size(args.sigma, args.alpha)
        _write_or_print(_json_text({"sigma": args.sigma, "alpha": args.alpha, "samples": n}), args.out)
        return 0
    if action == "solve-cv":
        companion = solve_companion_cv(args.known_cv, args.delta)
        payload = {"known_cv": args.known_cv, "delta": args.delta, "companion_cv": companion}
        _write_or_print(_json_text(payload), args.out)
        return 0
    tpr, fpr = _estimates_from_args(args)
    if action == "delta":
        result = max_uncertainty_closed_form(tpr, fpr)
        numeric_delta, numeric_eta = max_uncertainty_numeric(tpr, fpr)
        bound, tight = max_cv_bound(tpr, fpr)
        payload = {
            "delta": result.delta,
            "eta_star": result.eta_star,
            "r1": result.r1,
            "r2": result.r2,
            "numeric_delta": numeric_delta,
            "numeric_eta_star": numeric_eta,
            "cv_tpr": tpr.cv,
            "cv_fpr": fpr.cv,
            "cv_bound": bound,
            "bound_tight": tight,
        }
        _write_or_print(_json_text(payload), args.out)
        return 0
    # action == "band"
    grid = _parse_eta_grid(args.eta_grid) if args.eta_grid else default_prevalence_grid()
    bands = [precision_band(tpr, fpr, eta) for eta in grid]
    if args.format == "json":
        payload = [
            {"eta": b.eta, "lower": b.lower, "point": b.point, "upper": b.upper} for b in bands
        ]
        _write_or_print(_json_text(payload), args.out)
    else:
        lines = ["# columns: eta,lower,point,upper", "eta,lower,point,upper"]
        lines += [f"{b.eta!r},{b.lower!r},{b.point!r},{b.upper!r}" for b in bands]
        _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_subsample_sim(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    if args.input is not None:
        records = _ingest(args)
    else:
        spec = SyntheticDatasetSpec(
            n_positive=args.positives,
            n_negative=args.negatives,
            positive_mean=args.separation,
            positive_std=args.positive_std,
            seed=seed,
        )
        records = generate_synthetic(spec)
    if args.recall_grid:
        parts = args.recall_grid.split(":")
        if len(parts) != 3:
            raise DataError(f"--recall-grid expects min:max:points, got {args.recall_grid!r}")
        lo, hi, num = float(parts[0]), float(parts[1]), int(parts[2])
        grid = [lo + i * (hi - lo) / (num - 1) for i in range(num)]
    else:
        grid = [0.02 + i * 0.98 / 48 for i in range(49)]
    result = subsample_study(records, args.target_eta, args.replicates, grid, seed=seed + 1)
    if args.format == "svg":
        band = Curve(
            x=result.recall_grid, y=result.median, x_axis="recall", y_axis="precision",
            eta=result.target_eta,
        )
        _write_or_print(iomod.curve_svg(band), args.out)
        return 0
    payload = {
        "target_eta": result.target_eta,
        "replicates": result.replicate_count,
        "kept_negatives": result.kept_negatives,
        "recall_grid": list(result.recall_grid),
        "precision_min": list(result.minimum),
        "precision_q25": list(result.q25),
        "precision_median": list(result.median),
        "precision_q75": list(result.q75),
        "precision_max": list(result.maximum),
        "adjusted_curve": {"recall": list(result.adjusted_curve.x), "precision": list(result.adjusted_curve.y)},
        "seed": seed,
    }
    _write_or_print(_json_text(payload), args.out)
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    records_a = iomod.ingest_predictions(args.input_a, args.input_format)
    records_b = iomod.ingest_predictions(args.input_b, args.input_format)
    roc_a = roc_from_predictions(records_a)
    roc_b = roc_from_predictions(records_b)
    grid = _parse_eta_grid(args.eta_grid) if args.eta_grid else default_prevalence_grid()

    if args.metric == "pr-auc":
        eta_star = find_ordering_flip(roc_a, roc_b, grid, "pr_auc")
        metric_a = lambda e: pr_auc(roc_a, e)
        metric_b = lambda e: pr_auc(roc_b, e)
    else:
        recalls = args.at_recall or [0.5]
        recall_a = recalls[0]
        recall_b = recalls[1] if len(recalls) > 1 else recalls[0]
        op_a = operating_point_at_recall(roc_a, recall_a)
        op_b = operating_point_at_recall(roc_b, recall_b)
        eta_star = find_ordering_flip(op_a, op_b, grid, "f1_at_op")
        metric_a = lambda e: adjusted_f1(op_a, e)
        metric_b = lambda e: adjusted_f1(op_b, e)

    samples = []
    for eta in (grid[0], grid[len(grid) // 2], grid[-1]):
        samples.append({"eta": eta, "a": metric_a(eta), "b": metric_b(eta)})
    payload = {
        "metric": args.metric,
        "crossing_eta": eta_star,
        "samples": samples,
    }
    _write_or_print(_json_text(payload), args.out)
    return 0


def _add_io_flags(p: argparse.ArgumentParser, *, output_default: str | None = None) -> None:
    p.add_argument("--out", default=output_default, help="output path (default: stdout)")


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="predictions file (CSV or JSONL)")
    p.add_argument("--input-format", choices=["csv", "jsonl"], default=None,
                   help="input format (default: infer from suffix)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="imbeval", description=__doc__)
    parser.add_argument("--version", action="version", version=f"imbeval {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", help="JSON evaluation report for a predictions file")
    _add_input_flags(p)
    p.add_argument("--threshold", type=float, action="append", help="score threshold (repeatable)")
    p.add_argument("--at-recall", type=float, action="append", help="target recall (repeatable)")
    p.add_argument("--eta", type=float, action="append",
                   help="prevalence to adjust to (repeatable; default: dataset prevalence)")
    p.add_argument("--bootstrap", type=int, default=1000, help="bootstrap replicates")
    p.add_argument("--alpha", type=float, default=0.95, help="confidence level")
    p.add_argument("--seed", type=int, default=None)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("curve", help="emit a curve as CSV or SVG")
    p.add_argument("kind", choices=["roc", "pr", "p3", "f1", "pr-auc"])
    _add_input_flags(p)
    p.add_argument("--eta", type=float, action="append",
                   help="prevalence for the PR curve (default: dataset prevalence)")
    p.add_argument("--eta-grid", default=None, help="min:max:points, log-spaced")
    p.add_argument("--threshold", type=float, default=None, help="operating point by threshold")
    p.add_argument("--at-recall", type=float, default=None,
                   help="operating point by recall (default 0.5 for p3/f1)")
    p.add_argument("--format", choices=["csv", "svg"], default="csv")
    _add_io_flags(p)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("uncertainty", help="precision-band analyses for interval rate estimates")
    act = p.add_subparsers(dest="action", required=True)

    band = act.add_parser("band", help="lower/point/upper precision per prevalence")
    delta = act.add_parser("delta", help="maximal band width, closed form + numeric check")
    for q in (band, delta):
        q.add_argument("--tpr", type=float, required=True)
        q.add_argument("--tpr-half-width", type=float, required=True)
        q.add_argument("--fpr", type=float, required=True)
        q.add_argument("--fpr-half-width", type=float, required=True)
        q.add_argument("--alpha", type=float, default=0.95)
    band.add_argument("--eta-grid", default=None, help="min:max:points, log-spaced")
    band.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_io_flags(band)
    _add_io_flags(delta)
    band.set_defaults(func=_cmd_uncertainty)
    delta.set_defaults(func=_cmd_uncertainty)

    plan = act.add_parser("plan", help="distribution-free sample-size bound for a rate half-width")
    plan.add_argument("--sigma", type=float, required=True, help="target half-width")
    plan.add_argument("--alpha", type=float, default=0.95)
    _add_io_flags(plan)
    plan.set_defaults(func=_cmd_uncertainty)

    solve = act.add_parser("solve-cv", help="largest companion CV meeting a target band width")
    solve.add_argument("--known-cv", type=float, required=True)
    solve.add_argument("--delta", type=float, required=True)
    _add_io_flags(solve)
    solve.set_defaults(func=_cmd_uncertainty)

    p = sub.add_parser("subsample-sim", help="spread of subsampled PR curves vs the adjusted curve")
    p.add_argument("--input", default=None, help="predictions file (default: synthetic scores)")
    p.add_argument("--input-format", choices=["csv", "jsonl"], default=None)
    p.add_argument("--positives", type=int, default=5)
    p.add_argument("--negatives", type=int, default=4995)
    p.add_argument("--separation", type=float, default=2.5, help="positive-class score mean")
    p.add_argument("--positive-std", type=float, default=1.0)
    p.add_argument("--target-eta", type=float, required=True)
    p.add_argument("--replicates", type=int, default=30)
    p.add_argument("--recall-grid", default=None, help="min:max:points, linear")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=["json", "svg"], default="json")
    _add_io_flags(p)
    p.set_defaults(func=_cmd_subsample_sim)

    p = sub.add_parser("compare", help="find the prevalence where two classifiers swap rank")
    p.add_argument("--input-a", required=True)
    p.add_argument("--input-b", required=True)
    p.add_argument("--input-format", choices=["csv", "jsonl"], default=None)
    p.add_argument("--metric", choices=["pr-auc", "f1"], default="pr-auc")
    p.add_argument("--at-recall", type=float, nargs="+", default=None,
                   help="recall(s) selecting the F1 operating points (one shared or one per classifier)")
    p.add_argument("--eta-grid", default=None, help="min:max:points, log-spaced")
    _add_io_flags(p)
    p.set_defaults(func=_cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DataError as exc:
        sys.stderr.write(f"imbeval: data error: {exc}\n")
        return DATA_ERROR
    except NumericError as exc:
        sys.stderr.write(f"imbeval: numeric error: {exc}\n")
        return NUMERIC_ERROR
    except ValueError as exc:
        sys.stderr.write(f"imbeval: {exc}\n")
        return USAGE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
