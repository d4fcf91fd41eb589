"""File ingestion, curve emission, and the JSON evaluation report.

Input formats
-------------
CSV with exact header ``score,label``; JSONL with one ``{"score": ...,
"label": ...}`` object per line.  Labels follow the {0, 1} or {-1, +1}
convention (not mixed within a file); scores must be finite.  Parsing is
streaming: memory grows only with the number of records.

Output formats
--------------
Curves as two-column CSV (axis semantics in ``#`` comment lines, floats
written with full round-trip precision) or as self-contained SVG with a
log-scaled x-axis where the curve calls for one.  Reports as JSON with a
``schema_version`` field; every adjusted figure is accompanied by the test
set's own prevalence so readers can never mistake one class mix for
another.  All emissions are byte-deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from ._version import __version__
from .curves import Curve, roc_from_predictions
from .errors import DataError, NumericError
from .metrics import (
    PredictionRecord,
    adjusted_f1,
    adjusted_precision,
    confusion_from_predictions,
    dataset_prevalence,
    rates_from_confusion,
)
from .uncertainty import (
    RateEstimate,
    bootstrap_rate_estimate,
    confidence_product_interval,
    max_cv_bound,
    max_uncertainty_closed_form,
)

__all__ = [
    "ingest_predictions",
    "emit_curve",
    "parse_curve_csv",
    "build_report",
    "report_json",
    "sha256_of_file",
]

SCHEMA_VERSION = 1


class _LabelConventions:
    """Track which label alphabet a file uses; 0 and -1 together are ambiguous."""

    def __init__(self) -> None:
        self.saw_zero = False
        self.saw_minus_one = False

    def observe(self, raw: int, line: int) -> bool:
        if raw == 1:
            return True
        if raw == 0:
            self.saw_zero = True
        elif raw == -1:
            self.saw_minus_one = True
        else:
            raise DataError(f"line {line}: label must be one of -1, 0, 1; got {raw!r}")
        if self.saw_zero and self.saw_minus_one:
            raise DataError(f"line {line}: mixed label conventions (file contains both 0 and -1)")
        return False


def _parse_score(raw: object, line: int) -> float:
    try:
        score = float(raw)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise DataError(f"line {line}: score {raw!r} is not a number") from None
    if not math.isfinite(score):
        raise DataError(f"line {line}: score must be finite, got {raw!r}")
    return score


def _parse_int_label(raw: object, line: int) -> int:
    if isinstance(raw, bool):
        raise DataError(f"line {line}: label must be an integer, got {raw!r}")
    try:
        value = int(str(raw).strip())
    except ValueError:
        raise DataError(f"line {line}: label {raw!r} is not an integer") from None
    if str(raw).strip() not in (str(value),):
        raise DataError(f"line {line}: label {raw!r} is not an integer")
    return value


def ingest_predictions(path: str | Path, fmt: str | None = None) -> list[PredictionRecord]:
    """Read prediction records from a CSV or JSONL file.

    `fmt` is "csv" or "jsonl"; when omitted it is inferred from the file
    suffix.  Errors carry 1-based line numbers (the CSV header is line 1).
    """
    path = Path(path)
    if fmt is None:
        suffix = path.suffix.lower()
        fmt = {"csv": "csv", "jsonl": "jsonl", "ndjson": "jsonl", "json": "jsonl"}.get(
            suffix.lstrip("."), None
        )
        if fmt is None:
            raise DataError(f"cannot infer format from suffix {suffix!r}; pass fmt explicitly")
    if fmt == "csv":
        return _ingest_csv(path)
    if fmt == "jsonl":
        return _ingest_jsonl(path)
    raise DataError(f"unknown input format {fmt!r}")


def _ingest_csv(path: Path) -> list[PredictionRecord]:
    records: list[PredictionRecord] = []
    conventions = _LabelConventions()
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["score", "label"]:
            raise DataError(f"{path}: line 1: expected header 'score,label', got {header!r}")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataError(f"{path}: line {line}: expected 2 fields, got {len(row)}")
            score = _parse_score(row[0].strip(), line)
            positive = conventions.observe(_parse_int_label(row[1], line), line)
            records.append(PredictionRecord(score, positive))
    if not records:
        raise DataError(f"{path}: no records")
    return records


def _ingest_jsonl(path: Path) -> list[PredictionRecord]:
    records: list[PredictionRecord] = []
    conventions = _LabelConventions()
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with handle:
        for line, text in enumerate(handle, start=1):
            text = text.strip()
            if not text:
                continue
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {line}: invalid JSON: {exc.msg}") from None
            if not isinstance(obj, dict) or "score" not in obj or "label" not in obj:
                raise DataError(f"{path}: line {line}: object needs 'score' and 'label' fields")
            raw_score = obj["score"]
            if not isinstance(raw_score, (int, float)) or isinstance(raw_score, bool):
                raise DataError(f"{path}: line {line}: score {raw_score!r} is not a number")
            score = _parse_score(raw_score, line)
            raw_label = obj["label"]
            if isinstance(raw_label, bool) or not isinstance(raw_label, int):
                raise DataError(f"{path}: line {line}: label must be an integer, got {raw_label!r}")
            positive = conventions.observe(raw_label, line)
            records.append(PredictionRecord(score, positive))
    if not records:
        raise DataError(f"{path}: no records")
    return records


def emit_curve(curve: Curve, path: str | Path, fmt: str = "csv") -> None:
    """Write a curve to `path` as CSV or as a self-contained SVG plot."""
    path = Path(path)
    if fmt == "csv":
        text = curve_csv(curve)
    elif fmt == "svg":
        text = curve_svg(curve)
    else:
        raise DataError(f"unknown curve format {fmt!r}")
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def curve_csv(curve: Curve) -> str:
    """Two-column CSV with axis metadata in comment lines; floats round-trip exactly."""
    lines = [
        f"# x_axis: {curve.x_axis}",
        f"# y_axis: {curve.y_axis}",
        f"# x_scale: {curve.x_scale}",
    ]
    if curve.eta is not None:
        lines.append(f"# eta: {curve.eta!r}")
    lines.append(f"# dropped: {curve.dropped}")
    lines.append("x,y")
    for x, y in zip(curve.x, curve.y):
        lines.append(f"{x!r},{y!r}")
    return "\n".join(lines) + "\n"


def parse_curve_csv(path: str | Path) -> Curve:
    """Read back a curve written by :func:`curve_csv`."""
    path = Path(path)
    meta: dict[str, str] = {}
    xs: list[float] = []
    ys: list[float] = []
    saw_header = False
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line.lstrip("#").partition(":")
            meta[key.strip()] = value.strip()
            continue
        if not saw_header:
            if line != "x,y":
                raise DataError(f"{path}: line {line_no}: expected 'x,y' header, got {line!r}")
            saw_header = True
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise DataError(f"{path}: line {line_no}: expected 2 fields")
        xs.append(_parse_score(parts[0], line_no))
        ys.append(_parse_score(parts[1], line_no))
    if not saw_header:
        raise DataError(f"{path}: missing 'x,y' header")
    eta = float(meta["eta"]) if "eta" in meta else None
    return Curve(
        x=tuple(xs),
        y=tuple(ys),
        x_axis=meta.get("x_axis", "x"),
        y_axis=meta.get("y_axis", "y"),
        x_scale=meta.get("x_scale", "linear"),
        eta=eta,
        dropped=int(meta.get("dropped", "0")),
    )


_SVG_WIDTH = 800
_SVG_HEIGHT = 520
_MARGIN_LEFT = 80
_MARGIN_RIGHT = 30
_MARGIN_TOP = 40
_MARGIN_BOTTOM = 70


def _format_tick(value: float) -> str:
    if value != 0.0 and (abs(value) < 1e-3 or abs(value) >= 1e4):
        return f"{value:.0e}"
    return f"{value:g}"


def curve_svg(curve: Curve) -> str:
    """Self-contained SVG line plot; the x-axis is log-scaled when the curve says so."""
    if len(curve) == 0:
        raise NumericError("cannot plot an empty curve")
    plot_left = _MARGIN_LEFT
    plot_right = _SVG_WIDTH - _MARGIN_RIGHT
    plot_top = _MARGIN_TOP
    plot_bottom = _SVG_HEIGHT - _MARGIN_BOTTOM

    log_x = curve.x_scale == "log10"
    if log_x and curve.x[0] <= 0.0:
        raise NumericError("log-scaled x-axis needs positive x values")
    x_lo = math.log10(curve.x[0]) if log_x else curve.x[0]
    x_hi = math.log10(curve.x[-1]) if log_x else curve.x[-1]
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if all(0.0 <= y <= 1.0 for y in curve.y):
        y_lo, y_hi = 0.0, 1.0
    else:
        y_lo, y_hi = min(curve.y), max(curve.y)
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    def to_px(x: float, y: float) -> tuple[float, float]:
        xv = math.log10(x) if log_x else x
        px = plot_left + (xv - x_lo) / (x_hi - x_lo) * (plot_right - plot_left)
        py = plot_bottom - (y - y_lo) / (y_hi - y_lo) * (plot_bottom - plot_top)
        return px, py

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_WIDTH}" height="{_SVG_HEIGHT}" '
        f'viewBox="0 0 {_SVG_WIDTH} {_SVG_HEIGHT}">'
    )
    parts.append('<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>')

    # Tick positions: decades for log axes, even spacing otherwise.
    if log_x:
        first = math.ceil(x_lo - 1e-9)
        last = math.floor(x_hi + 1e-9)
        x_ticks = [10.0**k for k in range(first, last + 1)]
    else:
        x_ticks = [x_lo + i * (x_hi - x_lo) / 5 for i in range(6)]
    y_ticks = [y_lo + i * (y_hi - y_lo) / 4 for i in range(5)]

    for yt in y_ticks:
        _, py = to_px(curve.x[0], yt)
        parts.append(
            f'<line x1="{plot_left}" y1="{py:.2f}" x2="{plot_right}" y2="{py:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{plot_left - 8}" y="{py + 4:.2f}" text-anchor="end" font-size="12" '
            f'font-family="sans-serif">{_format_tick(yt)}</text>'
        )
    for xt in x_ticks:
        px, _ = to_px(xt, y_lo)
        parts.append(
            f'<line x1="{px:.2f}" y1="{plot_bottom}" x2="{px:.2f}" y2="{plot_bottom + 6}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{plot_bottom + 22}" text-anchor="middle" font-size="12" '
            f'font-family="sans-serif">{_format_tick(xt)}</text>'
        )

    parts.append(
        f'<line x1="{plot_left}" y1="{plot_bottom}" x2="{plot_right}" y2="{plot_bottom}" '
        f'stroke="#000000" stroke-width="1.5"/>'
    )
    parts.append(
        f'<line x1="{plot_left}" y1="{plot_top}" x2="{plot_left}" y2="{plot_bottom}" '
        f'stroke="#000000" stroke-width="1.5"/>'
    )

    points = " ".join(f"{px:.2f},{py:.2f}" for px, py in (to_px(x, y) for x, y in zip(curve.x, curve.y)))
    parts.append(f'<polyline fill="none" stroke="#1f77b4" stroke-width="2" points="{points}"/>')

    x_label = curve.x_axis + (" (log scale)" if log_x else "")
    title = f"{curve.y_axis} vs {curve.x_axis}"
    if curve.eta is not None:
        title += f" at prevalence {curve.eta:g}"
    parts.append(
        f'<text x="{(plot_left + plot_right) / 2:.1f}" y="24" text-anchor="middle" '
        f'font-size="15" font-family="sans-serif">{title}</text>'
    )
    parts.append(
        f'<text x="{(plot_left + plot_right) / 2:.1f}" y="{_SVG_HEIGHT - 20}" text-anchor="middle" '
        f'font-size="13" font-family="sans-serif">{x_label}</text>'
    )
    mid_y = (plot_top + plot_bottom) / 2
    parts.append(
        f'<text x="22" y="{mid_y:.1f}" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif" transform="rotate(-90 22 {mid_y:.1f})">{curve.y_axis}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def sha256_of_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _rate_dict(est: RateEstimate) -> dict:
    return {
        "value": est.value,
        "half_width": est.half_width,
        "confidence": est.confidence,
        "cv": est.cv,
    }


def _thresholds_for_recalls(records: Sequence[PredictionRecord], recalls: Sequence[float]) -> list[float]:
    roc = roc_from_predictions(records)
    out = []
    for r in recalls:
        if not (0.0 <= r <= 1.0):
            raise NumericError(f"target recall must lie in [0, 1], got {r!r}")
        idx = next(i for i, p in enumerate(roc.points) if p.tpr >= r)
        out.append(roc.thresholds[idx])
    return out


def build_report(
    records: Sequence[PredictionRecord],
    *,
    thresholds: Sequence[float] = (),
    at_recalls: Sequence[float] = (),
    etas: Sequence[float] = (),
    bootstrap_replicates: int = 1000,
    alpha: float = 0.95,
    seed: int = 0,
    input_digest: str | None = None,
) -> dict:
    """Evaluate `records` at the requested thresholds and prevalences.

    Composes the confusion/rate estimators with bootstrap intervals and the
    maximal-uncertainty analysis into one JSON-ready dictionary.  With no
    prevalence list the dataset's own prevalence is used; either way every
    per-prevalence block repeats the dataset prevalence next to the
    adjusted figures.  Deterministic for a fixed seed.
    """
    if not records:
        raise DataError("no records")
    all_thresholds = [float(t) for t in thresholds]
    selectors = [("threshold", t) for t in all_thresholds]
    if at_recalls:
        for recall, t in zip(at_recalls, _thresholds_for_recalls(records, at_recalls)):
            selectors.append(("recall", float(recall)))
            all_thresholds.append(t)
    if not selectors:
        raise DataError("no thresholds or target recalls requested")

    counts0 = confusion_from_predictions(records, all_thresholds[0])
    p_plus, imbalance = dataset_prevalence(counts0)
    eta_list = [float(e) for e in etas] if etas else [p_plus]

    ss = np.random.SeedSequence(seed)
    children = ss.spawn(2 * len(all_thresholds))

    ops = []
    for i, (threshold, (mode, requested)) in enumerate(zip(all_thresholds, selectors)):
        counts = confusion_from_predictions(records, threshold)
        point = rates_from_confusion(counts)
        tpr_est = bootstrap_rate_estimate(
            records, threshold, "tpr",
            replicates=bootstrap_replicates, alpha=alpha, seed=children[2 * i],
        )
        fpr_est = bootstrap_rate_estimate(
            records, threshold, "fpr",
            replicates=bootstrap_replicates, alpha=alpha, seed=children[2 * i + 1],
        )
        bound, tight = max_cv_bound(tpr_est, fpr_est)
        entry: dict = {
            "threshold": threshold,
            "selected_by": {mode: requested},
            "counts": {"tp": counts.tp, "fp": counts.fp, "tn": counts.tn, "fn": counts.fn},
            "tpr": _rate_dict(tpr_est),
            "fpr": _rate_dict(fpr_est),
            "cv_bound": {"value": bound, "tight": tight},
        }
        try:
            delta = max_uncertainty_closed_form(tpr_est, fpr_est)
            entry["max_uncertainty"] = {
                "delta": delta.delta,
                "eta_star": delta.eta_star,
                "r1": delta.r1,
                "r2": delta.r2,
            }
        except NumericError as exc:
            entry["max_uncertainty"] = {"error": str(exc)}
        per_eta = []
        for eta in eta_list:
            lower, upper, conf = confidence_product_interval(tpr_est, fpr_est, eta)
            per_eta.append(
                {
                    "eta": eta,
                    "dataset_p_plus": p_plus,
                    "precision": adjusted_precision(point, eta),
                    "f1": adjusted_f1(point, eta),
                    "precision_interval": {"lower": lower, "upper": upper, "confidence": conf},
                }
            )
        entry["per_eta"] = per_eta
        ops.append(entry)

    report = {
        "schema_version": SCHEMA_VERSION,
        "provenance": {
            "input_sha256": input_digest,
            "seed": seed,
            "tool_version": __version__,
        },
        "dataset": {
            "n": counts0.total,
            "n_positive": counts0.positives,
            "n_negative": counts0.negatives,
            "p_plus": p_plus,
            "imbalance_ratio": imbalance,
        },
        "requested_etas": eta_list,
        "operating_points": ops,
    }
    return report


def report_json(report: dict) -> str:
    """Canonical JSON rendering: sorted keys, indented, trailing newline."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
