"""ROC/PR/prevalence curves and classifier-comparison utilities.

All curve builders are pure functions.  PR curves are always computed at an
explicit prevalence: a single ROC corresponds to a different PR curve for
every assumed class mix, which is the whole point of carrying the
prevalence around instead of baking the test set's imbalance into the
metric.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DataError, NumericError, UndefinedMetricError
from .metrics import OperatingPoint, PredictionRecord, adjusted_f1, adjusted_precision, check_prevalence

__all__ = [
    "RocCurve",
    "Curve",
    "roc_from_predictions",
    "pr_curve",
    "p3_curve",
    "f1_curve",
    "pr_auc",
    "pr_auc_curve",
    "find_ordering_flip",
    "binormal_roc",
    "find_binormal_flip_pair",
    "operating_point_at_recall",
    "prevalence_grid",
    "default_prevalence_grid",
]


@dataclass(frozen=True)
class RocCurve:
    """Empirical ROC staircase: operating points sorted by FPR, plus their thresholds.

    Always contains the (0, 0) and (1, 1) anchors (thresholds +inf and the
    minimum score); both coordinates are non-decreasing along the curve.
    """

    points: tuple[OperatingPoint, ...]
    thresholds: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.points) != len(self.thresholds):
            raise DataError("points and thresholds differ in length")
        if len(self.points) < 2:
            raise DataError("a ROC curve needs at least the (0,0) and (1,1) anchors")
        first, last = self.points[0], self.points[-1]
        if (first.tpr, first.fpr) != (0.0, 0.0) or (last.tpr, last.fpr) != (1.0, 1.0):
            raise DataError("ROC curve must start at (0,0) and end at (1,1)")
        for a, b in zip(self.points, self.points[1:]):
            if b.fpr < a.fpr or b.tpr < a.tpr:
                raise DataError("ROC points must be non-decreasing in both tpr and fpr")

    def tpr_at(self, fpr: float) -> float:
        """Step-interpolated TPR: the largest TPR achieved at FPR <= `fpr`."""
        fprs = [p.fpr for p in self.points]
        i = bisect_right(fprs, fpr) - 1
        if i < 0:
            return 0.0
        return self.points[i].tpr

    def dominates(self, other: "RocCurve") -> bool:
        """True if this staircase is pointwise >= `other` at every FPR."""
        breakpoints = sorted({p.fpr for p in self.points} | {p.fpr for p in other.points})
        return all(self.tpr_at(f) >= other.tpr_at(f) for f in breakpoints)


@dataclass(frozen=True)
class Curve:
    """An ordered (x, y) series with axis semantics.

    `x` is non-decreasing; when the x-axis is a prevalence grid it is
    strictly increasing.  PR curves legitimately repeat recall values
    (vertical precision segments of the staircase), hence the weaker
    requirement in general.  `eta` records the prevalence a PR curve was
    computed at; `dropped` counts points omitted because their precision
    was 0/0.
    """

    x: tuple[float, ...]
    y: tuple[float, ...]
    x_axis: str
    y_axis: str
    x_scale: str = "linear"
    eta: float | None = None
    dropped: int = 0

    def __post_init__(self) -> None:
        if len(self.x) != len(self.y):
            raise DataError("curve x and y differ in length")
        if self.x_scale not in ("linear", "log10"):
            raise DataError(f"unknown x_scale {self.x_scale!r}")
        strict = self.x_axis == "prevalence"
        for a, b in zip(self.x, self.x[1:]):
            if b < a or (strict and b == a):
                order = "strictly increasing" if strict else "non-decreasing"
                raise DataError(f"curve x values must be {order}")

    def __len__(self) -> int:
        return len(self.x)


def prevalence_grid(start: float, stop: float, num: int, *, extra: Sequence[float] = ()) -> tuple[float, ...]:
    """Log-spaced prevalence grid over [start, stop], merged with `extra` values.

    All values must lie in (0, 1); the result is strictly increasing.
    """
    if not (0.0 < start < stop < 1.0):
        raise NumericError("grid bounds must satisfy 0 < start < stop < 1")
    if num < 2:
        raise NumericError("grid needs at least 2 points")
    values = set(np.logspace(math.log10(start), math.log10(stop), num).tolist())
    for e in extra:
        values.add(check_prevalence(e))
    return tuple(sorted(values))


def default_prevalence_grid(*, extra: Sequence[float] = ()) -> tuple[float, ...]:
    """200 points, log-spaced over [1e-6, 0.5], plus any dataset prevalences of interest."""
    return prevalence_grid(1e-6, 0.5, 200, extra=extra)


def _check_grid(etas: Sequence[float]) -> tuple[float, ...]:
    etas = tuple(float(e) for e in etas)
    if not etas:
        raise NumericError("prevalence grid is empty")
    for e in etas:
        check_prevalence(e)
    for a, b in zip(etas, etas[1:]):
        if b <= a:
            raise NumericError("prevalence grid must be strictly increasing")
    return etas


def roc_from_predictions(records: Sequence[PredictionRecord]) -> RocCurve:
    """Build the empirical ROC staircase from scored, labeled records.

    One operating point per distinct score value (threshold = that score,
    predict positive iff score >= threshold) plus the (0, 0) anchor at
    threshold +inf.  Records sharing a score move across the threshold
    together.
    """
    if not records:
        raise DataError("no records")
    scores = np.fromiter((r.score for r in records), dtype=float, count=len(records))
    labels = np.fromiter((r.positive for r in records), dtype=bool, count=len(records))
    n_pos = int(labels.sum())
    n_neg = len(records) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("ROC needs at least one positive and one negative record")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = labels[order].astype(np.int64)

    # Last index of each tied-score group, descending in score.
    distinct = np.nonzero(np.diff(sorted_scores))[0]
    group_end = np.concatenate([distinct, [len(records) - 1]])

    tp = np.cumsum(sorted_pos)[group_end]
    predicted = group_end + 1
    fp = predicted - tp

    points = [OperatingPoint(0.0, 0.0)]
    thresholds = [math.inf]
    for t, f, s in zip(tp, fp, sorted_scores[group_end]):
        points.append(OperatingPoint(tpr=float(t) / n_pos, fpr=float(f) / n_neg))
        thresholds.append(float(s))
    return RocCurve(points=tuple(points), thresholds=tuple(thresholds))


def pr_curve(roc: RocCurve, eta: float) -> Curve:
    """Precision-recall curve of `roc` under an assumed prevalence `eta`.

    Each ROC point maps to (recall = tpr, precision at eta).  Points where
    precision is 0/0 (the all-negative anchor) are dropped and counted in
    the result's `dropped` field.
    """
    eta = check_prevalence(eta)
    xs: list[float] = []
    ys: list[float] = []
    dropped = 0
    for p in roc.points:
        if p.tpr == 0.0 and p.fpr == 0.0:
            dropped += 1
            continue
        xs.append(p.tpr)
        ys.append(adjusted_precision(p, eta))
    return Curve(
        x=tuple(xs), y=tuple(ys), x_axis="recall", y_axis="precision", eta=eta, dropped=dropped
    )


def p3_curve(op: OperatingPoint, etas: Sequence[float]) -> Curve:
    """Precision of one operating point across a prevalence grid (log x-axis)."""
    etas = _check_grid(etas)
    ys = tuple(adjusted_precision(op, e) for e in etas)
    return Curve(x=etas, y=ys, x_axis="prevalence", y_axis="precision", x_scale="log10")


def f1_curve(op: OperatingPoint, etas: Sequence[float]) -> Curve:
    """F1 of one operating point across a prevalence grid (log x-axis)."""
    etas = _check_grid(etas)
    ys = tuple(adjusted_f1(op, e) for e in etas)
    return Curve(x=etas, y=ys, x_axis="prevalence", y_axis="f1", x_scale="log10")


def pr_auc(roc: RocCurve, eta: float) -> float:
    """Area under the PR curve at prevalence `eta`.

    Trapezoidal integration over recall across the emitted PR points, from
    the smallest emitted recall up to 1; repeated recall values (vertical
    precision jumps) contribute zero width.  The result is clamped to
    [0, 1].
    """
    curve = pr_curve(roc, eta)
    if len(curve) < 2:
        raise NumericError("PR-AUC needs at least 2 PR points")
    area = 0.0
    for x0, x1, y0, y1 in zip(curve.x, curve.x[1:], curve.y, curve.y[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return min(1.0, max(0.0, area))


def pr_auc_curve(roc: RocCurve, etas: Sequence[float]) -> Curve:
    """PR-AUC of `roc` at each prevalence of the grid (log x-axis)."""
    etas = _check_grid(etas)
    ys = tuple(pr_auc(roc, e) for e in etas)
    return Curve(x=etas, y=ys, x_axis="prevalence", y_axis="pr_auc", x_scale="log10")


def operating_point_at_recall(roc: RocCurve, recall: float) -> OperatingPoint:
    """First ROC point reaching at least the requested recall."""
    if not (0.0 <= recall <= 1.0):
        raise NumericError(f"recall must lie in [0, 1], got {recall!r}")
    for p in roc.points:
        if p.tpr >= recall:
            return p
    return roc.points[-1]


def _normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def binormal_roc(positive_mean: float, positive_std: float = 1.0, n_thresholds: int = 512) -> RocCurve:
    """Analytic ROC of a score model: negatives ~ N(0,1), positives ~ N(mean, std).

    Deterministic and smooth; two parameters are enough to produce ROC
    curves that cross, which is what the ordering-flip search needs.
    """
    if positive_std <= 0.0:
        raise NumericError("positive_std must be positive")
    if n_thresholds < 2:
        raise NumericError("need at least 2 thresholds")
    lo = min(-8.0, positive_mean - 8.0 * positive_std)
    hi = max(8.0, positive_mean + 8.0 * positive_std)
    points = [OperatingPoint(0.0, 0.0)]
    thresholds = [math.inf]
    prev_tpr, prev_fpr = 0.0, 0.0
    for t in np.linspace(hi, lo, n_thresholds):
        tpr = _normal_cdf((positive_mean - t) / positive_std)
        fpr = _normal_cdf(-t)
        tpr = max(tpr, prev_tpr)
        fpr = max(fpr, prev_fpr)
        points.append(OperatingPoint(tpr=tpr, fpr=fpr))
        thresholds.append(float(t))
        prev_tpr, prev_fpr = tpr, fpr
    points.append(OperatingPoint(1.0, 1.0))
    thresholds.append(-math.inf)
    return RocCurve(points=tuple(points), thresholds=tuple(thresholds))


def _metric_functions(
    a: object, b: object, metric: str, at_recall: float | None
) -> tuple[Callable[[float], float], Callable[[float], float]]:
    if metric == "pr_auc":
        if not isinstance(a, RocCurve) or not isinstance(b, RocCurve):
            raise NumericError("pr_auc comparison needs two RocCurve inputs")
        return (lambda e: pr_auc(a, e)), (lambda e: pr_auc(b, e))
    if metric == "f1_at_op":
        if isinstance(a, RocCurve):
            a = operating_point_at_recall(a, 0.5 if at_recall is None else at_recall)
        if isinstance(b, RocCurve):
            b = operating_point_at_recall(b, 0.5 if at_recall is None else at_recall)
        if not isinstance(a, OperatingPoint) or not isinstance(b, OperatingPoint):
            raise NumericError("f1_at_op comparison needs OperatingPoint or RocCurve inputs")
        return (lambda e: adjusted_f1(a, e)), (lambda e: adjusted_f1(b, e))
    raise NumericError(f"unknown comparison metric {metric!r}")


def find_ordering_flip(
    a: object,
    b: object,
    etas: Sequence[float],
    metric: str = "pr_auc",
    *,
    at_recall: float | None = None,
    rel_tol: float = 1e-6,
) -> float | None:
    """Prevalence at which the ranking of two classifiers under `metric` flips.

    Scans the grid for a sign change of metric(a) - metric(b) between
    adjacent points with nonzero difference, then refines by bisection down
    to the requested relative tolerance.  Returns None when no sign change
    occurs on the grid (identical classifiers, or one dominating the other).

    `metric` is "pr_auc" (inputs are RocCurves) or "f1_at_op" (inputs are
    OperatingPoints, or RocCurves from which the point at `at_recall` is
    taken).
    """
    etas = _check_grid(etas)
    fa, fb = _metric_functions(a, b, metric, at_recall)

    def diff(e: float) -> float:
        try:
            return fa(e) - fb(e)
        except UndefinedMetricError:
            return math.nan

    values = [(e, diff(e)) for e in etas]
    signed = [(e, d) for e, d in values if not math.isnan(d) and d != 0.0]
    for (e_lo, d_lo), (e_hi, d_hi) in zip(signed, signed[1:]):
        if (d_lo > 0.0) == (d_hi > 0.0):
            continue
        lo, hi = e_lo, e_hi
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo <= rel_tol * mid:
                return mid
            d_mid = diff(mid)
            if math.isnan(d_mid) or d_mid == 0.0:
                return mid
            if (d_mid > 0.0) == (d_lo > 0.0):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    return None


_FLIP_CANDIDATES: tuple[tuple[float, float], ...] = (
    (2.0, 2.0),
    (2.5, 1.0),
    (2.5, 3.0),
    (3.0, 1.0),
    (1.5, 1.0),
)


def find_binormal_flip_pair(
    etas: Sequence[float],
    candidates: Sequence[tuple[float, float]] = _FLIP_CANDIDATES,
) -> tuple[RocCurve, RocCurve, float]:
    """Search binormal parameter pairs for two ROCs whose PR-AUC ordering flips.

    Returns the first (roc_a, roc_b, crossing prevalence) found over the
    candidate (positive_mean, positive_std) parameters.
    """
    rocs = [binormal_roc(mean, std) for mean, std in candidates]
    for i, roc_a in enumerate(rocs):
        for roc_b in rocs[i + 1 :]:
            eta_star = find_ordering_flip(roc_a, roc_b, etas, "pr_auc")
            if eta_star is not None:
                return roc_a, roc_b, eta_star
    raise NumericError("no PR-AUC ordering flip found among candidate ROC pairs")
