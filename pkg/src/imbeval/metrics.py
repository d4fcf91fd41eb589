"""Prevalence-parameterized precision metrics and their plug-in estimators.

A classifier is represented by a score threshold (score >= threshold
predicts positive).  TPR and FPR are per-class rates and therefore do not
depend on the class mix of the test set; precision does, and is computed
here as an explicit function of an assumed positive-class prevalence via
Bayes' rule:

    precision(eta) = tpr * eta / (tpr * eta + fpr * (1 - eta))

Evaluated at the test set's own prevalence this resolves to the familiar
TP / (TP + FP).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DataError, UndefinedMetricError

__all__ = [
    "PredictionRecord",
    "ConfusionCounts",
    "OperatingPoint",
    "canonical_label",
    "make_records",
    "confusion_from_predictions",
    "rates_from_confusion",
    "dataset_prevalence",
    "adjusted_precision",
    "adjusted_f1",
    "check_prevalence",
]


def canonical_label(label: object) -> bool:
    """Map a raw label to True (positive) / False (negative).

    Accepts the {0, 1} and {-1, +1} conventions; anything else is rejected.
    Mixed-convention detection across a whole dataset is the caller's job
    (see :func:`make_records` and the CSV/JSONL ingestors).
    """
    if isinstance(label, bool):
        return label
    if label == 1:
        return True
    if label == 0 or label == -1:
        return False
    raise DataError(f"label must be one of -1, 0, 1; got {label!r}")


@dataclass(frozen=True)
class PredictionRecord:
    """One scored test sample: a real-valued score and a binary label."""

    score: float
    positive: bool

    def __post_init__(self) -> None:
        if not math.isfinite(self.score):
            raise DataError(f"score must be finite, got {self.score!r}")


def make_records(scores: Iterable[float], labels: Iterable[object]) -> list[PredictionRecord]:
    """Build records from parallel score/label sequences.

    Label conventions {0, 1} and {-1, +1} are both accepted but must not be
    mixed within one dataset (a 0 and a -1 appearing together is an error,
    since their intent is ambiguous).
    """
    scores = list(scores)
    labels = list(labels)
    if len(scores) != len(labels):
        raise DataError("scores and labels differ in length")
    saw_zero = any(lab == 0 and not isinstance(lab, bool) for lab in labels)
    saw_minus = any(lab == -1 for lab in labels)
    if saw_zero and saw_minus:
        raise DataError("mixed label conventions: dataset contains both 0 and -1")
    return [PredictionRecord(float(s), canonical_label(l)) for s, l in zip(scores, labels)]


@dataclass(frozen=True)
class ConfusionCounts:
    """TP/FP/TN/FN tally at one threshold."""

    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "tn", "fn"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise DataError(f"{name} must be a non-negative integer, got {v!r}")
        if self.total == 0:
            raise DataError("confusion counts sum to zero")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def positives(self) -> int:
        """Number of positive samples in the dataset (threshold-independent)."""
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        """Number of negative samples in the dataset (threshold-independent)."""
        return self.fp + self.tn


@dataclass(frozen=True)
class OperatingPoint:
    """A (TPR, FPR) pair; the prevalence-free summary of a thresholded classifier."""

    tpr: float
    fpr: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.tpr <= 1.0):
            raise DataError(f"tpr must lie in [0, 1], got {self.tpr!r}")
        if not (0.0 <= self.fpr <= 1.0):
            raise DataError(f"fpr must lie in [0, 1], got {self.fpr!r}")


def check_prevalence(eta: float, *, allow_endpoints: bool = False) -> float:
    """Validate a prevalence value.

    Band and curve computations require eta strictly inside (0, 1); the
    plain precision/F1 identities also accept the endpoints (where they
    degenerate to 0, 1, or an explicit 0/0 error).
    """
    eta = float(eta)
    lo_ok = eta > 0.0 or (allow_endpoints and eta == 0.0)
    hi_ok = eta < 1.0 or (allow_endpoints and eta == 1.0)
    if not (math.isfinite(eta) and lo_ok and hi_ok):
        kind = "[0, 1]" if allow_endpoints else "(0, 1)"
        raise UndefinedMetricError(f"prevalence must lie in {kind}, got {eta!r}")
    return eta


def confusion_from_predictions(
    records: Sequence[PredictionRecord], threshold: float
) -> ConfusionCounts:
    """Tally a confusion matrix with the rule: predict positive iff score >= threshold."""
    if not records:
        raise DataError("no records")
    tp = fp = tn = fn = 0
    for r in records:
        predicted = r.score >= threshold
        if r.positive:
            if predicted:
                tp += 1
            else:
                fn += 1
        else:
            if predicted:
                fp += 1
            else:
                tn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def rates_from_confusion(c: ConfusionCounts) -> OperatingPoint:
    """TPR = TP / (TP + FN), FPR = FP / (FP + TN)."""
    if c.positives == 0:
        raise UndefinedMetricError("rate undefined: dataset has no positive samples")
    if c.negatives == 0:
        raise UndefinedMetricError("rate undefined: dataset has no negative samples")
    return OperatingPoint(tpr=c.tp / c.positives, fpr=c.fp / c.negatives)


def dataset_prevalence(c: ConfusionCounts) -> tuple[float, float]:
    """Return (p_plus, imbalance_ratio) of the dataset behind the counts.

    p_plus is the positive fraction of all samples; the imbalance ratio is
    positives over negatives.
    """
    if c.positives == 0:
        raise UndefinedMetricError("rate undefined: dataset has no positive samples")
    if c.negatives == 0:
        raise UndefinedMetricError("rate undefined: dataset has no negative samples")
    return c.positives / c.total, c.positives / c.negatives


def adjusted_precision(op: OperatingPoint, eta: float) -> float:
    """Precision of `op` at an assumed positive-class prevalence `eta`.

    Defined whenever the denominator tpr*eta + fpr*(1-eta) is positive;
    otherwise the value is 0/0 and an error is raised rather than picking a
    convention.  Endpoints: eta = 1 gives 1.0 for any tpr > 0, eta = 0
    gives 0.0 for any fpr > 0.
    """
    eta = check_prevalence(eta, allow_endpoints=True)
    numerator = op.tpr * eta
    denominator = numerator + op.fpr * (1.0 - eta)
    if denominator == 0.0:
        raise UndefinedMetricError("precision undefined at this operating point")
    return numerator / denominator


def adjusted_f1(op: OperatingPoint, eta: float) -> float:
    """Harmonic mean of adjusted precision and recall (= tpr) at prevalence `eta`."""
    precision = adjusted_precision(op, eta)
    recall = op.tpr
    if precision + recall == 0.0:
        raise UndefinedMetricError("F1 undefined: precision and recall are both zero")
    return 2.0 * precision * recall / (precision + recall)
