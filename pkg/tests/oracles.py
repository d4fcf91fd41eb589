"""Independent oracles used to freeze expected values.

Everything here is deliberately written against different machinery than
the package (exact rational arithmetic, dense Riemann sampling, the
textbook binomial normal approximation) so the tests cross-check the
implementation rather than restating it.
"""

from __future__ import annotations

from fractions import Fraction
from statistics import NormalDist

import numpy as np

from imbeval import PredictionRecord


def exact_precision(tpr, fpr, eta) -> Fraction:
    """Bayes precision with exact rational arithmetic."""
    tpr, fpr, eta = Fraction(tpr), Fraction(fpr), Fraction(eta)
    return (tpr * eta) / (tpr * eta + fpr * (1 - eta))


def exact_f1(tpr, fpr, eta) -> Fraction:
    p = exact_precision(tpr, fpr, eta)
    r = Fraction(tpr)
    return 2 * p * r / (p + r)


def exact_companion_cv(known_cv, delta) -> Fraction:
    """Solve g(c1) * g(c2) = g(delta)**2 for c2, g(c) = (1-c)/(1+c), exactly."""
    known_cv, delta = Fraction(known_cv), Fraction(delta)
    k = ((1 - delta) / (1 + delta)) ** 2
    q = k * (1 + known_cv) / (1 - known_cv)
    return (1 - q) / (1 + q)


def dense_pr_auc(xs, ys, samples: int = 1_000_000) -> float:
    """Midpoint-Riemann area under the polyline through (xs, ys).

    Vertical segments (repeated x) contribute nothing; each positive-width
    segment is sampled in proportion to its width.
    """
    xs = list(xs)
    ys = list(ys)
    span = xs[-1] - xs[0]
    total = 0.0
    for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:]):
        dx = x1 - x0
        if dx <= 0.0:
            continue
        n = max(1, round(samples * dx / span)) if span > 0 else 1
        mids = (np.arange(n) + 0.5) / n
        values = y0 + (y1 - y0) * mids
        total += dx * float(values.mean())
    return total


def normal_halfwidth(rate: float, n: int, alpha: float) -> float:
    """Binomial normal-approximation CI half-width for a rate on n samples."""
    z = NormalDist().inv_cdf((1.0 + alpha) / 2.0)
    return z * (rate * (1.0 - rate) / n) ** 0.5


def random_records(rng: np.random.Generator, n_pos: int, n_neg: int, separation: float = 1.5):
    """Binormal test dataset with continuous (tie-free a.s.) scores."""
    pos = rng.normal(separation, 1.0, n_pos)
    neg = rng.standard_normal(n_neg)
    records = [PredictionRecord(float(s), True) for s in pos]
    records += [PredictionRecord(float(s), False) for s in neg]
    return records


def raise_positive_scores(records, delta: float):
    """Same dataset with every positive score shifted up: its ROC dominates the original."""
    return [
        PredictionRecord(r.score + delta, True) if r.positive else r
        for r in records
    ]


def best_precision_at_recall(curve, recall: float) -> float:
    """Highest precision among PR points achieving at least the given recall."""
    return max(y for x, y in zip(curve.x, curve.y) if x >= recall)
