"""Subsampling-error study on synthetic scores.

Forcing a test set to a target imbalance by throwing away negatives is a
common but harmful practice: every random subsample yields a different PR
curve, while adjusting the precision of the full dataset to the target
prevalence is exact and deterministic.  This module generates synthetic
binormal scores and quantifies the spread of subsampled PR curves against
the adjusted curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curves import Curve, pr_curve, roc_from_predictions
from .errors import NumericError
from .metrics import PredictionRecord

__all__ = [
    "SyntheticDatasetSpec",
    "SubsampleStudyResult",
    "generate_synthetic",
    "subsample_study",
]


@dataclass(frozen=True)
class SyntheticDatasetSpec:
    """Binormal score model: negatives ~ N(0, 1), positives ~ N(mean, std)."""

    n_positive: int
    n_negative: int
    positive_mean: float
    positive_std: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_positive < 1 or self.n_negative < 1:
            raise NumericError("both class sizes must be at least 1")
        if self.positive_std <= 0.0:
            raise NumericError("positive_std must be positive")

    @property
    def p_plus(self) -> float:
        return self.n_positive / (self.n_positive + self.n_negative)


def generate_synthetic(spec: SyntheticDatasetSpec) -> list[PredictionRecord]:
    """Draw scores for the spec; positives first, then negatives.

    Deterministic for a fixed seed, with class sizes exactly as requested.
    """
    rng = np.random.default_rng(spec.seed)
    pos = rng.normal(spec.positive_mean, spec.positive_std, spec.n_positive)
    neg = rng.standard_normal(spec.n_negative)
    records = [PredictionRecord(float(s), True) for s in pos]
    records += [PredictionRecord(float(s), False) for s in neg]
    return records


@dataclass(frozen=True)
class SubsampleStudyResult:
    """Per-recall spread of subsampled PR curves vs the adjusted full-data curve.

    The quantile arrays are aligned with `recall_grid`; at every grid point
    minimum <= q25 <= median <= q75 <= maximum.
    """

    target_eta: float
    adjusted_curve: Curve
    recall_grid: tuple[float, ...]
    minimum: tuple[float, ...]
    q25: tuple[float, ...]
    median: tuple[float, ...]
    q75: tuple[float, ...]
    maximum: tuple[float, ...]
    replicate_curves: tuple[Curve, ...]
    kept_negatives: int

    def __post_init__(self) -> None:
        lengths = {len(self.recall_grid), len(self.minimum), len(self.q25),
                   len(self.median), len(self.q75), len(self.maximum)}
        if lengths != {len(self.recall_grid)}:
            raise NumericError("quantile arrays must match the recall grid length")
        for lo, a, m, b, hi in zip(self.minimum, self.q25, self.median, self.q75, self.maximum):
            if not (lo <= a <= m <= b <= hi):
                raise NumericError("quantile bands out of order")

    @property
    def replicate_count(self) -> int:
        return len(self.replicate_curves)

    @property
    def iqr_width(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.q25, self.q75))


def _step_sample(xs: Sequence[float], ys: Sequence[float], grid: np.ndarray) -> np.ndarray:
    """Last-value-carried step interpolation; grid points below xs[0] take ys[0]."""
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    idx = np.searchsorted(xs, grid, side="right") - 1
    return ys[np.clip(idx, 0, len(xs) - 1)]


def subsample_study(
    records: Sequence[PredictionRecord],
    target_eta: float,
    replicates: int,
    recall_grid: Sequence[float],
    seed: int | np.random.SeedSequence = 0,
    *,
    workers: int = 1,
) -> SubsampleStudyResult:
    """Compare adjusted full-data precision against subsampled PR curves.

    Each replicate keeps every positive and a uniform without-replacement
    subset of negatives sized so the replicate's prevalence matches
    `target_eta` (rounded to the nearest count); its PR curve is computed
    at its own empirical prevalence and sampled onto `recall_grid` by step
    interpolation.  The adjusted curve is the full dataset's PR curve at
    `target_eta`.  Replicates draw from seed substreams spawned from
    `seed`, so results are identical across runs and worker counts.
    """
    if replicates < 2:
        raise NumericError("need at least 2 replicates")
    grid = np.asarray([float(r) for r in recall_grid], dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0.0) or grid[0] <= 0.0 or grid[-1] > 1.0:
        raise NumericError("recall grid must be strictly increasing within (0, 1]")

    positives = [r for r in records if r.positive]
    negatives = [r for r in records if not r.positive]
    n_pos, n_neg = len(positives), len(negatives)
    if n_pos == 0 or n_neg == 0:
        raise NumericError("study needs both classes present")
    p_plus = n_pos / (n_pos + n_neg)
    if not (p_plus < target_eta < 1.0):
        raise NumericError(
            f"cannot reach target prevalence {target_eta!r} by removing negatives "
            f"from a dataset with prevalence {p_plus!r}"
        )
    n_keep = round(n_pos * (1.0 - target_eta) / target_eta)
    n_keep = min(n_keep, n_neg)
    if n_keep < 1:
        raise NumericError("target prevalence keeps no negatives")

    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(replicates)
    replicate_p_plus = n_pos / (n_pos + n_keep)

    def one(child: np.random.SeedSequence) -> Curve:
        rng = np.random.default_rng(child)
        chosen = rng.choice(n_neg, size=n_keep, replace=False)
        subset = positives + [negatives[i] for i in chosen]
        return pr_curve(roc_from_predictions(subset), replicate_p_plus)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            curves = list(pool.map(one, children))
    else:
        curves = [one(c) for c in children]

    sampled = np.vstack([_step_sample(c.x, c.y, grid) for c in curves])
    q = np.quantile(sampled, [0.0, 0.25, 0.5, 0.75, 1.0], axis=0)

    adjusted = pr_curve(roc_from_predictions(list(records)), target_eta)
    return SubsampleStudyResult(
        target_eta=float(target_eta),
        adjusted_curve=adjusted,
        recall_grid=tuple(grid.tolist()),
        minimum=tuple(q[0].tolist()),
        q25=tuple(q[1].tolist()),
        median=tuple(q[2].tolist()),
        q75=tuple(q[3].tolist()),
        maximum=tuple(q[4].tolist()),
        replicate_curves=tuple(curves),
        kept_negatives=n_keep,
    )
