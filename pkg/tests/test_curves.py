import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from imbeval import (
    Curve,
    DataError,
    NumericError,
    OperatingPoint,
    adjusted_f1,
    binormal_roc,
    confusion_from_predictions,
    default_prevalence_grid,
    f1_curve,
    find_binormal_flip_pair,
    find_ordering_flip,
    make_records,
    operating_point_at_recall,
    p3_curve,
    pr_auc,
    pr_auc_curve,
    pr_curve,
    prevalence_grid,
    roc_from_predictions,
)
from oracles import (
    best_precision_at_recall,
    dense_pr_auc,
    exact_precision,
    raise_positive_scores,
    random_records,
)


def diagonal_roc(steps: int):
    pts = [OperatingPoint(i / steps, i / steps) for i in range(steps + 1)]
    thresholds = [math.inf] + [float(steps - i) for i in range(1, steps + 1)]
    from imbeval import RocCurve

    return RocCurve(points=tuple(pts), thresholds=tuple(thresholds))


# ---------------------------------------------------------------------------
# ROC construction


def test_roc_four_record_example():
    recs = make_records([0.9, 0.8, 0.7, 0.1], [1, -1, 1, -1])
    roc = roc_from_predictions(recs)
    assert [(p.fpr, p.tpr) for p in roc.points] == [
        (0.0, 0.0),
        (0.0, 0.5),
        (0.5, 0.5),
        (0.5, 1.0),
        (1.0, 1.0),
    ]
    assert roc.thresholds == (math.inf, 0.9, 0.8, 0.7, 0.1)


def test_roc_perfect_classifier_passes_through_corner():
    recs = make_records([3.0, 2.5, 2.0, 1.0, 0.5], [1, 1, 1, -1, -1])
    roc = roc_from_predictions(recs)
    assert OperatingPoint(1.0, 0.0) in roc.points


def test_roc_chance_classifier_stays_near_diagonal():
    rng = np.random.default_rng(7)
    scores = rng.random(4000)
    labels = rng.integers(0, 2, 4000)
    roc = roc_from_predictions(make_records(scores, labels))
    assert max(abs(p.tpr - p.fpr) for p in roc.points) < 0.08


def test_roc_requires_both_classes():
    with pytest.raises(DataError):
        roc_from_predictions(make_records([0.1, 0.2], [1, 1]))


def test_roc_tied_scores_move_atomically():
    recs = make_records([0.5, 0.5, 0.5, 0.9], [1, -1, 1, -1])
    roc = roc_from_predictions(recs)
    # one step for 0.9, one joint diagonal step for the three tied at 0.5
    assert [(p.fpr, p.tpr) for p in roc.points] == [(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)]


@given(st.integers(0, 2**31), st.floats(0.1, 3.0))
@settings(max_examples=30, deadline=None)
def test_roc_invariant_under_increasing_transform(seed, scale):
    rng = np.random.default_rng(seed)
    recs = random_records(rng, 12, 25)
    transformed = [
        type(r)(math.exp(scale * r.score) + 1.0, r.positive) for r in recs
    ]
    assert roc_from_predictions(recs).points == roc_from_predictions(transformed).points


# ---------------------------------------------------------------------------
# PR curves


def test_pr_curve_perfect_has_unit_precision_at_every_recall():
    recs = make_records([3.0, 2.5, 2.0, 1.0, 0.5], [1, 1, 1, -1, -1])
    curve = pr_curve(roc_from_predictions(recs), 0.01)
    for r in sorted(set(curve.x)):
        assert best_precision_at_recall(curve, r) == 1.0
    assert curve.dropped == 1
    assert curve.eta == 0.01


def test_pr_curve_diagonal_is_flat_at_prevalence():
    roc = diagonal_roc(10)
    curve = pr_curve(roc, 0.1)
    assert all(y == pytest.approx(0.1, rel=1e-12) for y in curve.y)


def test_pr_curve_pointwise_ordering_in_prevalence():
    rng = np.random.default_rng(11)
    roc = roc_from_predictions(random_records(rng, 30, 120))
    low = pr_curve(roc, 1e-3)
    high = pr_curve(roc, 1e-1)
    assert low.x == high.x
    assert all(a <= b + 1e-15 for a, b in zip(low.y, high.y))
    # strictly below whenever the point has both kinds of mass
    assert any(a < b for a, b in zip(low.y, high.y))


def test_pr_curve_at_dataset_prevalence_matches_confusion_counts():
    rng = np.random.default_rng(23)
    recs = random_records(rng, 17, 61)
    roc = roc_from_predictions(recs)
    p_plus = 17 / 78
    curve = pr_curve(roc, p_plus)
    assert len(curve) == len(roc.points) - 1
    for (recall, precision), threshold in zip(zip(curve.x, curve.y), roc.thresholds[1:]):
        c = confusion_from_predictions(recs, threshold)
        assert recall == c.tp / 17
        assert precision == pytest.approx(c.tp / (c.tp + c.fp), rel=1e-12)


def test_pr_curve_rejects_endpoint_prevalence():
    roc = diagonal_roc(4)
    with pytest.raises(NumericError):
        pr_curve(roc, 0.0)
    with pytest.raises(NumericError):
        pr_curve(roc, 1.0)


# ---------------------------------------------------------------------------
# Prevalence-indexed curves


def test_p3_curve_matches_exact_oracle_and_shape():
    grid = prevalence_grid(1e-6, 1.0 - 1e-9, 120)
    curve = p3_curve(OperatingPoint(0.6, 0.001), grid)
    assert curve.x_scale == "log10"
    assert curve.y_axis == "precision"
    assert all(b >= a for a, b in zip(curve.y, curve.y[1:]))
    assert curve.y[0] < 1e-3
    assert curve.y[-1] > 0.999
    for i in (0, 40, 80, len(grid) - 1):
        expected = exact_precision(
            Fraction(6, 10), Fraction(1, 1000), Fraction.from_float(grid[i])
        )
        assert curve.y[i] == pytest.approx(float(expected), rel=1e-12)


def test_p3_curve_zero_fpr_is_constant_one():
    grid = default_prevalence_grid()
    curve = p3_curve(OperatingPoint(0.42, 0.0), grid)
    assert set(curve.y) == {1.0}


def test_p3_curve_chance_level_is_identity():
    grid = default_prevalence_grid()
    curve = p3_curve(OperatingPoint(0.3, 0.3), grid)
    assert all(y == pytest.approx(e, rel=1e-12) for e, y in zip(curve.x, curve.y))


def test_f1_curve_perfect_is_constant_one():
    curve = f1_curve(OperatingPoint(1.0, 0.0), default_prevalence_grid())
    assert set(curve.y) == {1.0}


def test_f1_curve_chance_level_formula():
    # precision = eta for a chance-level point, so F1 = 2*eta*r/(eta + r)
    r = 0.35
    grid = default_prevalence_grid()
    curve = f1_curve(OperatingPoint(r, r), grid)
    for eta, y in zip(curve.x, curve.y):
        assert y == pytest.approx(2 * eta * r / (eta + r), rel=1e-12)


def test_f1_ordering_flip_for_contrasting_operating_points():
    op_a = OperatingPoint(0.9, 1e-2)
    op_b = OperatingPoint(0.5, 1e-4)
    grid = prevalence_grid(1e-5, 0.5, 100)
    eta_star = find_ordering_flip(op_a, op_b, grid, "f1_at_op")
    assert eta_star is not None
    assert 1e-4 < eta_star < 1e-1
    below = adjusted_f1(op_a, eta_star * 0.8) - adjusted_f1(op_b, eta_star * 0.8)
    above = adjusted_f1(op_a, eta_star * 1.25) - adjusted_f1(op_b, eta_star * 1.25)
    assert below * above < 0


# ---------------------------------------------------------------------------
# PR-AUC


def perfect_records(n_pos: int, n_neg: int):
    scores = [float(i) for i in range(n_pos + n_neg, 0, -1)]
    labels = [1] * n_pos + [-1] * n_neg
    return make_records(scores, labels)


def test_pr_auc_perfect_approaches_one():
    # Integration runs from the smallest emitted recall (1/n_pos for a
    # perfect staircase), so the exact value is 1 - 1/n_pos.
    roc = roc_from_predictions(perfect_records(200, 100))
    for eta in (1e-4, 0.3):
        value = pr_auc(roc, eta)
        assert value == pytest.approx(1.0 - 1.0 / 200, rel=1e-12)
        assert value == pytest.approx(1.0, abs=0.01)


def test_pr_auc_diagonal_is_prevalence_times_span():
    roc = diagonal_roc(1000)
    eta = 0.07
    # flat precision eta over recall [1/1000, 1]
    assert pr_auc(roc, eta) == pytest.approx(eta * (1 - 1e-3), rel=1e-12)
    assert pr_auc(roc, eta) == pytest.approx(eta, rel=2e-3)


def test_pr_auc_four_record_example_against_dense_oracle():
    recs = make_records([0.9, 0.8, 0.7, 0.1], [1, -1, 1, -1])
    roc = roc_from_predictions(recs)
    value = pr_auc(roc, 0.5)
    assert value == pytest.approx(7 / 24, rel=1e-12)
    curve = pr_curve(roc, 0.5)
    assert value == pytest.approx(dense_pr_auc(curve.x, curve.y), abs=1e-6)


@given(st.integers(0, 2**31), st.floats(1e-3, 0.5))
@settings(max_examples=25, deadline=None)
def test_pr_auc_matches_dense_oracle_on_random_staircases(seed, eta):
    rng = np.random.default_rng(seed)
    roc = roc_from_predictions(random_records(rng, rng.integers(3, 25), rng.integers(5, 80)))
    curve = pr_curve(roc, eta)
    assert pr_auc(roc, eta) == pytest.approx(dense_pr_auc(curve.x, curve.y, 200_000), abs=1e-6)


def test_pr_auc_monotone_in_prevalence():
    rng = np.random.default_rng(5)
    roc = roc_from_predictions(random_records(rng, 20, 90))
    values = [pr_auc(roc, e) for e in (1e-4, 1e-3, 1e-2, 1e-1, 0.4)]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))


def test_pr_auc_needs_two_points():
    # single positive, single negative, tied score: only one non-dropped point
    recs = make_records([0.5, 0.5], [1, -1])
    roc = roc_from_predictions(recs)
    with pytest.raises(NumericError):
        pr_auc(roc, 0.3)


def test_pr_auc_curve_trivials():
    perfect = roc_from_predictions(perfect_records(500, 100))
    grid = prevalence_grid(1e-4, 0.4, 25)
    curve = pr_auc_curve(perfect, grid)
    assert all(y == pytest.approx(1.0 - 1.0 / 500, rel=1e-12) for y in curve.y)

    diag = diagonal_roc(2000)
    curve = pr_auc_curve(diag, grid)
    assert all(y == pytest.approx(e, rel=1e-3) for e, y in zip(curve.x, curve.y))


# ---------------------------------------------------------------------------
# Dominance transfer


@given(st.integers(0, 2**31))
@settings(max_examples=20, deadline=None)
def test_roc_dominance_transfers_to_pr_dominance(seed):
    rng = np.random.default_rng(seed)
    base = random_records(rng, int(rng.integers(5, 30)), int(rng.integers(20, 120)))
    raised = raise_positive_scores(base, float(rng.uniform(0.2, 1.0)))
    roc_b = roc_from_predictions(base)
    roc_a = roc_from_predictions(raised)
    assert roc_a.dominates(roc_b)
    for eta in (1e-3, 0.2):
        curve_a = pr_curve(roc_a, eta)
        curve_b = pr_curve(roc_b, eta)
        for r in sorted(set(curve_b.x)):
            assert best_precision_at_recall(curve_a, r) >= best_precision_at_recall(
                curve_b, r
            ) - 1e-12
        assert pr_auc(roc_a, eta) >= pr_auc(roc_b, eta) - 1e-12


# ---------------------------------------------------------------------------
# Ordering flips


def test_flip_identical_inputs_gives_none():
    roc = binormal_roc(2.0, 2.0)
    assert find_ordering_flip(roc, roc, default_prevalence_grid(), "pr_auc") is None


def test_flip_dominating_pair_gives_none():
    rng = np.random.default_rng(3)
    base = random_records(rng, 15, 60)
    roc_b = roc_from_predictions(base)
    roc_a = roc_from_predictions(raise_positive_scores(base, 0.8))
    assert find_ordering_flip(roc_a, roc_b, default_prevalence_grid(), "pr_auc") is None


def test_binormal_flip_pair_crossing_verified_both_sides():
    grid = default_prevalence_grid()
    roc_a, roc_b, eta_star = find_binormal_flip_pair(grid)
    assert 1e-3 < eta_star < 1e-1
    below = pr_auc(roc_a, eta_star * 0.8) - pr_auc(roc_b, eta_star * 0.8)
    above = pr_auc(roc_a, eta_star * 1.25) - pr_auc(roc_b, eta_star * 1.25)
    assert below * above < 0


def test_flip_accepts_roc_inputs_for_f1():
    grid = default_prevalence_grid()
    roc_a, roc_b, _ = find_binormal_flip_pair(grid)
    eta_star = find_ordering_flip(roc_a, roc_b, grid, "f1_at_op", at_recall=0.7)
    op_a = operating_point_at_recall(roc_a, 0.7)
    op_b = operating_point_at_recall(roc_b, 0.7)
    assert eta_star == find_ordering_flip(op_a, op_b, grid, "f1_at_op")


# ---------------------------------------------------------------------------
# Containers and grids


def test_curve_prevalence_axis_must_strictly_increase():
    with pytest.raises(DataError):
        Curve(x=(0.1, 0.1), y=(0.5, 0.6), x_axis="prevalence", y_axis="precision")
    # recall axis may repeat values (PR staircases do)
    Curve(x=(0.5, 0.5, 1.0), y=(1.0, 0.5, 0.6), x_axis="recall", y_axis="precision")


def test_roc_curve_validation():
    from imbeval import RocCurve

    with pytest.raises(DataError):
        RocCurve(points=(OperatingPoint(0, 0),), thresholds=(math.inf,))
    with pytest.raises(DataError):
        RocCurve(
            points=(OperatingPoint(0.1, 0.1), OperatingPoint(1, 1)),
            thresholds=(math.inf, 0.0),
        )


def test_prevalence_grid_bounds_and_extras():
    grid = default_prevalence_grid(extra=[0.123])
    assert len(grid) == 201
    assert grid[0] == 1e-6 and grid[-1] == 0.5
    assert 0.123 in grid
    assert all(b > a for a, b in zip(grid, grid[1:]))
    with pytest.raises(NumericError):
        prevalence_grid(0.0, 0.5, 10)
    with pytest.raises(NumericError):
        prevalence_grid(0.5, 0.1, 10)


def test_operating_point_at_recall():
    recs = make_records([0.9, 0.8, 0.7, 0.1], [1, -1, 1, -1])
    roc = roc_from_predictions(recs)
    assert operating_point_at_recall(roc, 0.4) == OperatingPoint(0.5, 0.0)
    assert operating_point_at_recall(roc, 0.75) == OperatingPoint(1.0, 0.5)
    assert operating_point_at_recall(roc, 1.0).tpr == 1.0


def test_binormal_roc_basic_shape():
    roc = binormal_roc(1.5)
    assert roc.points[0] == OperatingPoint(0.0, 0.0)
    assert roc.points[-1] == OperatingPoint(1.0, 1.0)
    interior = [p for p in roc.points if 0.05 < p.fpr < 0.95]
    assert all(p.tpr > p.fpr for p in interior)
