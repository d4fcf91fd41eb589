"""Classifier evaluation under non-constant class imbalance.

Precision-family metrics as explicit functions of the positive-class
prevalence, prevalence-adjusted PR/F1/PR-AUC curves, propagation of
finite-test-set TPR/FPR uncertainty into precision bands, and a
subsampling study showing why adjusting metrics beats throwing data away.
"""

from ._version import __version__
from .errors import (
    DataError,
    EvaluationError,
    NumericError,
    PreconditionError,
    UndefinedMetricError,
)
from .metrics import (
    ConfusionCounts,
    OperatingPoint,
    PredictionRecord,
    adjusted_f1,
    adjusted_precision,
    confusion_from_predictions,
    dataset_prevalence,
    make_records,
    rates_from_confusion,
)
from .curves import (
    Curve,
    RocCurve,
    binormal_roc,
    default_prevalence_grid,
    f1_curve,
    find_binormal_flip_pair,
    find_ordering_flip,
    operating_point_at_recall,
    p3_curve,
    pr_auc,
    pr_auc_curve,
    pr_curve,
    prevalence_grid,
    roc_from_predictions,
)
from .uncertainty import (
    DeltaResult,
    PrecisionBand,
    RateEstimate,
    bootstrap_rate_estimate,
    confidence_product_interval,
    hoeffding_sample_size,
    max_cv_bound,
    max_uncertainty_closed_form,
    max_uncertainty_numeric,
    precision_band,
    solve_companion_cv,
)
from .simulation import (
    SubsampleStudyResult,
    SyntheticDatasetSpec,
    generate_synthetic,
    subsample_study,
)
from .io import build_report, emit_curve, ingest_predictions, parse_curve_csv, report_json

__all__ = [
    "__version__",
    "EvaluationError",
    "DataError",
    "NumericError",
    "UndefinedMetricError",
    "PreconditionError",
    "PredictionRecord",
    "ConfusionCounts",
    "OperatingPoint",
    "make_records",
    "confusion_from_predictions",
    "rates_from_confusion",
    "dataset_prevalence",
    "adjusted_precision",
    "adjusted_f1",
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
    "RateEstimate",
    "PrecisionBand",
    "DeltaResult",
    "precision_band",
    "max_uncertainty_closed_form",
    "max_uncertainty_numeric",
    "max_cv_bound",
    "confidence_product_interval",
    "solve_companion_cv",
    "bootstrap_rate_estimate",
    "hoeffding_sample_size",
    "SyntheticDatasetSpec",
    "SubsampleStudyResult",
    "generate_synthetic",
    "subsample_study",
    "ingest_predictions",
    "emit_curve",
    "parse_curve_csv",
    "build_report",
    "report_json",
]
