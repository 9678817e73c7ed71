"""Slice- and lesion-level accuracy, ROC curves and AUC."""

from .classification import (
    THRESHOLD,
    LesionPrediction,
    Level,
    SlicePrediction,
    accuracy,
    aggregate_lesion,
    aggregate_lesions,
    classify,
)
from .roc import RocCurve, auc, brute_force_roc, mann_whitney_auc, roc_auc, roc_curve
from .exclusions import LesionRecord, apply_exclusions, is_eligible
from .export import (
    METRICS_COLUMNS,
    EvaluationSummary,
    MetricsRow,
    format_summary_table,
    read_score_dump,
    summarize,
    write_metrics_csv,
    write_roc_csv,
    write_score_dump,
)

__all__ = [
    "THRESHOLD",
    "LesionPrediction",
    "Level",
    "SlicePrediction",
    "accuracy",
    "aggregate_lesion",
    "aggregate_lesions",
    "classify",
    "RocCurve",
    "auc",
    "brute_force_roc",
    "mann_whitney_auc",
    "roc_auc",
    "roc_curve",
    "LesionRecord",
    "apply_exclusions",
    "is_eligible",
    "METRICS_COLUMNS",
    "EvaluationSummary",
    "MetricsRow",
    "format_summary_table",
    "read_score_dump",
    "summarize",
    "write_metrics_csv",
    "write_roc_csv",
    "write_score_dump",
]
