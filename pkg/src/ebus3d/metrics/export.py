"""Metric summaries and their CSV exports."""

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from ..core.errors import MetricsError
from ..core.types import Label
from .classification import THRESHOLD, Level, LesionPrediction, SlicePrediction, accuracy, aggregate_lesions
from .roc import RocCurve, auc, roc_curve

logger = logging.getLogger(__name__)

METRICS_COLUMNS = ("level", "model", "accuracy", "auc", "n")
ROC_COLUMNS = ("fpr", "tpr")
SCORE_COLUMNS = ("lesion_id", "slice_id", "score")


@dataclass(frozen=True)
class MetricsRow:
    level: Level
    model: str
    accuracy: float
    auc: float
    n: int


@dataclass
class EvaluationSummary:
    rows: List[MetricsRow]
    slice_roc: Optional[RocCurve]
    lesion_roc: Optional[RocCurve]
    lesions: List[LesionPrediction]


def _curve_or_none(scores: Sequence[float], labels: Sequence[Label], level: Level) -> Optional[RocCurve]:
    if len(set(labels)) < 2:
        logger.warning("%s-level ROC undefined: only one class present", level.value)
        return None
    return roc_curve(scores, labels)


def summarize(slices: Sequence[SlicePrediction], model: str, threshold: float = THRESHOLD) -> EvaluationSummary:
    """Slice- and lesion-level accuracy and AUC; AUC is nan when a level holds a single class."""
    if not slices:
        raise MetricsError("no slice predictions to summarize")
    lesions = aggregate_lesions(slices)
    slice_roc = _curve_or_none([s.score for s in slices], [s.label for s in slices], Level.SLICE)
    lesion_roc = _curve_or_none([p.score for p in lesions], [p.label for p in lesions], Level.LESION)
    slice_auc = auc(slice_roc) if slice_roc else math.nan
    lesion_auc = auc(lesion_roc) if lesion_roc else math.nan
    rows = [
        MetricsRow(Level.SLICE, model, accuracy(slices, Level.SLICE, threshold), slice_auc, len(slices)),
        MetricsRow(Level.LESION, model, accuracy(lesions, Level.LESION, threshold), lesion_auc, len(lesions)),
    ]
    return EvaluationSummary(rows, slice_roc, lesion_roc, lesions)


def _fmt(value: float) -> str:
    return "nan" if math.isnan(value) else f"{value:.6f}"


def write_metrics_csv(path: Union[str, Path], rows: Sequence[MetricsRow]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(METRICS_COLUMNS)
        for row in rows:
            writer.writerow([row.level.value, row.model, _fmt(row.accuracy), _fmt(row.auc), row.n])
    return path


def write_roc_csv(path: Union[str, Path], curve: Optional[RocCurve]) -> Path:
    """One (fpr, tpr) point per row in sweep order; header only when the curve is undefined."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(ROC_COLUMNS)
        if curve is not None:
            writer.writerows((repr(f), repr(t)) for f, t in curve.points)
    return path


def write_score_dump(path: Union[str, Path], slices: Sequence[SlicePrediction]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SCORE_COLUMNS)
        for s in sorted(slices, key=lambda s: (s.lesion_id, s.slice_id)):
            writer.writerow([s.lesion_id, s.slice_id, repr(float(s.score))])
    return path


def read_score_dump(path: Union[str, Path]) -> List[Tuple[str, str, float]]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != SCORE_COLUMNS:
            raise MetricsError(f"{path}: expected columns {','.join(SCORE_COLUMNS)}")
        return [(r["lesion_id"], r["slice_id"], float(r["score"])) for r in reader]


def format_summary_table(rows: Sequence[MetricsRow]) -> str:
    """Fixed-width table printed by ``ebus3d eval``."""
    lines = [f"{'level':<8}{'model':<12}{'accuracy':>10}{'auc':>10}{'n':>6}"]
    for row in rows:
        lines.append(f"{row.level.value:<8}{row.model:<12}{_fmt(row.accuracy):>10}{_fmt(row.auc):>10}{row.n:>6}")
    return "\n".join(lines)
