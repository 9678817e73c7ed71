"""Thresholded classification, lesion-level score averaging and accuracy."""

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from ..core.errors import MetricsError
from ..core.types import Label

THRESHOLD = 0.5


class Level(Enum):
    SLICE = "slice"
    LESION = "lesion"


def classify(score: float, threshold: float = THRESHOLD) -> Label:
    """Malignant iff ``score`` is strictly greater than ``threshold``."""
    return Label.MALIGNANT if score > threshold else Label.BENIGN


@dataclass(frozen=True)
class SlicePrediction:
    lesion_id: str
    patient_id: str
    score: float
    label: Label
    slice_id: str = ""

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise MetricsError(f"slice score must lie in [0, 1], got {self.score}")

    def predicted(self, threshold: float = THRESHOLD) -> Label:
        return classify(self.score, threshold)


@dataclass(frozen=True)
class LesionPrediction:
    lesion_id: str
    score: float
    n_slices: int
    label: Label
    patient_id: str = ""

    def predicted(self, threshold: float = THRESHOLD) -> Label:
        return classify(self.score, threshold)


Prediction = Union[SlicePrediction, LesionPrediction]


def aggregate_lesion(slices: Sequence[SlicePrediction]) -> LesionPrediction:
    """Unweighted mean of one lesion's slice scores."""
    if not slices:
        raise MetricsError("cannot aggregate an empty list of slice predictions")
    lesion_ids = {s.lesion_id for s in slices}
    if len(lesion_ids) != 1:
        raise MetricsError(f"slice predictions span several lesions: {sorted(lesion_ids)}")
    labels = {s.label for s in slices}
    if len(labels) != 1:
        raise MetricsError(f"lesion {slices[0].lesion_id} has slices with conflicting labels")
    score = float(np.mean([s.score for s in slices], dtype=np.float64))
    return LesionPrediction(slices[0].lesion_id, score, len(slices), slices[0].label, slices[0].patient_id)


def aggregate_lesions(slices: Sequence[SlicePrediction]) -> List[LesionPrediction]:
    """Group by lesion id (sorted) and aggregate each group."""
    groups: Dict[str, List[SlicePrediction]] = defaultdict(list)
    for s in slices:
        groups[s.lesion_id].append(s)
    return [aggregate_lesion(groups[lesion_id]) for lesion_id in sorted(groups)]


def accuracy(
    predictions: Sequence[Prediction], level: Optional[Level] = None, threshold: float = THRESHOLD
) -> float:
    """Fraction classified correctly; slice predictions are aggregated first at lesion level."""
    if not predictions:
        raise MetricsError("accuracy of an empty prediction set is undefined")
    items: Sequence[Prediction] = predictions
    if level is Level.LESION and isinstance(predictions[0], SlicePrediction):
        items = aggregate_lesions(predictions)  # type: ignore[arg-type]
    correct = sum(1 for p in items if p.predicted(threshold) is p.label)
    return correct / len(items)
