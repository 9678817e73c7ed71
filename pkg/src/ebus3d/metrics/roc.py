"""ROC curves, trapezoidal AUC and the pairwise (Mann-Whitney) AUC."""

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from ..core.errors import MetricsError
from ..core.types import Label

LabelLike = Union[Label, int, bool]


@dataclass(frozen=True)
class RocCurve:
    """Points in sweep order from (0, 0) to (1, 1); ``thresholds[0]`` is +inf."""

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray

    @property
    def points(self) -> List[Tuple[float, float]]:
        return [(float(f), float(t)) for f, t in zip(self.fpr, self.tpr)]

    @property
    def auc(self) -> float:
        return auc(self)


def _as_arrays(scores: Sequence[float], labels: Sequence[LabelLike]) -> Tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray([lab.value if isinstance(lab, Label) else int(lab) for lab in labels], dtype=np.int64)
    if s.shape != y.shape or s.ndim != 1:
        raise MetricsError(f"scores and labels must be equal-length vectors, got {s.shape} and {y.shape}")
    positives = int(y.sum())
    if positives == 0 or positives == y.size:
        raise MetricsError("ROC undefined: both classes must be present")
    return s, y


def roc_curve(scores: Sequence[float], labels: Sequence[LabelLike]) -> RocCurve:
    """Sweep every distinct score as a threshold (score >= t is positive), highest first.

    Tied scores move together, giving a diagonal step that credits half of each tied pair.
    """
    s, y = _as_arrays(scores, labels)
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    # last index of each run of equal scores
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tp = np.cumsum(y)[ends]
    fp = (ends + 1) - tp
    n_pos, n_neg = int(y.sum()), int(y.size - y.sum())
    fpr = np.r_[0.0, fp / n_neg]
    tpr = np.r_[0.0, tp / n_pos]
    return RocCurve(fpr, tpr, np.r_[np.inf, s[ends]])


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the curve over fpr."""
    return float(np.sum(np.diff(curve.fpr) * (curve.tpr[1:] + curve.tpr[:-1]) / 2.0))


def roc_auc(scores: Sequence[float], labels: Sequence[LabelLike]) -> float:
    return auc(roc_curve(scores, labels))


def mann_whitney_auc(scores: Sequence[float], labels: Sequence[LabelLike]) -> float:
    """P(score_pos > score_neg) + ½·P(score_pos == score_neg) over all pairs."""
    s, y = _as_arrays(scores, labels)
    pos, neg = s[y == 1], s[y == 0]
    greater = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return float((greater + 0.5 * ties) / (pos.size * neg.size))


def brute_force_roc(scores: Sequence[float], labels: Sequence[LabelLike]) -> RocCurve:
    """Confusion counts recomputed from scratch at every threshold."""
    s, y = _as_arrays(scores, labels)
    n_pos, n_neg = int(y.sum()), int(y.size - y.sum())
    thresholds = [np.inf] + sorted(set(s.tolist()), reverse=True)
    fpr, tpr = [], []
    for t in thresholds:
        tp = sum(1 for score, label in zip(s, y) if score >= t and label == 1)
        fp = sum(1 for score, label in zip(s, y) if score >= t and label == 0)
        fpr.append(fp / n_neg)
        tpr.append(tp / n_pos)
    return RocCurve(np.asarray(fpr), np.asarray(tpr), np.asarray(thresholds))
