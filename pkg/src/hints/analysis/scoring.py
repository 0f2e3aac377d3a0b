"""Per-label and frequency-weighted precision, recall and F1.

Predictions may leave pixels unlabeled (value :data:`UNLABELED`); such pixels
count against recall of their true label and never against precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ValidationError

UNLABELED = -1


def _ratio(a: float, b: float) -> float:
    return a / b if b > 0 else 0.0


def f1(precision: float, recall: float) -> float:
    return _ratio(2.0 * precision * recall, precision + recall)


@dataclass(frozen=True)
class ScoreReport:
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    unlabeled_fraction: float

    def to_dict(self, names=None) -> dict:
        names = names or [str(i) for i in range(len(self.precision))]
        return {
            "per_label": {
                names[i]: {
                    "precision": float(self.precision[i]),
                    "recall": float(self.recall[i]),
                    "f1": float(self.f1[i]),
                }
                for i in range(len(self.precision))
            },
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f1": self.weighted_f1,
            "unlabeled_fraction": self.unlabeled_fraction,
        }


def score(predicted, truth, n_labels: Optional[int] = None) -> ScoreReport:
    """Score ``predicted`` against ``truth`` (same shape, label ids, truth fully labeled).

    Weights are the true label frequencies; the weighted F1 is the harmonic
    mean of weighted precision and weighted recall.
    """
    pred = np.asarray(predicted, dtype=np.int64).ravel()
    gt = np.asarray(truth, dtype=np.int64).ravel()
    if np.shape(predicted) != np.shape(truth):
        raise ValidationError(f"dimension mismatch: {np.shape(predicted)} vs {np.shape(truth)}")
    if gt.size == 0:
        raise ValidationError("cannot score an empty labeling")
    if gt.min() < 0:
        raise ValidationError("ground truth must label every pixel")
    if pred.min() < UNLABELED:
        raise ValidationError("predicted labels must be ids or UNLABELED")
    if n_labels is None:
        n_labels = int(max(gt.max(), pred.max())) + 1
    elif max(gt.max(), pred.max()) >= n_labels:
        raise ValidationError(f"label id out of range for {n_labels} labels")

    labeled = pred >= 0
    confusion = np.zeros((n_labels, n_labels), dtype=np.int64)
    np.add.at(confusion, (gt[labeled], pred[labeled]), 1)
    tp = np.diag(confusion).astype(float)
    predicted_count = confusion.sum(axis=0)
    true_count = np.bincount(gt, minlength=n_labels)

    precision = np.array([_ratio(tp[i], predicted_count[i]) for i in range(n_labels)])
    recall = np.array([_ratio(tp[i], true_count[i]) for i in range(n_labels)])
    per_f1 = np.array([f1(precision[i], recall[i]) for i in range(n_labels)])
    weights = true_count / gt.size
    wp = float(weights @ precision)
    wr = float(weights @ recall)
    return ScoreReport(
        precision=precision,
        recall=recall,
        f1=per_f1,
        weighted_precision=wp,
        weighted_recall=wr,
        weighted_f1=f1(wp, wr),
        unlabeled_fraction=float((~labeled).mean()),
    )
