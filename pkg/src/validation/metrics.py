"""
MetricsCalculator: Per-class recall, total accuracy and confusion matrices.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
from sklearn.metrics import confusion_matrix

from src.data.dataset import LEVEL_NAMES
from src.errors import EmptyInput, LabelOutOfRange, LengthMismatch


@dataclass(frozen=True)
class EvaluationReport:
    """
    Accuracy figures of one prediction run.

    Attributes:
        per_class_recall: Level name -> recall; levels without support are absent
        total_accuracy: trace(confusion) / total count
        confusion: (num_classes, num_classes) counts, rows = true level, columns = predicted level
        support: Level name -> number of true rows (every level present)
    """

    per_class_recall: dict[str, float]
    total_accuracy: float
    confusion: np.ndarray
    support: dict[str, int]

    @property
    def class_names(self) -> list[str]:
        return list(self.support)

    def to_dict(self) -> dict[str, Any]:
        return {
            "per_class_recall": dict(self.per_class_recall),
            "total_accuracy": self.total_accuracy,
            "confusion": self.confusion.tolist(),
            "support": dict(self.support),
        }


class MetricsCalculator:
    """Calculate the accuracy metrics reported for grade-level prediction."""

    @staticmethod
    def evaluate(predictions, labels, num_classes: int = len(LEVEL_NAMES)) -> EvaluationReport:
        """
        Build an evaluation report.

        Args:
            predictions (array-like): Predicted class indices
            labels (array-like): True class indices
            num_classes (int): Number of levels (default 6)

        Returns:
            EvaluationReport: Confusion rows sum to the support counts; recall of a
                level is its diagonal entry over its support.

        Raises:
            LengthMismatch: If the vectors differ in length.
            EmptyInput: If the vectors are empty.
            LabelOutOfRange: If an index is outside [0, num_classes).

        Example:
            >>> report = MetricsCalculator.evaluate([5, 5, 5, 5], [4, 4, 5, 5])
            >>> report.per_class_recall
            {'L5': 0.0, 'L6': 1.0}
            >>> report.total_accuracy
            0.5
        """
        pred = np.asarray(predictions).ravel()
        true = np.asarray(labels).ravel()
        if pred.size != true.size:
            raise LengthMismatch(f"{pred.size} predictions for {true.size} labels")
        if true.size == 0:
            raise EmptyInput("Cannot evaluate empty predictions")
        for name, values in (("prediction", pred), ("label", true)):
            if not np.issubdtype(values.dtype, np.integer) or values.min() < 0 or values.max() >= num_classes:
                raise LabelOutOfRange(f"Every {name} must be an integer in [0, {num_classes})")

        names = MetricsCalculator.class_names(num_classes)
        confusion = confusion_matrix(true, pred, labels=list(range(num_classes)))
        support_counts = confusion.sum(axis=1)

        return EvaluationReport(
            per_class_recall={
                names[c]: float(confusion[c, c] / support_counts[c]) for c in range(num_classes) if support_counts[c]
            },
            total_accuracy=float(np.trace(confusion) / true.size),
            confusion=confusion.astype(np.int64),
            support={names[c]: int(support_counts[c]) for c in range(num_classes)},
        )

    @staticmethod
    def class_names(num_classes: int) -> list[str]:
        """Level names L1..Lk."""
        return [LEVEL_NAMES[c] if c < len(LEVEL_NAMES) else f"L{c + 1}" for c in range(num_classes)]

    @staticmethod
    def weighted_recall(report: EvaluationReport) -> float:
        """
        Support-weighted mean of the per-class recalls.

        Equals ``report.total_accuracy`` for every report.
        """
        total = sum(report.support.values())
        return sum(report.per_class_recall[name] * report.support[name] for name in report.per_class_recall) / total


def evaluate(predictions, labels, num_classes: int = len(LEVEL_NAMES)) -> EvaluationReport:
    """Module-level shortcut for ``MetricsCalculator.evaluate``."""
    return MetricsCalculator.evaluate(predictions, labels, num_classes)
