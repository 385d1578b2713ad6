"""
ScoreDataset: Immutable container of learner feature rows, grades and levels.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from src.errors import DimensionMismatch

LEVEL_NAMES: tuple[str, ...] = ("L1", "L2", "L3", "L4", "L5", "L6")

CATEGORY_TAGS: tuple[str, ...] = ("AudioVideo", "ChapterTest", "Discussion")
UNKNOWN_TAG = "Unknown"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ScoreDataset:
    """
    Feature matrix, raw grades and level labels for n learners.

    Levels are stored as class indices 0..5 (L1..L6). Arrays are copied and
    made read-only on construction, so a dataset never changes after it is built.

    Attributes:
        features: (n, d) float64 matrix, per-activity scores in [0, 100]
        grades: (n,) float64 final grades in [0, 100]
        levels: (n,) int64 class indices
        feature_names: d column names
        feature_tags: d category tags (AudioVideo / ChapterTest / Discussion / Unknown)
        dropped_rows: Rows removed at load time because of missing values
    """

    features: np.ndarray
    grades: np.ndarray
    levels: np.ndarray
    feature_names: tuple[str, ...]
    feature_tags: tuple[str, ...] = ()
    dropped_rows: int = field(default=0, compare=False)

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim == 1 and features.size == 0:
            features = features.reshape(0, len(self.feature_names))
        grades = np.asarray(self.grades, dtype=np.float64).ravel()
        levels = np.asarray(self.levels, dtype=np.int64).ravel()

        if features.ndim != 2:
            raise DimensionMismatch(f"features must be 2-D, got shape {features.shape}")
        if not (features.shape[0] == grades.size == levels.size):
            raise DimensionMismatch(
                f"Row counts differ: features {features.shape[0]}, grades {grades.size}, levels {levels.size}"
            )
        if features.shape[1] != len(self.feature_names):
            raise DimensionMismatch(
                f"{features.shape[1]} feature columns but {len(self.feature_names)} feature names"
            )

        tags = tuple(self.feature_tags) or (UNKNOWN_TAG,) * len(self.feature_names)
        if len(tags) != len(self.feature_names):
            raise DimensionMismatch(f"{len(tags)} category tags for {len(self.feature_names)} features")

        object.__setattr__(self, "features", _frozen(features))
        object.__setattr__(self, "grades", _frozen(grades))
        object.__setattr__(self, "levels", _frozen(levels))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "feature_tags", tags)

    def __len__(self) -> int:
        return int(self.grades.size)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def class_counts(self, num_classes: int = len(LEVEL_NAMES)) -> dict[str, int]:
        """Rows per level, every level present (zero when empty)."""
        counts = np.bincount(self.levels, minlength=num_classes)
        return {LEVEL_NAMES[i] if i < len(LEVEL_NAMES) else f"L{i + 1}": int(c) for i, c in enumerate(counts)}

    def tag_counts(self) -> dict[str, int]:
        """Number of feature columns per category tag."""
        return dict(Counter(self.feature_tags))

    def take(self, indices) -> "ScoreDataset":
        """New dataset made of the given rows (in order, repeats allowed)."""
        idx = np.asarray(indices, dtype=np.int64)
        return ScoreDataset(
            features=self.features[idx],
            grades=self.grades[idx],
            levels=self.levels[idx],
            feature_names=self.feature_names,
            feature_tags=self.feature_tags,
        )

    def equals(self, other: "ScoreDataset") -> bool:
        """Exact equality of rows, labels and schema."""
        return (
            self.feature_names == other.feature_names
            and self.feature_tags == other.feature_tags
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.grades, other.grades)
            and np.array_equal(self.levels, other.levels)
        )


@dataclass(frozen=True)
class SplitDataset:
    """
    Disjoint train/test partition of one dataset.

    Attributes:
        train: Training rows
        test: Held-out rows
        split_seed: Seed of the shuffle
        train_indices: Source row positions of the training rows
        test_indices: Source row positions of the held-out rows
        warning: Set when the split is degenerate (e.g. empty test part)
    """

    train: ScoreDataset
    test: ScoreDataset
    split_seed: int
    train_indices: np.ndarray
    test_indices: np.ndarray
    warning: str | None = None
