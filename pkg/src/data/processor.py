"""
Grade binning, train/test splitting and feature standardization.
"""

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.errors import DimensionMismatch, EmptyDataset, OutOfRange, UsageError

from .dataset import LEVEL_NAMES, ScoreDataset, SplitDataset

logger = logging.getLogger(__name__)

# Lower edges of L2..L6; L1 starts at 0 and L6 is closed at 100.
LEVEL_EDGES: tuple[float, ...] = (70.0, 80.0, 90.0, 93.0, 95.0)

GRADE_MIN = 0.0
GRADE_MAX = 100.0


def bin_grades(grades) -> np.ndarray:
    """
    Map final grades to level indices (0 = L1 ... 5 = L6).

    Bins are half-open [lo, hi) except the last, which is closed at 100:
    L1 [0,70), L2 [70,80), L3 [80,90), L4 [90,93), L5 [93,95), L6 [95,100].

    Args:
        grades: Array-like of grades

    Returns:
        np.ndarray: int64 level indices

    Raises:
        OutOfRange: If any grade is outside [0, 100] or not finite.
    """
    g = np.asarray(grades, dtype=np.float64)
    bad = ~np.isfinite(g) | (g < GRADE_MIN) | (g > GRADE_MAX)
    if np.any(bad):
        raise OutOfRange(f"Grade {g[bad].ravel()[0]} outside [{GRADE_MIN:g}, {GRADE_MAX:g}]")
    return np.searchsorted(np.asarray(LEVEL_EDGES), g, side="right").astype(np.int64)


def bin_grade(grade: float) -> str:
    """Level label ("L1".."L6") of a single grade."""
    return LEVEL_NAMES[int(bin_grades([grade])[0])]


def split(ds: ScoreDataset, ratio: float = 0.7, seed: int = 42, stratify: bool = False) -> SplitDataset:
    """
    Seeded shuffle followed by a prefix/suffix train/test split.

    The training part gets round(ratio * n) rows, at least one. With
    ``stratify`` the same rule is applied inside every level and the parts
    are concatenated in level order.

    Args:
        ds: Source dataset
        ratio: Training fraction, strictly between 0 and 1
        seed: Shuffle seed
        stratify: Split each level separately

    Returns:
        SplitDataset: Disjoint partition whose union is ``ds``; ``warning`` is
            set when the test part ends up empty.

    Raises:
        EmptyDataset: If ``ds`` has no rows.
        UsageError: If ratio is not in (0, 1).
    """
    if len(ds) == 0:
        raise EmptyDataset("Cannot split an empty dataset")
    if not 0.0 < ratio < 1.0:
        raise UsageError(f"Split ratio must be in (0, 1), got {ratio}")

    rng = np.random.default_rng(seed)
    if stratify:
        train_parts, test_parts = [], []
        for level in np.unique(ds.levels):
            members = np.flatnonzero(ds.levels == level)
            members = members[rng.permutation(members.size)]
            cut = _train_size(members.size, ratio)
            train_parts.append(members[:cut])
            test_parts.append(members[cut:])
        train_idx = np.concatenate(train_parts)
        test_idx = np.concatenate(test_parts)
    else:
        order = rng.permutation(len(ds))
        cut = _train_size(len(ds), ratio)
        train_idx, test_idx = order[:cut], order[cut:]

    warning = None
    if test_idx.size == 0:
        warning = f"Test part is empty: {len(ds)} row(s) all assigned to training"
        logger.warning(warning)

    logger.info("Split %d rows into %d train / %d test (seed %d)", len(ds), train_idx.size, test_idx.size, seed)
    return SplitDataset(
        train=ds.take(train_idx),
        test=ds.take(test_idx),
        split_seed=seed,
        train_indices=train_idx,
        test_indices=test_idx,
        warning=warning,
    )


def _train_size(n: int, ratio: float) -> int:
    return min(n, max(1, int(np.floor(ratio * n + 0.5))))


@dataclass(frozen=True)
class Standardizer:
    """
    Per-feature mean/std fitted on training rows.

    Zero-variance columns are flagged; their std is stored as 1 and their
    standardized values are forced to 0, so column indices stay stable.
    """

    mean: np.ndarray
    std: np.ndarray
    zero_variance: np.ndarray

    @property
    def n_features(self) -> int:
        return int(self.mean.size)

    @classmethod
    def identity(cls, d: int) -> "Standardizer":
        return cls(mean=np.zeros(d), std=np.ones(d), zero_variance=np.zeros(d, dtype=bool))

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "zero_variance": self.zero_variance.tolist(),
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "Standardizer":
        mean = np.asarray(payload["mean"], dtype=np.float64)
        std = np.asarray(payload["std"], dtype=np.float64)
        zero = np.asarray(payload["zero_variance"], dtype=bool)
        if not (mean.shape == std.shape == zero.shape):
            raise DimensionMismatch(f"Standardizer arrays differ in shape: {mean.shape}, {std.shape}, {zero.shape}")
        return cls(mean=mean, std=std, zero_variance=zero)


def fit_standardizer(train: ScoreDataset) -> Standardizer:
    """
    Fit per-feature population mean and std on training rows only.

    Raises:
        EmptyDataset: If ``train`` has no rows.
    """
    if len(train) == 0:
        raise EmptyDataset("Cannot fit a standardizer on an empty training set")

    mean = train.features.mean(axis=0)
    std = train.features.std(axis=0)
    zero = np.all(train.features == train.features[0], axis=0)
    if np.any(zero):
        names = [name for name, flag in zip(train.feature_names, zero) if flag]
        logger.warning("Zero-variance features mapped to 0: %s", ", ".join(names))
    std = np.where(zero, 1.0, std)
    return Standardizer(mean=mean, std=std, zero_variance=zero)


def apply_standardizer(s: Standardizer, ds: ScoreDataset | np.ndarray) -> np.ndarray:
    """
    Standardize features as (x - mean) / std; flagged columns become 0.

    Accepts a dataset or a raw (n, d) feature matrix.

    Raises:
        DimensionMismatch: If the feature width differs from the fitted width.
    """
    x = ds.features if isinstance(ds, ScoreDataset) else np.asarray(ds, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != s.n_features:
        raise DimensionMismatch(f"Standardizer fitted on {s.n_features} features, got shape {x.shape}")
    out = (x - s.mean) / s.std
    out[:, s.zero_variance] = 0.0
    return out
