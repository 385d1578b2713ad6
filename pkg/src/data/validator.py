"""
DataValidator: Validate learner-record tables before they become datasets.
"""

import logging

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

GRADE_COLUMN = "grade"
SCORE_RANGE = (0.0, 100.0)


class DataValidator:
    """Validate learner-record headers and the value ranges of parsed tables."""

    def __init__(self, df: pd.DataFrame, features: list[str]):
        """
        Initialize DataValidator.

        Args:
            df (pd.DataFrame): Parsed table with float columns (missing rows already dropped)
            features (list): Feature column names
        """
        self.df = df
        self.features = features
        self.issues: list[str] = []

    def validate(self) -> bool:
        """
        Run the value checks on a parsed table.

        Header problems (missing or repeated columns) are caught earlier by
        ``check_header`` on the raw header row.

        Returns:
            bool: True if data is valid, False otherwise (details in ``self.issues``)
        """
        self.issues = []

        self._check_value_ranges()

        if self.issues:
            for issue in self.issues:
                logger.warning("Validation: %s", issue)
            return False

        logger.info("All data quality checks passed")
        return True

    @staticmethod
    def check_header(columns: list[str]) -> list[str]:
        """
        Check a raw header row.

        Args:
            columns (list): Column names exactly as written in the file

        Returns:
            list: Issues found; empty when the grade column appears exactly once and
                at least one uniquely named feature column is present
        """
        issues = []
        count = columns.count(GRADE_COLUMN)
        if count == 0:
            issues.append(f"Missing required column '{GRADE_COLUMN}'")
        elif count > 1:
            issues.append(f"Column '{GRADE_COLUMN}' appears {count} times")

        features = [name for name in columns if name != GRADE_COLUMN]
        if not features:
            issues.append("No feature columns besides the grade column")
        duplicates = sorted({name for name in features if features.count(name) > 1})
        if duplicates:
            issues.append(f"Duplicate feature columns: {duplicates}")
        return issues

    def _check_value_ranges(self) -> None:
        """Check that features and grades lie in [0, 100]."""
        lo, hi = SCORE_RANGE
        columns = [c for c in [*self.features, GRADE_COLUMN] if c in self.df.columns]
        for column in columns:
            values = self.df[column].to_numpy(dtype=np.float64)
            if values.size == 0:
                continue
            finite = values[np.isfinite(values)]
            if finite.size < values.size:
                self.issues.append(f"Column '{column}' has infinite values")
            if finite.size and (finite.min() < lo or finite.max() > hi):
                self.issues.append(
                    f"Column '{column}' has values outside {lo:g}-{hi:g} range: [{finite.min()}, {finite.max()}]"
                )

    @staticmethod
    def get_missing_values_details(raw: pd.DataFrame) -> dict:
        """
        Count missing cells per column and the number of affected rows.

        Args:
            raw (pd.DataFrame): Table with NaN marking missing cells

        Returns:
            dict: ``total_missing``, ``rows_with_missing`` and ``by_column`` counts
        """
        per_column = raw.isna().sum()
        return {
            "total_missing": int(per_column.sum()),
            "rows_with_missing": int(raw.isna().any(axis=1).sum()),
            "by_column": {str(col): int(count) for col, count in per_column.items() if count > 0},
        }
