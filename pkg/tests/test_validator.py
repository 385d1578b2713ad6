"""
Tests for DataValidator class.
"""

import numpy as np
import pandas as pd

from src.data import DataValidator


def frame(**columns):
    return pd.DataFrame({name: np.asarray(values, dtype=np.float64) for name, values in columns.items()})


class TestCheckHeader:
    """Test DataValidator.check_header."""

    def test_valid_header(self):
        """Test a header with features and one grade column has no issues."""
        assert DataValidator.check_header(["a", "b", "grade"]) == []

    def test_missing_grade_column(self):
        """Test a header without grade is reported."""
        issues = DataValidator.check_header(["a", "b"])
        assert issues == ["Missing required column 'grade'"]

    def test_repeated_grade_column(self):
        """Test a second grade column is reported."""
        issues = DataValidator.check_header(["a", "grade", "grade"])
        assert issues == ["Column 'grade' appears 2 times"]

    def test_no_feature_columns(self):
        """Test a header with only the grade column is reported."""
        assert DataValidator.check_header(["grade"]) == ["No feature columns besides the grade column"]

    def test_duplicate_feature_names(self):
        """Test duplicated feature names are reported once each."""
        issues = DataValidator.check_header(["a", "b", "a", "b", "grade"])
        assert issues == ["Duplicate feature columns: ['a', 'b']"]


class TestDataValidator:
    """Test DataValidator value checks."""

    def test_valid_table(self):
        """Test a clean table passes."""
        validator = DataValidator(frame(a=[10, 20], b=[0, 100], grade=[65, 99]), ["a", "b"])
        assert validator.validate() is True
        assert validator.issues == []

    def test_values_out_of_range(self):
        """Test values below 0 or above 100 are reported per column."""
        validator = DataValidator(frame(a=[-1, 20], grade=[65, 100.5]), ["a"])
        assert validator.validate() is False
        assert len([issue for issue in validator.issues if "outside" in issue]) == 2

    def test_infinite_values(self):
        """Test infinite values are reported."""
        validator = DataValidator(frame(a=[np.inf, 20], grade=[65, 99]), ["a"])
        assert validator.validate() is False
        assert any("infinite" in issue for issue in validator.issues)

    def test_issues_reset_between_runs(self):
        """Test validate() starts from an empty issue list."""
        validator = DataValidator(frame(a=[-1, 20], grade=[65, 99]), ["a"])
        validator.validate()
        validator.df = frame(a=[1, 20], grade=[65, 99])
        assert validator.validate() is True

    def test_missing_values_details(self):
        """Test per-column and per-row missing counts."""
        raw = frame(a=[np.nan, 1, np.nan], b=[1, np.nan, np.nan], grade=[65, 70, 80])
        details = DataValidator.get_missing_values_details(raw)
        assert details["total_missing"] == 4
        assert details["rows_with_missing"] == 3
        assert details["by_column"] == {"a": 2, "b": 2}
