"""
Tests for DataLoader and CSV export.
"""

import numpy as np
import pytest

from src.data import DataLoader, load_csv, write_csv
from src.errors import EmptyDataset, FileError, SchemaError

from conftest import write_text


class TestDataLoader:
    """Test DataLoader functionality."""

    def test_drops_incomplete_rows(self, tmp_path):
        """Test a 5-row file with one empty cell loads 4 rows."""
        path = write_text(
            tmp_path / "five.csv",
            ["f1,f2,grade", "10,20,65", "11,,75", "12,22,85", "13,23,91", "14,24,99"],
        )
        ds = load_csv(path)
        assert len(ds) == 4
        assert ds.dropped_rows == 1

    def test_levels_from_grades(self, tmp_path):
        """Test grades 65, 75, 85, 91, 94, 99 map to L1..L6."""
        lines = ["f1,grade"] + [f"{i},{g}" for i, g in enumerate([65, 75, 85, 91, 94, 99])]
        ds = load_csv(write_text(tmp_path / "levels.csv", lines))
        assert ds.levels.tolist() == [0, 1, 2, 3, 4, 5]
        assert ds.dropped_rows == 0

    def test_tag_line_and_na_sentinel(self, sample_csv):
        """Test the category tag line is read and NA rows are dropped."""
        loader = DataLoader(sample_csv)
        ds = loader.load()
        assert ds.feature_names == ("av_01", "ct_01", "disc_01")
        assert ds.feature_tags == ("AudioVideo", "ChapterTest", "Discussion")
        assert len(ds) == 3
        assert ds.dropped_rows == 2
        assert ds.tag_counts() == {"AudioVideo": 1, "ChapterTest": 1, "Discussion": 1}

    def test_drop_warning_names_columns(self, tmp_path, caplog):
        """Test the drop warning reports the row count and missing cells per column."""
        path = write_text(tmp_path / "gaps.csv", ["f1,f2,grade", "10,,65", "NA,,75", "12,22,85"])
        with caplog.at_level("WARNING", logger="src.data.loader"):
            ds = load_csv(path)
        assert ds.dropped_rows == 2
        assert "Dropped 2 of 3 rows" in caplog.text
        assert "'f1': 1" in caplog.text
        assert "'f2': 2" in caplog.text

    def test_repeated_grade_header(self, tmp_path):
        """Test a header naming grade twice raises SchemaError."""
        with pytest.raises(SchemaError, match="'grade' appears 2 times"):
            load_csv(write_text(tmp_path / "twograde.csv", ["a,grade,grade", "1,80,81"]))

    def test_duplicate_feature_header(self, tmp_path):
        """Test a repeated feature name raises SchemaError instead of being renamed."""
        with pytest.raises(SchemaError, match="Duplicate feature columns"):
            load_csv(write_text(tmp_path / "dup.csv", ["a,a,grade", "1,2,80"]))

    def test_tags_default_to_unknown(self, tmp_path):
        """Test files without a tag line get Unknown tags."""
        ds = load_csv(write_text(tmp_path / "plain.csv", ["a,b,grade", "1,2,80", "3,4,90"]))
        assert ds.feature_tags == ("Unknown", "Unknown")

    def test_grade_column_position_is_free(self, tmp_path):
        """Test the grade column may appear anywhere."""
        ds = load_csv(write_text(tmp_path / "first.csv", ["grade,a,b", "80,1,2", "90,3,4"]))
        assert ds.feature_names == ("a", "b")
        assert ds.grades.tolist() == [80.0, 90.0]

    def test_missing_grade_column(self, tmp_path):
        """Test a file without a grade column raises SchemaError."""
        with pytest.raises(SchemaError):
            load_csv(write_text(tmp_path / "nograde.csv", ["a,b", "1,2"]))

    def test_non_numeric_cell(self, tmp_path):
        """Test a non-numeric cell that is not a sentinel raises SchemaError."""
        with pytest.raises(SchemaError, match="abc"):
            load_csv(write_text(tmp_path / "text.csv", ["a,grade", "1,80", "abc,90"]))

    def test_out_of_range_value(self, tmp_path):
        """Test a feature above 100 raises SchemaError."""
        with pytest.raises(SchemaError):
            load_csv(write_text(tmp_path / "range.csv", ["a,grade", "101,80", "5,90"]))

    def test_all_rows_dropped(self, tmp_path):
        """Test a file whose rows are all incomplete raises EmptyDataset."""
        with pytest.raises(EmptyDataset):
            load_csv(write_text(tmp_path / "empty.csv", ["a,grade", ",80", "NA,90"]))

    def test_header_only(self, tmp_path):
        """Test a header without rows raises EmptyDataset."""
        with pytest.raises(EmptyDataset):
            load_csv(write_text(tmp_path / "header.csv", ["a,grade"]))

    def test_missing_file(self, tmp_path):
        """Test a missing file raises FileError."""
        with pytest.raises(FileError):
            load_csv(tmp_path / "absent.csv")


class TestWriteCsv:
    """Test write_csv."""

    def test_round_trip_is_exact(self, tmp_path, small_synthetic):
        """Test write then load reproduces features, grades, levels and tags."""
        path = write_csv(small_synthetic, tmp_path / "out" / "data.csv")
        loaded = load_csv(path)
        assert loaded.equals(small_synthetic)

    def test_round_trip_without_tags(self, tmp_path, six_level_dataset):
        """Test the tag line is optional."""
        path = write_csv(six_level_dataset, tmp_path / "plain.csv", include_tags=False)
        assert path.read_text(encoding="utf-8").splitlines()[0] == "f1,f2,f3,grade"
        loaded = load_csv(path)
        assert np.array_equal(loaded.features, six_level_dataset.features)
        assert np.array_equal(loaded.levels, six_level_dataset.levels)

    def test_tag_line_layout(self, tmp_path, six_level_dataset):
        """Test the tag line sits under the header with an empty grade cell."""
        path = write_csv(six_level_dataset, tmp_path / "tagged.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "f1,f2,f3,grade"
        assert lines[1] == ",".join([*six_level_dataset.feature_tags, ""])
        assert len(lines) == len(six_level_dataset) + 2

    def test_grade_is_last_column(self, tmp_path, small_synthetic):
        """Test the header lists features in order then grade."""
        path = write_csv(small_synthetic, tmp_path / "data.csv")
        header = path.read_text(encoding="utf-8").splitlines()[0].split(",")
        assert header == [*small_synthetic.feature_names, "grade"]
