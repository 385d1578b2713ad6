"""
DataLoader: Load and write learner-record CSV files.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from src.errors import EmptyDataset, FileError, SchemaError

from .dataset import CATEGORY_TAGS, UNKNOWN_TAG, ScoreDataset
from .processor import bin_grades
from .validator import GRADE_COLUMN, DataValidator

logger = logging.getLogger(__name__)

MISSING_SENTINELS = frozenset({"", "NA"})
KNOWN_TAGS = frozenset({*CATEGORY_TAGS, UNKNOWN_TAG})


class DataLoader:
    """Load learner-record data from a CSV file into a ScoreDataset."""

    def __init__(self, file_path: str | Path):
        """
        Initialize DataLoader.

        Args:
            file_path (str | Path): Path to the CSV file
        """
        self.file_path = Path(file_path)
        self.dataset: ScoreDataset | None = None

    def load(self) -> ScoreDataset:
        """
        Load a learner-record table.

        Expected CSV format:
        - UTF-8, comma separated, first row is the header
        - One column named ``grade`` (final grade, 0-100); every other column is a feature score (0-100)
        - Optional second header line with a category tag per feature column
          (AudioVideo, ChapterTest, Discussion); tags default to Unknown
        - An empty cell or the literal ``NA`` marks a missing value; such rows are dropped

        Returns:
            ScoreDataset: Clean dataset with levels binned from the grades. The number
                of dropped rows is available as ``dataset.dropped_rows``.

        Raises:
            FileError: If the file does not exist or cannot be decoded.
            SchemaError: If there is no ``grade`` column, a cell is neither numeric nor
                a missing sentinel, or a value lies outside 0-100.
            EmptyDataset: If no rows remain after dropping missing values.

        Example:
            >>> ds = DataLoader("data/spoc_2020.csv").load()
            >>> ds.class_counts()
            {'L1': 120, 'L2': 95, 'L3': 210, 'L4': 40, 'L5': 180, 'L6': 880}
        """
        if not self.file_path.is_file():
            raise FileError(f"File not found: {self.file_path}")

        try:
            raw = pd.read_csv(
                self.file_path, header=None, dtype=str, keep_default_na=False, na_filter=False, encoding="utf-8"
            )
        except pd.errors.EmptyDataError as e:
            raise SchemaError(f"File has no header row: {self.file_path}") from e
        except UnicodeDecodeError as e:
            raise FileError(f"File is not valid UTF-8: {self.file_path}") from e
        except pd.errors.ParserError as e:
            raise SchemaError(f"Failed to parse CSV file {self.file_path}: {e}") from e
        except OSError as e:
            raise FileError(f"Failed to read {self.file_path}: {e}") from e

        # header=None keeps repeated names as written instead of suffixing them
        header = [str(name).strip() for name in raw.iloc[0]]
        issues = DataValidator.check_header(header)
        if issues:
            raise SchemaError(f"Invalid header in {self.file_path}: {'; '.join(issues)}")
        raw = raw.iloc[1:].reset_index(drop=True)
        raw.columns = header
        features = [col for col in header if col != GRADE_COLUMN]

        if not raw.empty:
            raw = raw.apply(lambda col: col.str.strip())
        tags = self._read_tags(raw, features)
        if tags is not None:
            raw = raw.iloc[1:]

        table = self._to_numeric(raw)
        complete = table.dropna(axis=0, how="any")
        dropped = len(table) - len(complete)
        if dropped:
            details = DataValidator.get_missing_values_details(table)
            logger.warning(
                "Dropped %d of %d rows with missing values (missing cells per column: %s)",
                dropped,
                len(table),
                details["by_column"],
            )
        if len(complete) == 0:
            raise EmptyDataset(f"No complete rows in {self.file_path} ({dropped} dropped)")

        validator = DataValidator(complete, features)
        if not validator.validate():
            raise SchemaError("; ".join(validator.issues))

        grades = complete[GRADE_COLUMN].to_numpy(dtype=np.float64)
        self.dataset = ScoreDataset(
            features=complete[features].to_numpy(dtype=np.float64),
            grades=grades,
            levels=bin_grades(grades),
            feature_names=tuple(features),
            feature_tags=tuple(tags) if tags is not None else (),
            dropped_rows=dropped,
        )
        logger.info(
            "Loaded %d rows, %d features %s from %s",
            len(self.dataset),
            self.dataset.n_features,
            self.dataset.tag_counts(),
            self.file_path,
        )
        return self.dataset

    @staticmethod
    def _read_tags(raw: pd.DataFrame, features: list[str]) -> list[str] | None:
        """Return the category tags if the first data line is a tag line."""
        if raw.empty or not features:
            return None
        first = raw.iloc[0]
        if all(first[col] in KNOWN_TAGS for col in features):
            return [first[col] for col in features]
        return None

    def _to_numeric(self, raw: pd.DataFrame) -> pd.DataFrame:
        """Convert string cells to float64, mapping sentinels to NaN."""
        columns = {}
        for name in raw.columns:
            cells = raw[name]
            missing = cells.isin(MISSING_SENTINELS)
            try:
                columns[name] = cells.where(~missing, "nan").astype(np.float64)
            except ValueError:
                for position, cell in enumerate(cells):
                    if cell in MISSING_SENTINELS:
                        continue
                    try:
                        float(cell)
                    except ValueError:
                        raise SchemaError(
                            f"Non-numeric value '{cell}' in column '{name}' (data row {position + 1})"
                        ) from None
                raise
        return pd.DataFrame(columns, index=raw.index)


def load_csv(path: str | Path) -> ScoreDataset:
    """Load a learner-record CSV (see ``DataLoader.load``)."""
    return DataLoader(path).load()


def write_csv(ds: ScoreDataset, path: str | Path, include_tags: bool = True) -> Path:
    """
    Write a dataset in the loader's schema: feature columns in order, ``grade`` last.

    Floats are written in shortest round-trip form, so ``load_csv`` reproduces
    features, grades and levels exactly.

    Args:
        ds: Dataset to write
        path: Destination file (parent directories are created)
        include_tags: Emit the category tag line under the header

    Returns:
        Path: The written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    frame = pd.DataFrame(ds.features, columns=list(ds.feature_names))
    frame[GRADE_COLUMN] = ds.grades

    with open(path, "w", newline="", encoding="utf-8") as fh:
        if include_tags:
            tag_row = pd.DataFrame([[*ds.feature_tags, ""]], columns=frame.columns)
            tag_row.to_csv(fh, index=False, lineterminator="\n")
        frame.to_csv(fh, header=not include_tags, index=False, lineterminator="\n")

    logger.info("Wrote %d rows to %s", len(ds), path)
    return path
