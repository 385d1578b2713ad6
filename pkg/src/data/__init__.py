"""
Data module for loading, validating, binning, splitting and synthesizing learner records.
"""

from .dataset import LEVEL_NAMES, ScoreDataset, SplitDataset
from .loader import DataLoader, load_csv, write_csv
from .processor import Standardizer, apply_standardizer, bin_grade, bin_grades, fit_standardizer, split
from .synthesizer import synthesize_dataset
from .validator import DataValidator

__all__ = [
    "LEVEL_NAMES",
    "ScoreDataset",
    "SplitDataset",
    "DataLoader",
    "DataValidator",
    "Standardizer",
    "apply_standardizer",
    "bin_grade",
    "bin_grades",
    "fit_standardizer",
    "load_csv",
    "split",
    "synthesize_dataset",
    "write_csv",
]
