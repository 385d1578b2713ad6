"""
Shared pytest fixtures for test suite.
"""

import os
import sys

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from src.config import SynthSpec
from src.data import ScoreDataset, bin_grades, synthesize_dataset


def make_dataset(features, grades, names=None, tags=()):
    """Build a ScoreDataset with levels binned from the grades."""
    features = np.asarray(features, dtype=np.float64)
    grades = np.asarray(grades, dtype=np.float64)
    if names is None:
        names = tuple(f"f{j + 1}" for j in range(features.shape[1]))
    return ScoreDataset(
        features=features, grades=grades, levels=bin_grades(grades), feature_names=names, feature_tags=tags
    )


def write_text(path, lines):
    """Write CSV lines verbatim and return the path."""
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def six_level_dataset():
    """Six rows, one per level, three features."""
    grades = [65.0, 75.0, 85.0, 91.0, 94.0, 99.0]
    features = [[g / 2, 100 - g, g] for g in grades]
    return make_dataset(features, grades)


@pytest.fixture
def small_synthetic():
    """Long-tail synthetic dataset small enough for unit tests."""
    return synthesize_dataset(SynthSpec(n=600, d=12, noise=5.0, seed=7))


@pytest.fixture
def separable_synthetic():
    """Noise-free synthetic dataset; each level is a single prototype row."""
    return synthesize_dataset(SynthSpec(n=600, d=12, noise=0.0, seed=11))


@pytest.fixture
def gaussian_dataset():
    """Grades drawn from N(50, 10): passes the Gaussian-shape test."""
    rng = np.random.default_rng(3)
    grades = np.clip(rng.normal(50.0, 10.0, size=2000), 0.0, 100.0)
    features = np.clip(grades[:, None] + rng.normal(0.0, 5.0, size=(2000, 4)), 0.0, 100.0)
    return make_dataset(features, grades)


@pytest.fixture
def sample_csv(tmp_path):
    """Five-row CSV with a tag line and one incomplete row."""
    return write_text(
        tmp_path / "records.csv",
        [
            "av_01,ct_01,disc_01,grade",
            "AudioVideo,ChapterTest,Discussion,",
            "80,70,60,65",
            "85,,65,75",
            "90,80,70,85",
            "95,85,NA,91",
            "100,90,80,99",
        ],
    )
