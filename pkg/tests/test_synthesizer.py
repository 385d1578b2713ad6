"""
Tests for the synthetic dataset generator.
"""

import numpy as np
import pytest

from src.config import DEFAULT_CLASS_PROPORTIONS, SynthSpec
from src.data import bin_grades, synthesize_dataset
from src.data.synthesizer import feature_schema, level_bounds
from src.errors import InvalidSpec


class TestSynthesizer:
    """Test synthesize_dataset."""

    def test_class_counts_follow_proportions(self):
        """Test counts at n=10000 are within 2% of the proportions and L6 dominates."""
        proportions = (0.05, 0.05, 0.10, 0.05, 0.15, 0.60)
        ds = synthesize_dataset(SynthSpec(n=10_000, d=5, class_proportions=proportions, seed=1))
        counts = ds.class_counts()
        for (level, count), p in zip(counts.items(), proportions):
            assert abs(count / 10_000 - p) < 0.02, level
        assert max(counts, key=counts.get) == "L6"

    def test_default_profile(self):
        """Test the default profile: L6 largest, L4 smallest, 69 tagged features."""
        ds = synthesize_dataset()
        counts = ds.class_counts()
        assert len(ds) == 6000
        assert ds.n_features == 69
        assert max(counts, key=counts.get) == "L6"
        assert min(counts, key=counts.get) == "L4"
        assert ds.tag_counts() == {"AudioVideo": 60, "ChapterTest": 8, "Discussion": 1}
        assert DEFAULT_CLASS_PROPORTIONS[5] == max(DEFAULT_CLASS_PROPORTIONS)

    def test_levels_match_grades_and_ranges(self, small_synthetic):
        """Test every level is the bin of its grade and values stay in [0, 100]."""
        assert np.array_equal(small_synthetic.levels, bin_grades(small_synthetic.grades))
        assert small_synthetic.features.min() >= 0.0
        assert small_synthetic.features.max() <= 100.0

    def test_grades_fall_in_their_bins(self, small_synthetic):
        """Test grades lie inside the bin of their level."""
        bounds = level_bounds()
        for grade, level in zip(small_synthetic.grades, small_synthetic.levels):
            lo, hi = bounds[level]
            assert lo <= grade <= hi

    def test_deterministic(self):
        """Test the same seed gives identical datasets and a different seed does not."""
        spec = SynthSpec(n=200, d=8, seed=5)
        assert synthesize_dataset(spec).equals(synthesize_dataset(spec))
        assert not synthesize_dataset(spec).equals(synthesize_dataset(SynthSpec(n=200, d=8, seed=6)))

    def test_noise_free_is_separable(self, separable_synthetic):
        """Test a nearest-prototype classifier is perfect when noise is 0."""
        ds = separable_synthetic
        present = [k for k in range(6) if np.any(ds.levels == k)]
        prototypes = np.array([ds.features[ds.levels == k][0] for k in present])
        distances = ((ds.features[:, None, :] - prototypes[None, :, :]) ** 2).sum(axis=2)
        predicted = np.array(present)[np.argmin(distances, axis=1)]
        assert np.array_equal(predicted, ds.levels)

    def test_accepts_plain_dict(self):
        """Test a dict spec is validated like SynthSpec."""
        ds = synthesize_dataset({"n": 30, "d": 3, "seed": 2})
        assert len(ds) == 30

    @pytest.mark.parametrize(
        "spec",
        [
            {"n": 5},
            {"d": 0},
            {"noise": -1.0},
            {"class_proportions": [0.5, 0.5, 0.0, 0.0, 0.0, 0.1]},
            {"class_proportions": [0.5, 0.5]},
            {"class_proportions": [1.2, -0.2, 0.0, 0.0, 0.0, 0.0]},
        ],
    )
    def test_invalid_spec(self, spec):
        """Test invalid specs raise InvalidSpec."""
        with pytest.raises(InvalidSpec):
            synthesize_dataset(spec)

    def test_feature_schema(self):
        """Test names and tags by activity group."""
        names, tags = feature_schema(70)
        assert names[0] == "av_01"
        assert names[59] == "av_60"
        assert names[60] == "ct_01"
        assert names[68] == "disc_01"
        assert names[69] == "disc_02"
        assert tags[:60] == ("AudioVideo",) * 60
        assert tags[60:68] == ("ChapterTest",) * 8
