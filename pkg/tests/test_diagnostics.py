"""
Tests for skewness/kurtosis diagnostics and the Gaussian-shape gate.
"""

import math

import numpy as np
import pytest
from scipy import stats

from src.config import DiagnosticsConfig, SynthSpec
from src.data import synthesize_dataset
from src.errors import DegenerateInput
from src.stats import (
    DistributionDiagnostics,
    diagnose,
    kurtosis,
    max_score,
    passes_gaussian_test,
    skewness,
    z_statistic,
)


def moments_oracle(values):
    """Term-by-term summation of the population skewness and excess kurtosis."""
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    std = math.sqrt(var)
    s = sum(((v - mean) / std) ** 3 for v in values) / n
    k = sum(((v - mean) / std) ** 4 for v in values) / n - 3.0
    return s, k


def diag_with(z, skew=0.0, kurt=0.0):
    return DistributionDiagnostics(skew, kurt, max(abs(skew), abs(kurt)), z, 50.0, 10.0, 100)


class TestMoments:
    """Test skewness and kurtosis."""

    def test_symmetric_data_has_zero_skewness(self):
        """Test [1, 2, 3] has zero skewness."""
        assert skewness([1.0, 2.0, 3.0]) == pytest.approx(0.0, abs=1e-15)

    def test_two_point_kurtosis(self):
        """Test a symmetric two-point mass has excess kurtosis -2."""
        assert kurtosis([-1.0, 1.0, -1.0, 1.0]) == pytest.approx(-2.0, abs=1e-12)

    def test_long_right_tail_matches_oracle(self):
        """Test [0, 0, 0, 100] against the summation oracle."""
        s, k = moments_oracle([0.0, 0.0, 0.0, 100.0])
        assert skewness([0, 0, 0, 100]) == pytest.approx(s, rel=1e-12)
        assert kurtosis([0, 0, 0, 100]) == pytest.approx(k, rel=1e-12)
        assert skewness([0, 0, 0, 100]) > 0

    def test_oracle_equivalence_on_random_vectors(self):
        """Test 1000 random vectors of length 2-200 against the oracle."""
        rng = np.random.default_rng(0)
        for _ in range(1000):
            values = rng.normal(rng.uniform(-50, 50), rng.uniform(0.1, 20), size=int(rng.integers(2, 201)))
            if np.all(values == values[0]):
                continue
            s, k = moments_oracle(values.tolist())
            assert skewness(values) == pytest.approx(s, rel=1e-10, abs=1e-12)
            assert kurtosis(values) == pytest.approx(k, rel=1e-10, abs=1e-12)

    def test_matches_scipy(self):
        """Test against scipy's biased estimators."""
        values = np.random.default_rng(8).gamma(2.0, 3.0, size=500)
        assert skewness(values) == pytest.approx(stats.skew(values, bias=True), rel=1e-10)
        assert kurtosis(values) == pytest.approx(stats.kurtosis(values, fisher=True, bias=True), rel=1e-10)

    def test_gaussian_sample(self):
        """Test a large seeded Gaussian sample is close to zero skew and kurtosis."""
        values = np.random.default_rng(42).standard_normal(100_000)
        assert abs(skewness(values)) < 0.05
        assert abs(kurtosis(values)) < 0.1

    def test_reversal_and_permutation_invariance(self):
        """Test ordering does not change any statistic."""
        values = np.random.default_rng(1).exponential(5.0, size=50)
        shuffled = np.random.default_rng(2).permutation(values)
        assert skewness(values[::-1]) == pytest.approx(skewness(values), rel=1e-12)
        assert diagnose(shuffled).kurtosis == pytest.approx(diagnose(values).kurtosis, rel=1e-12)

    def test_affine_equivariance(self):
        """Test positive scaling and shifting leave the moments unchanged."""
        values = np.random.default_rng(4).gamma(2.0, 3.0, size=200)
        assert skewness(3.5 * values + 12.0) == pytest.approx(skewness(values), rel=1e-9)
        assert kurtosis(3.5 * values + 12.0) == pytest.approx(kurtosis(values), rel=1e-9)

    def test_sign_flip(self):
        """Test negation flips skewness and keeps kurtosis."""
        values = np.random.default_rng(5).gamma(2.0, 3.0, size=200)
        assert skewness(-values) == pytest.approx(-skewness(values), rel=1e-12)
        assert kurtosis(-values) == pytest.approx(kurtosis(values), rel=1e-12)

    @pytest.mark.parametrize("values", [[5.0], [], [7.0, 7.0, 7.0], [1.0, float("nan")], [1.0, float("inf")]])
    def test_degenerate_input(self, values):
        """Test too few, identical or non-finite values are rejected."""
        with pytest.raises(DegenerateInput):
            skewness(values)
        with pytest.raises(DegenerateInput):
            kurtosis(values)


class TestMaxScoreAndZ:
    """Test max_score, z_statistic and the test verdict."""

    def test_worked_example(self):
        """Test S=0.194, K=0.373 gives MS 0.373 and Z 1.036."""
        ms = max_score(0.194, 0.373)
        assert ms == 0.373
        z = z_statistic(ms, DiagnosticsConfig(sigma_ref=0.36))
        assert z == pytest.approx(1.036, abs=1e-3)
        assert passes_gaussian_test(diag_with(z, 0.194, 0.373), DiagnosticsConfig())

    def test_max_score_cases(self):
        """Test zero and absolute-value dominance."""
        assert max_score(0.0, 0.0) == 0.0
        assert max_score(-0.5, 0.2) == 0.5

    def test_max_score_monotone(self):
        """Test max_score never decreases when |S| or |K| grows."""
        for s in (0.0, 0.3, 1.2):
            assert max_score(s + 0.1, 0.5) >= max_score(s, 0.5)
            assert max_score(0.5, -(s + 0.1)) >= max_score(0.5, -s)

    def test_max_score_rejects_non_finite(self):
        """Test NaN input raises DegenerateInput."""
        with pytest.raises(DegenerateInput):
            max_score(float("nan"), 0.1)

    def test_z_ratio(self):
        """Test Z is the exact ratio MS / sigma_ref."""
        assert z_statistic(0.72, DiagnosticsConfig(sigma_ref=0.36)) == pytest.approx(2.0)
        assert z_statistic(0.0, DiagnosticsConfig(sigma_ref=1.7)) == 0.0

    def test_boundary_fails(self):
        """Test Z equal to epsilon fails (strict inequality)."""
        assert not passes_gaussian_test(diag_with(1.96), DiagnosticsConfig(epsilon=1.96))
        assert not passes_gaussian_test(diag_with(5.0), DiagnosticsConfig())

    def test_config_validation(self):
        """Test non-positive sigma_ref is rejected."""
        with pytest.raises(ValueError):
            DiagnosticsConfig(sigma_ref=0.0)


class TestDiagnose:
    """Test the diagnose bundle."""

    def test_fields_are_coherent(self):
        """Test every field equals the matching single-statistic function."""
        values = np.random.default_rng(8).beta(5.0, 2.0, size=300) * 100
        config = DiagnosticsConfig()
        diag = diagnose(values, config)
        assert diag.skewness == pytest.approx(skewness(values), rel=1e-12)
        assert diag.kurtosis == pytest.approx(kurtosis(values), rel=1e-12)
        assert diag.max_score == max_score(diag.skewness, diag.kurtosis)
        assert diag.z_statistic == pytest.approx(diag.max_score / config.sigma_ref)
        assert diag.mean == pytest.approx(values.mean())
        assert diag.std_dev == pytest.approx(values.std())
        assert diag.n == 300

    def test_symmetric_three_point(self):
        """Test symmetric data: S=0 and MS=|K|."""
        diag = diagnose([10.0, 20.0, 30.0])
        assert diag.skewness == pytest.approx(0.0, abs=1e-15)
        assert diag.max_score == pytest.approx(abs(diag.kurtosis))
        assert diag.z_statistic == pytest.approx(abs(diag.kurtosis) / 0.36)

    def test_gaussian_sample_passes(self):
        """Test a seeded Gaussian sample passes."""
        values = np.random.default_rng(42).normal(60.0, 8.0, size=100_000)
        assert passes_gaussian_test(diagnose(values))

    def test_long_tail_synthetic_fails(self):
        """Test the default L6-heavy synthetic grades fail the test."""
        ds = synthesize_dataset(SynthSpec(n=2000, d=4, seed=42))
        diag = diagnose(ds.grades)
        s, _ = moments_oracle(ds.grades.tolist())
        assert diag.skewness == pytest.approx(s, rel=1e-9)
        assert diag.skewness < 0
        assert diag.z_statistic >= 1.96
        assert not passes_gaussian_test(diag)

    def test_to_dict_includes_verdict(self):
        """Test to_dict reports the verdict under the given config."""
        diag = diagnose([1.0, 2.0, 3.0, 4.0, 10.0])
        assert diag.to_dict(DiagnosticsConfig(epsilon=1000.0))["passes"] is True
        assert diag.to_dict(DiagnosticsConfig(epsilon=1e-6))["passes"] is False
