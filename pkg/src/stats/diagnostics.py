"""
Distribution-shape diagnostics: skewness, excess kurtosis, max score and the Z gate.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.config import DiagnosticsConfig
from src.errors import DegenerateInput

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DistributionDiagnostics:
    """
    Shape statistics of one grade vector.

    Attributes:
        skewness: Third standardized moment (population form)
        kurtosis: Fourth standardized moment minus 3
        max_score: max(|skewness|, |kurtosis|)
        z_statistic: max_score / sigma_ref
        mean: Mean grade
        std_dev: Population standard deviation of the grades
        n: Number of grades
    """

    skewness: float
    kurtosis: float
    max_score: float
    z_statistic: float
    mean: float
    std_dev: float
    n: int

    def to_dict(self, config: DiagnosticsConfig | None = None) -> dict[str, Any]:
        """Flat JSON-ready view, including the test verdict."""
        config = config or DiagnosticsConfig()
        return {
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "max_score": self.max_score,
            "z_statistic": self.z_statistic,
            "mean": self.mean,
            "std_dev": self.std_dev,
            "n": self.n,
            "passes": passes_gaussian_test(self, config),
        }


def _standardized(grades) -> np.ndarray:
    """Return (x - mean) / std after rejecting inputs the moments are undefined for."""
    x = np.asarray(grades, dtype=np.float64).ravel()
    if x.size < 2:
        raise DegenerateInput(f"Need at least 2 grades, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DegenerateInput("Grades contain NaN or infinite values")
    if np.all(x == x[0]):
        raise DegenerateInput(f"All {x.size} grades equal {x[0]}; standard deviation is zero")
    return (x - x.mean()) / x.std()


def skewness(grades) -> float:
    """
    Population skewness (1/n) * sum(((x - mean) / std) ** 3).

    Raises:
        DegenerateInput: Fewer than 2 values, identical values, or non-finite values.
    """
    z = _standardized(grades)
    return float(np.mean(z**3))


def kurtosis(grades) -> float:
    """Population excess kurtosis (1/n) * sum(((x - mean) / std) ** 4) - 3."""
    z = _standardized(grades)
    return float(np.mean(z**4) - 3.0)


def max_score(skewness: float, kurtosis: float) -> float:
    """
    Combined imbalance indicator max(|S|, |K|).

    Raises:
        DegenerateInput: If either input is NaN or infinite.
    """
    if not (math.isfinite(skewness) and math.isfinite(kurtosis)):
        raise DegenerateInput(f"Non-finite moments: skewness={skewness}, kurtosis={kurtosis}")
    return max(abs(skewness), abs(kurtosis))


def z_statistic(max_score: float, config: DiagnosticsConfig | None = None) -> float:
    """Scale the max score by the reference deviation."""
    config = config or DiagnosticsConfig()
    return max_score / config.sigma_ref


def passes_gaussian_test(diag: DistributionDiagnostics, config: DiagnosticsConfig | None = None) -> bool:
    """True iff Z < epsilon. Ties fail."""
    config = config or DiagnosticsConfig()
    return diag.z_statistic < config.epsilon


def diagnose(grades, config: DiagnosticsConfig | None = None) -> DistributionDiagnostics:
    """
    Compute every shape statistic of a grade vector in one pass.

    Args:
        grades: Raw final grades (any 1-D array-like)
        config: Reference scale and threshold (defaults: sigma_ref 0.36, epsilon 1.96)

    Returns:
        DistributionDiagnostics: Coherent bundle; each field equals the matching
            single-statistic function applied to the same input.

    Raises:
        DegenerateInput: Fewer than 2 values, zero spread, or non-finite values.

    Example:
        >>> diag = diagnose([1.0, 2.0, 3.0])
        >>> diag.skewness
        0.0
    """
    config = config or DiagnosticsConfig()
    z = _standardized(grades)
    x = np.asarray(grades, dtype=np.float64).ravel()

    s = float(np.mean(z**3))
    k = float(np.mean(z**4) - 3.0)
    ms = max_score(s, k)
    diag = DistributionDiagnostics(
        skewness=s,
        kurtosis=k,
        max_score=ms,
        z_statistic=z_statistic(ms, config),
        mean=float(x.mean()),
        std_dev=float(x.std()),
        n=int(x.size),
    )
    logger.debug("Diagnostics n=%d S=%.4f K=%.4f Z=%.4f", diag.n, s, k, diag.z_statistic)
    return diag
