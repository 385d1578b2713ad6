"""
Stats module for distribution-shape diagnostics of grade vectors.
"""

from .diagnostics import (
    DistributionDiagnostics,
    diagnose,
    kurtosis,
    max_score,
    passes_gaussian_test,
    skewness,
    z_statistic,
)

__all__ = [
    "DistributionDiagnostics",
    "diagnose",
    "kurtosis",
    "max_score",
    "passes_gaussian_test",
    "skewness",
    "z_statistic",
]
