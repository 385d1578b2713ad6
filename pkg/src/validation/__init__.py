"""
Validation module for accuracy reports and layout ablations.
"""

from .ablation import AblationEngine, AblationResult, AblationTable, VariantResult, ablation_table, timing_summary
from .metrics import EvaluationReport, MetricsCalculator, evaluate

__all__ = [
    "AblationEngine",
    "AblationResult",
    "AblationTable",
    "EvaluationReport",
    "MetricsCalculator",
    "VariantResult",
    "ablation_table",
    "evaluate",
    "timing_summary",
]
