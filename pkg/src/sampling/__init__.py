"""
Sampling module for the Z-test-gated tier resampling loop.
"""

from .resampler import (
    BalanceResult,
    BalanceStep,
    SampleKind,
    SamplingAction,
    SamplingPlan,
    Tier,
    TierAssignment,
    assign_tiers,
    balance,
    oversample,
    plan_step,
    undersample,
)

__all__ = [
    "BalanceResult",
    "BalanceStep",
    "SampleKind",
    "SamplingAction",
    "SamplingPlan",
    "Tier",
    "TierAssignment",
    "assign_tiers",
    "balance",
    "oversample",
    "plan_step",
    "undersample",
]
