"""
Pydantic models for stage configuration and run manifests.
"""

import math
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator

VERSION = "1.0.0"

NUM_LEVELS = 6

# L6 dominant, L4 smallest
DEFAULT_CLASS_PROPORTIONS: tuple[float, ...] = (0.05, 0.05, 0.10, 0.03, 0.17, 0.60)


class _FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class DiagnosticsConfig(_FrozenModel):
    """Reference scale and threshold of the Gaussian-shape test."""

    sigma_ref: float = Field(0.36, gt=0.0, description="Scale dividing the max score to form Z")
    epsilon: float = Field(1.96, gt=0.0, description="Z-test threshold; the test passes when Z < epsilon")


class SynthSpec(_FrozenModel):
    """Parameters of the synthetic learner-record generator."""

    n: int = Field(6000, ge=6, description="Number of learners")
    d: int = Field(69, ge=1, description="Number of activity features")
    class_proportions: tuple[float, ...] = Field(
        DEFAULT_CLASS_PROPORTIONS, description="Probability of each level L1..L6"
    )
    noise: float = Field(10.0, ge=0.0, description="Std of the Gaussian noise added to class prototypes")
    seed: int = Field(42, ge=0, description="Generator seed")

    @field_validator("class_proportions")
    @classmethod
    def _check_proportions(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if len(value) != NUM_LEVELS:
            raise ValueError(f"class_proportions needs {NUM_LEVELS} entries, got {len(value)}")
        if any(not math.isfinite(p) or p < 0 for p in value):
            raise ValueError(f"class_proportions must be finite and nonnegative: {value}")
        if abs(sum(value) - 1.0) > 1e-9:
            raise ValueError(f"class_proportions must sum to 1, got {sum(value)}")
        return value


class BalanceConfig(_FrozenModel):
    """Settings of the Z-test-gated resampling loop."""

    diagnostics: DiagnosticsConfig = Field(default_factory=DiagnosticsConfig)
    step_fraction: float = Field(0.1, gt=0.0, le=1.0, description="Fraction of a class resampled per action")
    max_iterations: int = Field(100, ge=0, description="Iteration cap of the loop")
    floor: int = Field(5, ge=1, description="Undersampling never shrinks a class below this count")
    max_growth: float = Field(
        8.0, ge=1.0, description="Stop once the dataset exceeds this multiple of its input size"
    )
    seed: int = Field(42, ge=0, description="Resampling seed")


class TrainConfig(_FrozenModel):
    """Mini-batch training hyperparameters."""

    batch_size: int = Field(128, ge=2, description="Mini-batch size")
    epochs: int = Field(100, ge=0, description="Maximum number of epochs")
    lr: float = Field(1e-3, gt=0.0, description="Adam learning rate")
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(1e-8, gt=0.0)
    patience: int | None = Field(10, ge=1, description="Epochs without loss improvement before stopping")
    seed: int = Field(42, ge=0, description="Seed for initialization and shuffling")


class RunManifest(BaseModel):
    """Everything needed to reproduce one CLI invocation."""

    command: str
    version: str
    seed: int
    seed_scheme: str
    derived_seeds: dict[str, int] = Field(default_factory=dict)
    config: dict[str, Any] = Field(default_factory=dict)
    inputs: dict[str, str] = Field(default_factory=dict)
    outputs: dict[str, str] = Field(default_factory=dict)
    exit_code: int = 0
    created_at: str
