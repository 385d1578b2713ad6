"""
Resampler: Z-test-gated over/under-sampling of grade tiers.

Each iteration diagnoses the current grade vector, picks one action from the
sign of the skewness (oversample the lower or upper tier) and one from the
sign of the excess kurtosis (undersample or oversample the medium tier), and
applies them in that order until the Gaussian-shape test passes.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from src.config import BalanceConfig
from src.data.dataset import LEVEL_NAMES, ScoreDataset
from src.errors import EmptyClass, TooFewClasses
from src.stats import DistributionDiagnostics, diagnose, passes_gaussian_test

logger = logging.getLogger(__name__)

STOP_CONVERGED = "converged"
STOP_MAX_ITERATIONS = "max_iterations"
STOP_MAX_GROWTH = "max_growth"


class Tier(str, Enum):
    """Grade-ordered third of the level list targeted by a sampling action."""

    LOWER = "Lower"
    MEDIUM = "Medium"
    UPPER = "Upper"


class SampleKind(str, Enum):
    """Whether an action duplicates rows or removes them."""

    OVERSAMPLE = "Oversample"
    UNDERSAMPLE = "Undersample"


@dataclass(frozen=True)
class TierAssignment:
    """Partition of the grade-ordered class list into lower, medium and upper tiers."""

    lower: tuple
    medium: tuple
    upper: tuple

    def members(self, tier: Tier) -> tuple:
        return {Tier.LOWER: self.lower, Tier.MEDIUM: self.medium, Tier.UPPER: self.upper}[tier]


@dataclass(frozen=True)
class SamplingAction:
    """One resampling step applied to every class of a tier."""

    target_tier: Tier
    kind: SampleKind
    step_fraction: float

    def __str__(self) -> str:
        return f"{self.kind.value} {self.target_tier.value}"


@dataclass(frozen=True)
class SamplingPlan:
    """Ordered actions chosen from one diagnostics snapshot."""

    actions: tuple[SamplingAction, ...]
    source_diagnostics: DistributionDiagnostics


@dataclass(frozen=True)
class BalanceStep:
    """One trace entry: the snapshot that was diagnosed and the plan applied to it."""

    iteration: int
    diagnostics: DistributionDiagnostics
    plan: SamplingPlan
    class_counts: dict[str, int]

    def to_dict(self) -> dict[str, Any]:
        """
        Flatten the step for the JSON trace.

        Returns:
            dict: Iteration index, the diagnosed S, K, max score and Z, the action
                labels in application order and the class counts before the actions
        """
        return {
            "iteration": self.iteration,
            "skewness": self.diagnostics.skewness,
            "kurtosis": self.diagnostics.kurtosis,
            "max_score": self.diagnostics.max_score,
            "z": self.diagnostics.z_statistic,
            "actions": [str(action) for action in self.plan.actions],
            "class_counts": self.class_counts,
        }


@dataclass(frozen=True)
class BalanceResult:
    """
    Outcome of the balancing loop.

    Attributes:
        balanced: Final dataset (the input itself when no iteration ran)
        iterations: Number of executed iterations
        trace: One entry per iteration, in order
        converged: True when the final dataset passes the Gaussian-shape test
        final_diagnostics: Diagnostics of ``balanced``
        warnings: Skip messages collected from the sampling actions
        stop_reason: ``converged``, ``max_iterations`` or ``max_growth``
    """

    balanced: ScoreDataset
    iterations: int
    trace: list[BalanceStep]
    converged: bool
    final_diagnostics: DistributionDiagnostics
    warnings: list[str] = field(default_factory=list)
    stop_reason: str = STOP_CONVERGED

    def trace_to_json(self) -> list[dict[str, Any]]:
        return [step.to_dict() for step in self.trace]


def assign_tiers(labels) -> TierAssignment:
    """
    Split grade-ordered class labels into contiguous thirds.

    Six labels give two per tier; when the count is not a multiple of three
    the lower tiers take the extra labels.

    Raises:
        TooFewClasses: With fewer than three labels.
    """
    labels = list(labels)
    if len(labels) < 3:
        raise TooFewClasses(f"Need at least 3 classes to form tiers, got {len(labels)}")
    sizes = [len(part) for part in np.array_split(np.arange(len(labels)), 3)]
    first, second = sizes[0], sizes[0] + sizes[1]
    return TierAssignment(
        lower=tuple(labels[:first]),
        medium=tuple(labels[first:second]),
        upper=tuple(labels[second:]),
    )


def plan_step(diag: DistributionDiagnostics, step_fraction: float = 0.1) -> SamplingPlan:
    """
    Pick the two actions for one iteration.

    S < 0 oversamples the lower tier, otherwise the upper tier. K > 0
    undersamples the medium tier, otherwise it is oversampled. The skewness
    action comes first.
    """
    if diag.skewness < 0:
        s_action = SamplingAction(Tier.LOWER, SampleKind.OVERSAMPLE, step_fraction)
    else:
        s_action = SamplingAction(Tier.UPPER, SampleKind.OVERSAMPLE, step_fraction)

    if diag.kurtosis > 0:
        k_action = SamplingAction(Tier.MEDIUM, SampleKind.UNDERSAMPLE, step_fraction)
    else:
        k_action = SamplingAction(Tier.MEDIUM, SampleKind.OVERSAMPLE, step_fraction)

    return SamplingPlan(actions=(s_action, k_action), source_diagnostics=diag)


def _class_rows(ds: ScoreDataset, label, warnings: list[str] | None, strict: bool) -> np.ndarray | None:
    rows = np.flatnonzero(ds.levels == _label_index(label))
    if rows.size == 0:
        message = f"Class {_label_name(label)} has no rows; skipped"
        if strict:
            raise EmptyClass(message)
        logger.warning(message)
        if warnings is not None:
            warnings.append(message)
        return None
    return rows


def oversample(
    ds: ScoreDataset,
    classes,
    step_fraction: float,
    seed: int | np.random.Generator = 0,
    warnings: list[str] | None = None,
    strict: bool = False,
) -> ScoreDataset:
    """
    Append ceil(step_fraction * count) duplicated rows to every targeted class.

    Duplicates are drawn uniformly with replacement from the class's existing
    rows and appended after all original rows, class by class in label order.

    Args:
        ds: Source dataset (not modified)
        classes: Level indices or names to grow
        step_fraction: Fraction of the current class count to add, in (0, 1]
        seed: Seed or generator for the draws
        warnings: Optional list that collects skip messages
        strict: Raise EmptyClass instead of skipping an empty class

    Returns:
        ScoreDataset: Original rows followed by the duplicates
    """
    rng = np.random.default_rng(seed)
    extra = []
    for label in sorted(classes, key=_label_index):
        rows = _class_rows(ds, label, warnings, strict)
        if rows is None:
            continue
        count = int(math.ceil(step_fraction * rows.size))
        extra.append(rng.choice(rows, size=count, replace=True))
    if not extra:
        return ds
    return ds.take(np.concatenate([np.arange(len(ds)), *extra]))


def undersample(
    ds: ScoreDataset,
    classes,
    step_fraction: float,
    seed: int | np.random.Generator = 0,
    floor: int = 5,
    warnings: list[str] | None = None,
    strict: bool = False,
) -> ScoreDataset:
    """
    Remove floor(step_fraction * count) uniformly chosen rows from every targeted class.

    A class never drops below ``floor`` rows; a class already at or below the
    floor is left unchanged and a warning is recorded. Surviving rows keep
    their original order.
    """
    rng = np.random.default_rng(seed)
    keep = np.ones(len(ds), dtype=bool)
    for label in sorted(classes, key=_label_index):
        rows = _class_rows(ds, label, warnings, strict)
        if rows is None:
            continue
        count = min(int(math.floor(step_fraction * rows.size)), max(rows.size - floor, 0))
        if count <= 0:
            message = f"Class {_label_name(label)} has {rows.size} rows (floor {floor}); not undersampled"
            logger.warning(message)
            if warnings is not None:
                warnings.append(message)
            continue
        keep[rng.choice(rows, size=count, replace=False)] = False
    if keep.all():
        return ds
    return ds.take(np.flatnonzero(keep))


def balance(
    ds: ScoreDataset,
    config: BalanceConfig | None = None,
    tiers: TierAssignment | None = None,
) -> BalanceResult:
    """
    Resample until the grade distribution passes the Gaussian-shape test.

    Repeats diagnose -> plan_step -> apply actions, recomputing the diagnostics
    on the current dataset's raw grades every iteration, until Z < epsilon,
    ``max_iterations`` iterations have run, or the dataset holds more than
    ``max_growth`` times the input rows. Hitting either cap is reported through
    ``converged=False`` and ``stop_reason``, not raised.

    Args:
        ds: Dataset to balance (not modified)
        config: Loop settings (step 0.1, cap 100, floor 5, growth 8x by default)
        tiers: Explicit tier membership; defaults to contiguous thirds of L1..L6

    Returns:
        BalanceResult: Final dataset, full trace and convergence flag

    Raises:
        DegenerateInput: If the grades have fewer than 2 distinct values.
    """
    config = config or BalanceConfig()
    tiers = tiers or assign_tiers(range(len(LEVEL_NAMES)))
    rng = np.random.default_rng(config.seed)

    current = ds
    trace: list[BalanceStep] = []
    warnings: list[str] = []
    diag = diagnose(current.grades, config.diagnostics)
    logger.info("Balance start: n=%d S=%.4f K=%.4f Z=%.4f", diag.n, diag.skewness, diag.kurtosis, diag.z_statistic)

    row_limit = config.max_growth * len(ds)
    while (
        not passes_gaussian_test(diag, config.diagnostics)
        and len(trace) < config.max_iterations
        and len(current) <= row_limit
    ):
        plan = plan_step(diag, config.step_fraction)
        trace.append(BalanceStep(len(trace), diag, plan, current.class_counts()))

        for action in plan.actions:
            members = tiers.members(action.target_tier)
            if action.kind is SampleKind.OVERSAMPLE:
                current = oversample(current, members, action.step_fraction, rng, warnings)
            else:
                current = undersample(current, members, action.step_fraction, rng, config.floor, warnings)

        diag = diagnose(current.grades, config.diagnostics)
        logger.info(
            "Balance iteration %d: %s -> n=%d Z=%.4f",
            len(trace),
            ", ".join(str(a) for a in plan.actions),
            diag.n,
            diag.z_statistic,
        )

    converged = passes_gaussian_test(diag, config.diagnostics)
    if converged:
        stop_reason = STOP_CONVERGED
    elif len(current) > row_limit:
        stop_reason = STOP_MAX_GROWTH
        message = (
            f"Dataset grew from {len(ds)} to {len(current)} rows, past {config.max_growth:g}x its input size; "
            f"stopped after {len(trace)} iterations"
        )
        logger.warning(message)
        warnings.append(message)
    else:
        stop_reason = STOP_MAX_ITERATIONS
    if not converged:
        logger.warning(
            "Balance did not converge after %d iterations (Z=%.4f, %s)", len(trace), diag.z_statistic, stop_reason
        )
    return BalanceResult(
        balanced=current,
        iterations=len(trace),
        trace=trace,
        converged=converged,
        final_diagnostics=diag,
        warnings=warnings,
        stop_reason=stop_reason,
    )


def _label_index(label) -> int:
    if isinstance(label, str):
        return LEVEL_NAMES.index(label)
    return int(label)


def _label_name(label) -> str:
    index = _label_index(label)
    return LEVEL_NAMES[index] if 0 <= index < len(LEVEL_NAMES) else str(label)
