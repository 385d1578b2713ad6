"""
Exception hierarchy shared by every pipeline stage.

Each exception carries the process exit code the command-line interface returns
when it escapes a subcommand.
"""


class PipelineError(Exception):
    """Base class for all pipeline failures."""

    exit_code: int = 1


class UsageError(PipelineError, ValueError):
    """Invalid command-line usage or configuration value."""


class FileError(PipelineError, OSError):
    """Input file missing or unreadable."""


class SchemaError(PipelineError, ValueError):
    """CSV or JSON content does not follow the expected schema."""


class DimensionMismatch(PipelineError, ValueError):
    """Array widths or shapes do not chain."""


class InvalidSpec(PipelineError, ValueError):
    """Synthetic-data spec or network spec violates its invariants."""


class InvalidKind(PipelineError, ValueError):
    """Unknown layout or ablation kind."""


class OutOfRange(PipelineError, ValueError):
    """A grade lies outside [0, 100]."""


class LabelOutOfRange(PipelineError, ValueError):
    """A class index lies outside [0, num_classes)."""


class TooFewClasses(PipelineError, ValueError):
    """Tier assignment needs at least three classes."""


class LengthMismatch(PipelineError, ValueError):
    """Predictions and labels differ in length."""


class Unfitted(PipelineError, RuntimeError):
    """Inference requested before any training step populated BN statistics."""


class StaleCache(PipelineError, RuntimeError):
    """Backward pass called with a forward cache that no longer matches the network."""


class ModelFormatError(PipelineError, ValueError):
    """Model file cannot be decoded."""


class DegenerateInput(PipelineError, ValueError):
    """Data cannot support the requested statistic (too few rows, zero spread, non-finite values)."""

    exit_code = 2


class EmptyDataset(PipelineError, ValueError):
    """No rows left to work with."""

    exit_code = 2


class EmptyInput(PipelineError, ValueError):
    """Empty prediction or label vector."""

    exit_code = 2


class EmptyClass(PipelineError, ValueError):
    """A targeted class has no rows."""

    exit_code = 2


class BatchTooSmall(PipelineError, ValueError):
    """Training-mode batch normalization needs at least two rows."""

    exit_code = 2


class TrainingDiverged(PipelineError, ArithmeticError):
    """Loss became non-finite during training."""

    exit_code = 5
