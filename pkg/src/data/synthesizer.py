"""
Seeded generator of imbalanced learner-record datasets.

Stands in for private course logs: class labels follow a proportion vector,
grades are uniform within each level's bin, and feature rows are per-level
prototype vectors plus Gaussian noise.
"""

import logging

import numpy as np
from pydantic import ValidationError

from src.config import SynthSpec
from src.errors import InvalidSpec

from .dataset import CATEGORY_TAGS, ScoreDataset
from .processor import GRADE_MAX, GRADE_MIN, LEVEL_EDGES, bin_grades

logger = logging.getLogger(__name__)

# Column counts per activity group: 60 audio/video sections, 8 chapter tests, 1 discussion score
GROUP_SIZES: tuple[int, ...] = (60, 8)
GROUP_PREFIXES: tuple[str, ...] = ("av", "ct", "disc")

PROTOTYPE_SPREAD = 15.0


def feature_schema(d: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """
    Column names and category tags for ``d`` synthetic features.

    The first 60 columns are AudioVideo, the next 8 ChapterTest, the rest Discussion.
    """
    names, tags = [], []
    bounds = np.cumsum(GROUP_SIZES)
    for j in range(d):
        group = int(np.searchsorted(bounds, j, side="right"))
        start = 0 if group == 0 else int(bounds[group - 1])
        names.append(f"{GROUP_PREFIXES[group]}_{j - start + 1:02d}")
        tags.append(CATEGORY_TAGS[group])
    return tuple(names), tuple(tags)


def level_bounds() -> list[tuple[float, float]]:
    """[lo, hi) grade interval of every level, the last one closed at 100."""
    edges = [GRADE_MIN, *LEVEL_EDGES, GRADE_MAX]
    return list(zip(edges[:-1], edges[1:]))


def synthesize_dataset(spec: SynthSpec | dict | None = None) -> ScoreDataset:
    """
    Generate a learnable, imbalanced dataset.

    Args:
        spec: ``SynthSpec`` or a plain dict with keys n, d, class_proportions, noise, seed

    Returns:
        ScoreDataset: n rows; ``levels[i] == bin_grade(grades[i])`` for every row and
            all values in [0, 100]. With ``noise == 0`` every row equals its level's
            prototype, so the levels are perfectly separable.

    Raises:
        InvalidSpec: If the spec fails validation.
    """
    if spec is None:
        spec = SynthSpec()
    elif isinstance(spec, dict):
        try:
            spec = SynthSpec.model_validate(spec)
        except ValidationError as e:
            raise InvalidSpec(f"Invalid synthetic spec: {e}") from e

    rng = np.random.default_rng(spec.seed)
    num_levels = len(spec.class_proportions)
    proportions = np.asarray(spec.class_proportions, dtype=np.float64)
    proportions = proportions / proportions.sum()

    levels = rng.choice(num_levels, size=spec.n, p=proportions)

    bounds = level_bounds()
    lo = np.array([bounds[k][0] for k in levels])
    hi = np.array([bounds[k][1] for k in levels])
    grades = rng.uniform(lo, hi)
    # uniform() can round up to hi for narrow float intervals
    grades = np.where(grades >= hi, np.nextafter(hi, lo), grades)
    grades = np.clip(grades, GRADE_MIN, GRADE_MAX)

    centers = np.array([(a + b) / 2.0 for a, b in bounds])
    prototypes = np.clip(
        centers[:, None] + rng.normal(0.0, PROTOTYPE_SPREAD, size=(num_levels, spec.d)), GRADE_MIN, GRADE_MAX
    )
    features = prototypes[levels]
    if spec.noise > 0:
        features = features + rng.normal(0.0, spec.noise, size=features.shape)
    features = np.clip(features, GRADE_MIN, GRADE_MAX)

    names, tags = feature_schema(spec.d)
    dataset = ScoreDataset(
        features=features,
        grades=grades,
        levels=bin_grades(grades),
        feature_names=names,
        feature_tags=tags,
    )
    logger.info("Synthesized %d rows x %d features, class counts %s", spec.n, spec.d, dataset.class_counts())
    return dataset
