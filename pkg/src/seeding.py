"""
Fan one user seed out into independent per-stage seeds.
"""

import numpy as np

STAGES: dict[str, int] = {"split": 1, "balance": 2, "init": 3, "shuffle": 4}

SEED_SCHEME = "SeedSequence([seed, stage_index]).generate_state(1)[0]; " + ", ".join(
    f"{name}={index}" for name, index in STAGES.items()
)


def derive_seed(seed: int, stage: str) -> int:
    """
    Derive the seed of one pipeline stage.

    Args:
        seed: User-facing seed (``--seed``)
        stage: One of ``STAGES``

    Returns:
        int: 32-bit seed, stable across platforms and numpy versions
    """
    if stage not in STAGES:
        raise KeyError(f"Unknown stage '{stage}', expected one of {sorted(STAGES)}")
    return int(np.random.SeedSequence([seed, STAGES[stage]]).generate_state(1)[0])


def derive_seeds(seed: int, stages: list[str] | None = None) -> dict[str, int]:
    """Derive seeds for several stages at once (all stages by default)."""
    names = stages if stages is not None else list(STAGES)
    return {name: derive_seed(seed, name) for name in names}
