"""
AblationEngine: Compare network layouts on one shared split and balanced training set.
"""

import json
import logging
import re
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pandas as pd

from src.config import BalanceConfig, TrainConfig
from src.data.dataset import ScoreDataset
from src.data.processor import apply_standardizer, fit_standardizer, split
from src.errors import EmptyDataset, InvalidKind
from src.ml.network import BN_LAYOUTS, DEPTH_LAYOUTS, make_layout
from src.ml.trainer import predict, train
from src.sampling import BalanceResult, balance

from .metrics import EvaluationReport, MetricsCalculator

logger = logging.getLogger(__name__)

ABLATION_KINDS: dict[str, tuple[str, ...]] = {"bn-layouts": BN_LAYOUTS, "depths": DEPTH_LAYOUTS}

ABSENT = "—"


@dataclass(frozen=True)
class AblationTable:
    """The same rows rendered as CSV and as aligned text."""

    csv: str
    text: str


@dataclass(frozen=True)
class VariantResult:
    name: str
    report: EvaluationReport
    train_seconds: float
    epochs_run: int
    final_loss: float | None


@dataclass
class AblationResult:
    """
    Outcome of one ablation.

    Attributes:
        kind: "bn-layouts" or "depths"
        variants: One result per layout, in run order
        balance: Balancing outcome of the shared training part
        train_rows: Training rows after balancing
        test_rows: Held-out rows
    """

    kind: str
    variants: list[VariantResult]
    balance: BalanceResult
    train_rows: int
    test_rows: int
    table: AblationTable = field(init=False)

    def __post_init__(self):
        self.table = ablation_table({v.name: v.report for v in self.variants})

    def reports(self) -> dict[str, dict[str, Any]]:
        return {v.name: v.report.to_dict() for v in sorted(self.variants, key=lambda v: v.name)}

    def timing(self) -> list[dict[str, Any]]:
        return timing_summary(self.variants, self.kind)


def ablation_table(reports: dict[str, EvaluationReport]) -> AblationTable:
    """
    Render per-class recall and total accuracy for several runs.

    Rows are ordered by run name. Levels without support in a run show "—".

    Args:
        reports: Run name -> report

    Returns:
        AblationTable: CSV (4-decimal fractions) and fixed-width text (percentages)
    """
    names = sorted(reports)
    levels: list[str] = []
    for name in names:
        levels += [level for level in reports[name].support if level not in levels]

    csv_rows, text_rows = [], []
    for name in names:
        report = reports[name]
        recalls = [report.per_class_recall.get(level) for level in levels]
        csv_rows.append([name, *[ABSENT if r is None else f"{r:.4f}" for r in recalls], f"{report.total_accuracy:.4f}"])
        text_rows.append(
            [name, *[ABSENT if r is None else f"{r:.2%}" for r in recalls], f"{report.total_accuracy:.2%}"]
        )

    columns = ["run", *[f"Acc of {level}" for level in levels], "Tol acc"]
    csv_text = pd.DataFrame(csv_rows, columns=columns).to_csv(index=False, lineterminator="\n")
    text = pd.DataFrame(text_rows, columns=columns).to_string(index=False) + "\n"
    return AblationTable(csv=csv_text, text=text)


def _depth(name: str) -> int | None:
    match = re.fullmatch(r"depth(\d+)", name)
    return int(match.group(1)) if match else None


def timing_summary(variants: list[VariantResult], kind: str) -> list[dict[str, Any]]:
    """
    Training time per variant, plus time cost per accuracy point for depth ablations.

    For consecutive depths, ``seconds_per_accuracy_point`` is the extra training
    time divided by the accuracy change in percentage points (None for the
    shallowest depth, for unchanged accuracy, and for layout ablations).
    """
    ordered = sorted(variants, key=lambda v: (_depth(v.name) or 0, v.name))
    rows, previous = [], None
    for variant in ordered:
        rate = None
        if kind == "depths" and previous is not None:
            gain = (variant.report.total_accuracy - previous.report.total_accuracy) * 100.0
            if gain != 0:
                rate = (variant.train_seconds - previous.train_seconds) / gain
        rows.append(
            {
                "run": variant.name,
                "train_seconds": variant.train_seconds,
                "total_accuracy": variant.report.total_accuracy,
                "epochs_run": variant.epochs_run,
                "seconds_per_accuracy_point": rate,
            }
        )
        previous = variant
    return rows


class AblationEngine:
    """Run every layout of an ablation on the same data and seeds."""

    def __init__(
        self,
        kind: str,
        train_config: TrainConfig | None = None,
        balance_config: BalanceConfig | None = None,
        hidden_width: int = 128,
        ratio: float = 0.7,
        split_seed: int = 42,
        stratify: bool = False,
    ):
        """
        Initialize AblationEngine.

        Args:
            kind: "bn-layouts" (Structure1-3 and SBNEDNN) or "depths" (3-7 dense layers)
            train_config: Training hyperparameters shared by all variants
            balance_config: Settings of the training-part balancing loop
            hidden_width: Hidden Dense width of every variant
            ratio: Training fraction of the split
            split_seed: Seed of the shared split
            stratify: Split within each level

        Raises:
            InvalidKind: For an unknown ablation kind.
        """
        if kind not in ABLATION_KINDS:
            raise InvalidKind(f"Unknown ablation '{kind}', expected one of {sorted(ABLATION_KINDS)}")
        self.kind = kind
        self.train_config = train_config or TrainConfig()
        self.balance_config = balance_config or BalanceConfig()
        self.hidden_width = hidden_width
        self.ratio = ratio
        self.split_seed = split_seed
        self.stratify = stratify

    @property
    def variants(self) -> tuple[str, ...]:
        return ABLATION_KINDS[self.kind]

    def run(
        self,
        dataset: ScoreDataset,
        progress_callback: Callable[[int, int, str], None] | None = None,
    ) -> AblationResult:
        """
        Split, balance the training part, then train and evaluate every variant.

        The held-out part keeps its original distribution. Non-convergence of the
        balancing loop is logged and the last resampled training set is used.

        Args:
            dataset: Full dataset
            progress_callback: Called as callback(index, total, variant) before each variant

        Returns:
            AblationResult

        Raises:
            EmptyDataset: If the split leaves no held-out rows.
            TrainingDiverged: If any variant's loss becomes non-finite.
        """
        parts = split(dataset, self.ratio, self.split_seed, stratify=self.stratify)
        if len(parts.test) == 0:
            raise EmptyDataset("Ablation needs held-out rows; the split left the test part empty")

        balanced = balance(parts.train, self.balance_config)
        if not balanced.converged:
            logger.warning("Training part did not pass the Z-test; using the last resampled set")
        train_set = balanced.balanced

        standardizer = fit_standardizer(train_set)
        x_train = apply_standardizer(standardizer, train_set)

        results = []
        total = len(self.variants)
        for index, name in enumerate(self.variants):
            if progress_callback is not None:
                progress_callback(index, total, name)
            logger.info("Ablation %s: variant %d/%d %s", self.kind, index + 1, total, name)

            spec = make_layout(name, input_dim=dataset.n_features, hidden_width=self.hidden_width)
            model = train(spec, x_train, train_set.levels, self.train_config).with_standardizer(standardizer)
            report = MetricsCalculator.evaluate(predict(model, parts.test.features), parts.test.levels)
            results.append(
                VariantResult(
                    name=name,
                    report=report,
                    train_seconds=model.train_seconds,
                    epochs_run=len(model.training_log),
                    final_loss=model.training_log[-1].mean_loss if model.training_log else None,
                )
            )
            logger.info("Ablation %s: %s total accuracy %.4f (%.1fs)", self.kind, name, report.total_accuracy,
                        model.train_seconds)

        return AblationResult(
            kind=self.kind,
            variants=results,
            balance=balanced,
            train_rows=len(train_set),
            test_rows=len(parts.test),
        )

    @staticmethod
    def save_results(result: AblationResult, output_dir: str | Path) -> dict[str, str]:
        """
        Write the ablation artifacts.

        Files: ``ablation.csv``, ``ablation.txt``, ``reports.json`` (deterministic)
        and ``timing.json`` (wall-clock, varies between runs).

        Returns:
            dict: Artifact name -> path
        """
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "ablation_csv": out / "ablation.csv",
            "ablation_text": out / "ablation.txt",
            "reports": out / "reports.json",
            "timing": out / "timing.json",
        }
        paths["ablation_csv"].write_text(result.table.csv, encoding="utf-8")
        paths["ablation_text"].write_text(result.table.text, encoding="utf-8")
        with open(paths["reports"], "w", encoding="utf-8") as f:
            json.dump(result.reports(), f, indent=2)
        with open(paths["timing"], "w", encoding="utf-8") as f:
            json.dump({"kind": result.kind, "variants": result.timing()}, f, indent=2)
        logger.info("Ablation results saved to %s", out)
        return {name: str(path) for name, path in paths.items()}


