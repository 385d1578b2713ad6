"""
OutputFormatter: Format pipeline results for stdout and logs.
"""

import json
from typing import Any

import numpy as np


def _default(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


class OutputFormatter:
    """Format diagnostics, balancing summaries and evaluation reports."""

    @staticmethod
    def format_json(payload: Any) -> str:
        """
        Serialize a payload as indented JSON.

        Args:
            payload: Dicts/lists of plain values and numpy scalars or arrays

        Returns:
            str: JSON text (keys keep insertion order, non-ASCII kept as is)
        """
        return json.dumps(payload, indent=2, ensure_ascii=False, default=_default)

    @staticmethod
    def format_diagnostics(diag: dict) -> str:
        """
        Format one diagnostics snapshot on a single line.

        Args:
            diag (dict): Output of ``DistributionDiagnostics.to_dict``

        Returns:
            str: Formatted line
        """
        verdict = "PASS" if diag["passes"] else "FAIL"
        return (
            f"n={diag['n']} mean={diag['mean']:.2f} std={diag['std_dev']:.2f} "
            f"S={diag['skewness']:+.4f} K={diag['kurtosis']:+.4f} MS={diag['max_score']:.4f} "
            f"Z={diag['z_statistic']:.4f} [{verdict}]"
        )

    @staticmethod
    def format_class_counts(counts: dict[str, int]) -> str:
        """Level counts as "L1=10 L2=4 ..."."""
        return " ".join(f"{level}={count}" for level, count in counts.items())

    @staticmethod
    def format_report(report: dict) -> str:
        """
        Format an evaluation report as a small fixed-width table.

        Args:
            report (dict): Output of ``EvaluationReport.to_dict``

        Returns:
            str: One line per level (recall and support) plus the total accuracy;
                levels without support show "—"
        """
        output = f"{'Level':8s} | {'Recall':>8s} | {'Support':>7s}\n"
        output += "-" * 30 + "\n"
        for level, support in report["support"].items():
            recall = report["per_class_recall"].get(level)
            shown = "—" if recall is None else f"{recall:.2%}"
            output += f"{level:8s} | {shown:>8s} | {support:>7d}\n"
        output += "-" * 30 + "\n"
        output += f"{'Tol acc':8s} | {report['total_accuracy']:>8.2%} |"
        return output

    @staticmethod
    def format_timing(rows: list[dict]) -> str:
        """
        Format per-variant training time under an ablation table.

        Args:
            rows (list[dict]): Output of ``AblationResult.timing``

        Returns:
            str: A header line and one line per run; the cost per accuracy
                point shows "—" where it is undefined
        """
        width = max([len("run"), *(len(row["run"]) for row in rows)])
        output = f"\n{'run':{width}s} | {'train_seconds':>13s} | {'epochs':>6s} | {'s/acc point':>11s}\n"
        for row in rows:
            rate = row["seconds_per_accuracy_point"]
            shown = "—" if rate is None else f"{rate:.3f}"
            output += f"{row['run']:{width}s} | {row['train_seconds']:>13.3f} | {row['epochs_run']:>6d} | {shown:>11s}\n"
        return output
