"""
CLIInterface: Batch command-line front door of the grade-prediction pipeline.

Subcommands: synth, diagnose, balance, train, evaluate, ablate. Exit codes:
0 success, 1 usage/schema, 2 degenerate data, 3 diagnosis failed,
4 non-convergence, 5 training divergence.
"""

import argparse
import json
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from src.config import VERSION, BalanceConfig, DiagnosticsConfig, RunManifest, SynthSpec, TrainConfig
from src.data import apply_standardizer, fit_standardizer, load_csv, split, synthesize_dataset, write_csv
from src.errors import DimensionMismatch, FileError, InvalidSpec, PipelineError, UsageError
from src.ml import load_model, make_layout, predict, save_model, train, write_training_log
from src.sampling import balance
from src.seeding import SEED_SCHEME, derive_seed, derive_seeds
from src.stats import diagnose, passes_gaussian_test
from src.validation import AblationEngine, MetricsCalculator
from src.validation.ablation import ABLATION_KINDS

from .formatter import OutputFormatter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DIAGNOSIS_FAILED = 3
EXIT_NOT_CONVERGED = 4

DEFAULT_SEED = 42


class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors map to exit code 1 instead of 2."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help=f"Global seed (default {DEFAULT_SEED})")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")


def _add_diagnostics(parser: argparse.ArgumentParser) -> None:
    defaults = DiagnosticsConfig()
    parser.add_argument("--epsilon", type=float, default=defaults.epsilon, help="Z-test threshold")
    parser.add_argument("--sigma-ref", type=float, default=defaults.sigma_ref, help="Reference scale of Z")


def _add_sampler(parser: argparse.ArgumentParser) -> None:
    defaults = BalanceConfig()
    parser.add_argument("--step-fraction", type=float, default=defaults.step_fraction)
    parser.add_argument("--max-iterations", type=int, default=defaults.max_iterations)
    parser.add_argument("--floor", type=int, default=defaults.floor, help="Minimum rows per class when undersampling")
    parser.add_argument(
        "--max-growth",
        type=float,
        default=defaults.max_growth,
        help="Stop balancing once the dataset exceeds this multiple of its input size",
    )


def _add_training(parser: argparse.ArgumentParser, with_layout: bool) -> None:
    defaults = TrainConfig()
    if with_layout:
        parser.add_argument("--layout", default="sbnednn", help="structure1-3, sbnednn or depth3-depth7")
    parser.add_argument("--hidden-width", type=int, default=128)
    parser.add_argument("--batch-size", type=int, default=defaults.batch_size)
    parser.add_argument("--epochs", type=int, default=defaults.epochs)
    parser.add_argument("--lr", type=float, default=defaults.lr)
    parser.add_argument(
        "--patience", type=int, default=defaults.patience, help="Early-stop patience in epochs (0 disables)"
    )
    parser.add_argument("--ratio", type=float, default=0.7, help="Training fraction of the split")
    parser.add_argument("--stratify", action="store_true", help="Split within each level")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per pipeline stage."""
    parser = _ArgumentParser(prog="grade-pipeline", description="Imbalance-aware grade-level prediction pipeline")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="Generate a synthetic learner-record CSV")
    _add_common(synth)
    synth.add_argument("--input", help="Optional JSON spec {n, d, class_proportions, noise, seed}")
    synth.add_argument("--output", required=True, help="Destination CSV")
    synth.add_argument("--n-samples", type=int, default=None)
    synth.add_argument("--noise", type=float, default=None)

    diag = commands.add_parser("diagnose", help="Skewness/kurtosis Z-test of the grade column")
    _add_common(diag)
    diag.add_argument("--input", required=True)
    diag.add_argument("--output", help="Optional JSON file for the diagnostics")
    _add_diagnostics(diag)

    bal = commands.add_parser("balance", help="Resample until the Z-test passes")
    _add_common(bal)
    bal.add_argument("--input", required=True)
    bal.add_argument("--output", required=True, help="Balanced CSV")
    _add_diagnostics(bal)
    _add_sampler(bal)

    tr = commands.add_parser("train", help="Split, standardize, train and evaluate one layout")
    _add_common(tr)
    tr.add_argument("--input", required=True)
    tr.add_argument("--output", required=True, help="Run directory")
    _add_training(tr, with_layout=True)

    ev = commands.add_parser("evaluate", help="Evaluate a saved model on a CSV")
    _add_common(ev)
    ev.add_argument("--model", required=True)
    ev.add_argument("--input", required=True)
    ev.add_argument("--output", help="Optional JSON file for the report")

    ab = commands.add_parser("ablate", help="Compare BN layouts or network depths")
    _add_common(ab)
    ab.add_argument("--input", required=True)
    ab.add_argument("--output", required=True, help="Run directory")
    ab.add_argument("--ablation", required=True, choices=sorted(ABLATION_KINDS))
    _add_diagnostics(ab)
    _add_sampler(ab)
    _add_training(ab, with_layout=False)

    return parser


class CLIInterface:
    """Parse arguments, run one pipeline stage and map outcomes to exit codes."""

    def __init__(self):
        """Initialize CLIInterface."""
        self.parser = build_parser()
        self.formatter = OutputFormatter()

    def run(self, argv: list[str] | None = None) -> int:
        """
        Run one subcommand.

        Args:
            argv: Arguments without the program name (defaults to ``sys.argv[1:]``)

        Returns:
            int: Process exit code

        Example:
            >>> CLIInterface().run(["diagnose", "--input", "grades.csv"])
            3
        """
        try:
            args = self.parser.parse_args(argv)
        except UsageError as e:
            logger.error("%s", e)
            return e.exit_code
        except SystemExit as e:
            return int(e.code or 0)

        if args.verbose:
            logging.getLogger().setLevel(logging.DEBUG)

        handler = getattr(self, f"_cmd_{args.command}")
        try:
            return handler(args)
        except PipelineError as e:
            logger.error("%s: %s", type(e).__name__, e)
            return e.exit_code
        except ValidationError as e:
            logger.error("Invalid configuration: %s", e)
            return UsageError.exit_code
        except Exception:
            logger.exception("Unexpected error while running '%s'", args.command)
            return 1

    # -- subcommands -----------------------------------------------------

    def _cmd_synth(self, args: argparse.Namespace) -> int:
        """Write a synthetic dataset."""
        spec = SynthSpec()
        if args.input:
            path = Path(args.input)
            if not path.is_file():
                raise FileError(f"Spec file not found: {path}")
            try:
                spec = SynthSpec.model_validate_json(path.read_text(encoding="utf-8"))
            except ValidationError as e:
                raise InvalidSpec(f"Invalid synthetic spec {path}: {e}") from e

        overrides: dict[str, Any] = {}
        if args.n_samples is not None:
            overrides["n"] = args.n_samples
        if args.noise is not None:
            overrides["noise"] = args.noise
        if args.seed is not None:
            overrides["seed"] = args.seed
        try:
            spec = SynthSpec.model_validate({**spec.model_dump(), **overrides})
        except ValidationError as e:
            raise InvalidSpec(f"Invalid synthetic spec: {e}") from e

        dataset = synthesize_dataset(spec)
        output = write_csv(dataset, args.output)
        print(self.formatter.format_json({"rows": len(dataset), "class_counts": dataset.class_counts()}))

        self._write_manifest(
            args,
            self._sibling(output, "manifest.json"),
            seed=spec.seed,
            derived={"synth": spec.seed},
            config={"synth": spec.model_dump()},
            inputs={"spec": args.input} if args.input else {},
            outputs={"dataset": str(output)},
            exit_code=EXIT_OK,
        )
        return EXIT_OK

    def _cmd_diagnose(self, args: argparse.Namespace) -> int:
        """Print the diagnostics JSON; exit 3 when the Z-test fails."""
        config = DiagnosticsConfig(sigma_ref=args.sigma_ref, epsilon=args.epsilon)
        dataset = load_csv(args.input)
        diag = diagnose(dataset.grades, config)

        payload = diag.to_dict(config)
        payload["class_counts"] = dataset.class_counts()
        payload["dropped_rows"] = dataset.dropped_rows
        logger.info("Diagnostics: %s", self.formatter.format_diagnostics(payload))
        print(self.formatter.format_json(payload))

        outputs = {}
        if args.output:
            outputs["diagnostics"] = str(self._write_json(payload, args.output))
        exit_code = EXIT_OK if passes_gaussian_test(diag, config) else EXIT_DIAGNOSIS_FAILED

        manifest_path = (
            self._sibling(Path(args.output), "manifest.json")
            if args.output
            else self._sibling(Path(args.input), "diagnose.manifest.json")
        )
        self._write_manifest(
            args,
            manifest_path,
            seed=self._seed(args),
            config={"diagnostics": config.model_dump()},
            inputs={"dataset": args.input},
            outputs=outputs,
            exit_code=exit_code,
        )
        return exit_code

    def _cmd_balance(self, args: argparse.Namespace) -> int:
        """Write the balanced CSV and trace; exit 4 when the loop hits its cap."""
        seed = self._seed(args)
        config = self._balance_config(args, seed)
        dataset = load_csv(args.input)
        result = balance(dataset, config)

        output = write_csv(result.balanced, args.output)
        trace_path = self._write_json(result.trace_to_json(), self._sibling(output, "trace.json"))

        summary = {
            "converged": result.converged,
            "iterations": result.iterations,
            "stop_reason": result.stop_reason,
            "rows_before": len(dataset),
            "rows_after": len(result.balanced),
            "class_counts": result.balanced.class_counts(),
            "final": result.final_diagnostics.to_dict(config.diagnostics),
        }
        logger.info("Balanced classes: %s", self.formatter.format_class_counts(summary["class_counts"]))
        print(self.formatter.format_json(summary))

        exit_code = EXIT_OK if result.converged else EXIT_NOT_CONVERGED
        self._write_manifest(
            args,
            self._sibling(output, "manifest.json"),
            seed=seed,
            derived=derive_seeds(seed, ["balance"]),
            config={"balance": config.model_dump()},
            inputs={"dataset": args.input},
            outputs={"dataset": str(output), "trace": str(trace_path)},
            exit_code=exit_code,
        )
        return exit_code

    def _cmd_train(self, args: argparse.Namespace) -> int:
        """Train one layout on a seeded split and evaluate it on the held-out part."""
        seed = self._seed(args)
        config = self._train_config(args, seed)
        dataset = load_csv(args.input)
        spec = make_layout(args.layout, input_dim=dataset.n_features, hidden_width=args.hidden_width)

        parts = split(dataset, args.ratio, derive_seed(seed, "split"), stratify=args.stratify)
        standardizer = fit_standardizer(parts.train)
        model = train(spec, apply_standardizer(standardizer, parts.train), parts.train.levels, config)
        model = model.with_standardizer(standardizer)

        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        outputs = {
            "model": str(save_model(model, out / "model.json")),
            "training_log": str(write_training_log(model.training_log, out / "training_log.csv")),
        }

        if len(parts.test):
            report = MetricsCalculator.evaluate(predict(model, parts.test.features), parts.test.levels).to_dict()
            logger.info("Held-out evaluation:\n%s", self.formatter.format_report(report))
        else:
            report = None
            logger.warning("No held-out rows; report.json holds null")
        outputs["report"] = str(self._write_json(report, out / "report.json"))
        print(self.formatter.format_json(report))

        self._write_manifest(
            args,
            out / "manifest.json",
            seed=seed,
            derived=derive_seeds(seed, ["split", "init", "shuffle"]),
            config={
                "layout": spec.name,
                "network": spec.to_dict(),
                "train": config.model_dump(),
                "ratio": args.ratio,
                "stratify": args.stratify,
            },
            inputs={"dataset": args.input},
            outputs=outputs,
            exit_code=EXIT_OK,
        )
        return EXIT_OK

    def _cmd_evaluate(self, args: argparse.Namespace) -> int:
        """Print the evaluation report of a saved model on a CSV."""
        model = load_model(args.model)
        dataset = load_csv(args.input)
        if dataset.n_features != model.spec.input_dim:
            raise DimensionMismatch(
                f"Model expects {model.spec.input_dim} features, {args.input} has {dataset.n_features}"
            )
        report = MetricsCalculator.evaluate(predict(model, dataset.features), dataset.levels).to_dict()
        logger.info("Evaluation:\n%s", self.formatter.format_report(report))
        print(self.formatter.format_json(report))

        outputs = {}
        if args.output:
            outputs["report"] = str(self._write_json(report, args.output))
        manifest_path = (
            self._sibling(Path(args.output), "manifest.json")
            if args.output
            else self._sibling(Path(args.input), "evaluate.manifest.json")
        )
        self._write_manifest(
            args,
            manifest_path,
            seed=self._seed(args),
            config={"model_seed": model.seed, "layout": model.spec.name},
            inputs={"model": args.model, "dataset": args.input},
            outputs=outputs,
            exit_code=EXIT_OK,
        )
        return EXIT_OK

    def _cmd_ablate(self, args: argparse.Namespace) -> int:
        """Run all variants of one ablation and write the comparison tables."""
        seed = self._seed(args)
        train_config = self._train_config(args, seed)
        balance_config = self._balance_config(args, seed)
        dataset = load_csv(args.input)

        engine = AblationEngine(
            args.ablation,
            train_config=train_config,
            balance_config=balance_config,
            hidden_width=args.hidden_width,
            ratio=args.ratio,
            split_seed=derive_seed(seed, "split"),
            stratify=args.stratify,
        )
        result = engine.run(dataset, progress_callback=self._log_progress)
        outputs = AblationEngine.save_results(result, args.output)
        print(result.table.text, end="")
        print(self.formatter.format_timing(result.timing()), end="")

        self._write_manifest(
            args,
            Path(args.output) / "manifest.json",
            seed=seed,
            derived=derive_seeds(seed),
            config={
                "ablation": args.ablation,
                "variants": list(engine.variants),
                "hidden_width": args.hidden_width,
                "ratio": args.ratio,
                "stratify": args.stratify,
                "train": train_config.model_dump(),
                "balance": balance_config.model_dump(),
                "balance_converged": result.balance.converged,
                "balance_iterations": result.balance.iterations,
                "balance_stop_reason": result.balance.stop_reason,
            },
            inputs={"dataset": args.input},
            outputs=outputs,
            exit_code=EXIT_OK,
        )
        return EXIT_OK

    # -- helpers ---------------------------------------------------------

    @staticmethod
    def _seed(args: argparse.Namespace) -> int:
        seed = DEFAULT_SEED if args.seed is None else args.seed
        if seed < 0:
            raise UsageError(f"--seed must be nonnegative, got {seed}")
        return seed

    @staticmethod
    def _balance_config(args: argparse.Namespace, seed: int) -> BalanceConfig:
        return BalanceConfig(
            diagnostics=DiagnosticsConfig(sigma_ref=args.sigma_ref, epsilon=args.epsilon),
            step_fraction=args.step_fraction,
            max_iterations=args.max_iterations,
            floor=args.floor,
            max_growth=args.max_growth,
            seed=derive_seed(seed, "balance"),
        )

    @staticmethod
    def _train_config(args: argparse.Namespace, seed: int) -> TrainConfig:
        if not 0.0 < args.ratio < 1.0:
            raise UsageError(f"--ratio must be in (0, 1), got {args.ratio}")
        if args.hidden_width < 1:
            raise UsageError(f"--hidden-width must be positive, got {args.hidden_width}")
        return TrainConfig(
            batch_size=args.batch_size, epochs=args.epochs, lr=args.lr, patience=args.patience or None, seed=seed
        )

    @staticmethod
    def _log_progress(index: int, total: int, name: str) -> None:
        logger.info("[%d/%d] training %s", index + 1, total, name)

    @staticmethod
    def _sibling(path: Path, suffix: str) -> Path:
        """``data.csv`` + ``manifest.json`` -> ``data.manifest.json``."""
        return path.with_name(f"{path.stem}.{suffix}")

    def _write_json(self, payload: Any, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.formatter.format_json(payload) + "\n", encoding="utf-8")
        return path

    def _write_manifest(
        self,
        args: argparse.Namespace,
        path: Path,
        seed: int,
        config: dict[str, Any],
        inputs: dict[str, str],
        outputs: dict[str, str],
        exit_code: int,
        derived: dict[str, int] | None = None,
    ) -> Path:
        """Echo the fully resolved invocation next to its artifacts."""
        flags = {key: value for key, value in vars(args).items() if key != "command"}
        flags["seed"] = seed
        manifest = RunManifest(
            command=args.command,
            version=VERSION,
            seed=seed,
            seed_scheme=SEED_SCHEME,
            derived_seeds=derived or {},
            config={"flags": flags, **config},
            inputs=inputs,
            outputs=outputs,
            exit_code=exit_code,
            created_at=datetime.now().isoformat(),
        )
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(manifest.model_dump(), f, indent=2)
        logger.info("Manifest written to %s", path)
        return path


def main(argv: list[str] | None = None) -> int:
    """Run the CLI with ``sys.argv`` and return its exit code."""
    return CLIInterface().run(sys.argv[1:] if argv is None else argv)
