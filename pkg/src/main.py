"""
Main entry point for the grade-level prediction pipeline.

Usage:
    python src/main.py <command> [options]

Example:
    python src/main.py synth --output data/synthetic.csv --seed 42
    python src/main.py diagnose --input data/synthetic.csv
    python src/main.py balance --input data/synthetic.csv --output data/balanced.csv
    python src/main.py train --input data/synthetic.csv --output runs/sbnednn
    python src/main.py ablate --input data/synthetic.csv --output runs/bn --ablation bn-layouts
"""

import logging
import os
import sys

# Add project root to Python path to enable absolute imports
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

# Logs go to stderr; stdout carries the JSON results
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)


def main() -> int:
    """
    Run one pipeline subcommand.

    Returns:
        int: Exit code. 0 success, 1 usage or schema error, 2 degenerate data,
            3 failed normality test, 4 balancing did not converge,
            5 training diverged.
    """
    from src.interface import CLIInterface

    return CLIInterface().run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
