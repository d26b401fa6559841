"""
ametric-lab command line

Usage:
    ametric-lab <command> --config experiment.json [--seed N] [--out PATH]
                [--format csv|jsonl] [--no-strict]

Results go to stdout as one JSON object, logs and the summary table to
stderr. Exit codes: 0 success, 1 property failure or divergence, 2 usage or
configuration error.
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

from tabulate import tabulate

from ..config import ExperimentConfig, load_config
from ..constants import OUTPUT
from ..exceptions import (
    AMetricLabError,
    ConfigError,
    DivergenceError,
    InputShapeError,
    InvalidArityError,
    InvalidModulusError,
    InvalidParameterError,
    InvalidWeightsError,
)
from ..iteration import IterationTrace
from ..stability import StabilityReport
from ..logging_config import configure_logging
from ..services import CommandOutcome, write_artifact
from .commands import COMMANDS
from .manifest import RunManifest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

USAGE_ERRORS = (
    ConfigError,
    InputShapeError,
    InvalidArityError,
    InvalidModulusError,
    InvalidParameterError,
    InvalidWeightsError,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ametric-lab", description="Convex A-metric space experiments"
    )
    parser.add_argument("command", choices=list(COMMANDS), help="Command to execute")
    parser.add_argument("--config", required=True, help="Experiment JSON file")
    parser.add_argument("--seed", type=int, help="Override run.seed")
    parser.add_argument("--out", help="Override output.path")
    parser.add_argument("--format", choices=list(OUTPUT.FORMATS), help="Override output.format")
    parser.add_argument(
        "--no-strict",
        action="store_true",
        help="'run' exits 0 when the run completes, converged or not",
    )
    parser.add_argument("--log-level", help="Log level (default AMETRIC_LAB_LOG_LEVEL or INFO)")
    return parser


def _emit(payload: Dict[str, Any]) -> None:
    print(json.dumps(payload, sort_keys=True, default=str))


def _print_summary(command: str, summary: Dict[str, Any]) -> None:
    rows = [
        (key, json.dumps(value, default=str) if isinstance(value, (dict, list)) else value)
        for key, value in summary.items()
    ]
    print(tabulate(rows, headers=[command, ""], tablefmt="simple"), file=sys.stderr)


def _fail(command: str, code: int, error: Exception) -> int:
    _emit(
        {
            "command": command,
            "exit_code": code,
            "error": str(error),
            "error_code": type(error).__name__,
        }
    )
    return code


def _finish(
    outcome: CommandOutcome,
    config: ExperimentConfig,
    config_path: str,
    started: float,
    code: int,
) -> int:
    output: Optional[Path] = None
    if config.output.path:
        output = write_artifact(outcome.artifact, config.output.path, config.output.format)
        RunManifest.create(
            command=outcome.command,
            config_path=config_path,
            seed=config.run.seed,
            output=output,
            success=outcome.success,
            wall_time_s=time.perf_counter() - started,
            verdicts=outcome.summary,
            warnings=outcome.warnings,
        ).write()
    for warning in outcome.warnings:
        logger.warning(warning)
    _print_summary(outcome.command, outcome.summary)
    _emit(
        {
            "command": outcome.command,
            "exit_code": code,
            "success": outcome.success,
            "summary": outcome.summary,
            "warnings": outcome.warnings,
            "output": str(output) if output else None,
        }
    )
    return code


def _diverged(
    command: str, error: DivergenceError, config: ExperimentConfig, config_path: str, started: float
) -> int:
    """Write the partial trace or stability report when there is one, then report exit 1"""
    partial = error.trace
    if not isinstance(partial, (IterationTrace, StabilityReport)):
        return _fail(command, EXIT_FAILURE, error)
    summary = dict(partial.summary(), diverged_at=error.step, magnitude=error.magnitude)
    outcome = CommandOutcome(command, False, partial, summary, [error.message])
    return _finish(outcome, config, config_path, started, EXIT_FAILURE)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    result = load_config(args.config)
    if result.is_failure():
        logger.error(f"Cannot use config {args.config}: {result.error}")
        _emit(
            {
                "command": args.command,
                "exit_code": EXIT_USAGE,
                "error": result.error,
                "error_code": result.error_code,
            }
        )
        return EXIT_USAGE
    config = result.unwrap()

    started = time.perf_counter()
    try:
        config.with_overrides(seed=args.seed, out=args.out, fmt=args.format)
        outcome = COMMANDS[args.command](config)
    except USAGE_ERRORS as e:
        logger.error(f"{args.command}: {e}")
        return _fail(args.command, EXIT_USAGE, e)
    except DivergenceError as e:
        return _diverged(args.command, e, config, args.config, started)
    except AMetricLabError as e:
        logger.error(f"{args.command} failed: {e}")
        return _fail(args.command, EXIT_FAILURE, e)
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return _fail(args.command, EXIT_FAILURE, e)

    completed = args.command == "run" and args.no_strict
    code = EXIT_OK if outcome.success or completed else EXIT_FAILURE
    return _finish(outcome, config, args.config, started, code)


if __name__ == "__main__":
    sys.exit(main())
