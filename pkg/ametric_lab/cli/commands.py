"""
Command handlers for the ametric-lab CLI

Each handler takes a validated config and returns a CommandOutcome; exit
codes are decided by the caller.
"""

from typing import Callable, Dict

from ..config import ExperimentConfig
from ..services import CommandOutcome, ExperimentService

CommandHandler = Callable[[ExperimentConfig], CommandOutcome]


def cmd_check_axioms(config: ExperimentConfig) -> CommandOutcome:
    return ExperimentService(config).check_axioms()


def cmd_check_convex(config: ExperimentConfig) -> CommandOutcome:
    return ExperimentService(config).check_convexity()


def cmd_classify_map(config: ExperimentConfig) -> CommandOutcome:
    return ExperimentService(config).classify_map()


def cmd_estimate_delta(config: ExperimentConfig) -> CommandOutcome:
    return ExperimentService(config).estimate_delta()


def cmd_run(config: ExperimentConfig) -> CommandOutcome:
    return ExperimentService(config).run()


def cmd_stability(config: ExperimentConfig) -> CommandOutcome:
    return ExperimentService(config).stability()


COMMANDS: Dict[str, CommandHandler] = {
    "check-axioms": cmd_check_axioms,
    "check-convex": cmd_check_convex,
    "classify-map": cmd_classify_map,
    "estimate-delta": cmd_estimate_delta,
    "run": cmd_run,
    "stability": cmd_stability,
}
