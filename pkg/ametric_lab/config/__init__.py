"""
Experiment configuration
Loading and validation of JSON experiment files
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

from ..exceptions import ConfigError, Result
from .experiment_config import (
    ExperimentConfig,
    MapConfig,
    OutputConfig,
    PerturbationConfig,
    RunConfig,
    ScheduleConfig,
    SpaceConfig,
    StructureConfig,
)

logger = logging.getLogger(__name__)


def _read_json(path: Path) -> Result[Dict[str, Any]]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Cannot read config {path}: {e}")
        return Result.from_exception(e)
    if not isinstance(data, dict):
        error = ConfigError("<root>", f"expected an object, got {type(data).__name__}")
        logger.error(f"Invalid config {path}: {error.message}")
        return Result.from_exception(error)
    return Result.ok(data)


def _parse(path: Path, data: Dict[str, Any]) -> Result[ExperimentConfig]:
    try:
        config = ExperimentConfig.from_dict(data)
    except ConfigError as e:
        logger.error(f"Invalid config {path}: {e.message}")
        return Result.from_exception(e)
    except (TypeError, ValueError) as e:
        logger.error(f"Invalid value in config {path}: {e}")
        return Result.from_exception(ConfigError("<value>", str(e)))
    logger.debug(f"Loaded config {path}: mode={config.run.mode}, seed={config.run.seed}")
    return Result.ok(config)


def load_config(path: Union[str, Path]) -> Result[ExperimentConfig]:
    """
    Read and validate an experiment file

    Returns:
        Result holding the ExperimentConfig, or a failure whose error_code is
        the exception class name (ConfigError, FileNotFoundError, ...)
    """
    path = Path(path)
    return _read_json(path).map(lambda data: _parse(path, data))


__all__ = [
    "ExperimentConfig",
    "MapConfig",
    "OutputConfig",
    "PerturbationConfig",
    "RunConfig",
    "ScheduleConfig",
    "SpaceConfig",
    "StructureConfig",
    "load_config",
]
