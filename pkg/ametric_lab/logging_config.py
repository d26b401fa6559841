"""
Logging setup for the command line

Library modules only create module loggers; the CLI attaches one colored
stderr handler to the package logger so stdout stays machine-readable.
"""

import logging
import sys
from typing import Optional

import colorlog

from . import settings

PACKAGE_LOGGER = "ametric_lab"

LOG_FORMAT = "%(log_color)s%(levelname)-8s%(reset)s %(asctime)s %(name)s %(message)s"

LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "bold_red",
}


def configure_logging(level: Optional[str] = None) -> logging.Logger:
    """
    Install the colored stderr handler on the package logger

    Args:
        level: Log level name; defaults to AMETRIC_LAB_LOG_LEVEL, then INFO

    Returns:
        The configured package logger
    """
    handler = colorlog.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(LOG_FORMAT, log_colors=LOG_COLORS))

    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.handlers.clear()
    logger.addHandler(handler)
    logger.setLevel((level or settings.LOG_LEVEL).upper())
    logger.propagate = False
    return logger
