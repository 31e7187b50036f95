"""Logging setup shared by the command-line tool and the services."""

import logging
import sys
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from irsdetect.config import Settings

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
NAMESPACE = "irsdetect"

# cvxpy reports every canonicalization step at INFO
QUIET_LOGGERS = ("cvxpy",)


def setup_logging(settings: "Settings") -> logging.Logger:
    """Route all log records to stderr and return the package logger.

    Command results are written to stdout, so logs never mix with them.

    Args:
        settings: Runtime settings; ``debug`` selects the DEBUG level.
    """
    level = logging.DEBUG if settings.debug else logging.INFO
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.INFO if settings.debug else logging.WARNING)

    logger = logging.getLogger(NAMESPACE)
    logger.setLevel(level)
    return logger


def get_logger(name: str) -> logging.Logger:
    """Logger for one component, e.g. ``get_logger("designs")`` -> ``irsdetect.designs``."""
    return logging.getLogger(f"{NAMESPACE}.{name}")
