"""Central error handling for command-line commands."""

import functools
import sys
import traceback
from collections.abc import Callable
from typing import ParamSpec, TypeVar

import click

from irsdetect.exceptions import (
    DesignFileError,
    IrsDetectError,
    ScenarioError,
    SolverError,
)
from irsdetect.utils.logging import get_logger

logger = get_logger("error_handler")

EXIT_UNEXPECTED = 1
EXIT_PARSE = 3
EXIT_SOLVER = 4
EXIT_RUNTIME = 5

P = ParamSpec("P")
R = TypeVar("R")


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the process exit code.

    Args:
        error: The error that occurred.

    Returns:
        Exit code for the error class.
    """
    if isinstance(error, (ScenarioError, DesignFileError)):
        return EXIT_PARSE
    if isinstance(error, SolverError):
        return EXIT_SOLVER
    if isinstance(error, IrsDetectError):
        return EXIT_RUNTIME
    return EXIT_UNEXPECTED


def describe(error: BaseException) -> str:
    """User-facing message for an error."""
    if isinstance(error, ScenarioError):
        return f"Invalid scenario: {error}"
    if isinstance(error, DesignFileError):
        return f"Invalid design file: {error}"
    if isinstance(error, SolverError):
        return f"Optimization failed: {error}"
    if isinstance(error, IrsDetectError):
        return f"Error: {error}"
    return f"An unexpected error occurred: {error}"


def handle_errors(func: Callable[P, R]) -> Callable[P, R]:
    """Turn package errors raised by a command into a message and exit code.

    Click's own usage errors pass through untouched.
    """

    @functools.wraps(func)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        try:
            return func(*args, **kwargs)
        except click.ClickException:
            raise
        except IrsDetectError as e:
            logger.debug(traceback.format_exc())
            click.echo(describe(e), err=True)
            sys.exit(exit_code_for(e))
        except Exception as e:
            # Log unexpected errors
            logger.error(f"Unexpected error in {func.__name__}: {e}", exc_info=e)
            click.echo(describe(e), err=True)
            sys.exit(EXIT_UNEXPECTED)

    return wrapper
