"""
Error handling utilities.

This module provides helpers that log engine errors with context and map
them to process exit codes.
"""
from functools import wraps
from typing import Any, Callable, Dict, TypeVar, cast

from impact.core.errors import EXIT_NUMERICAL, ImpactError
from impact.core.logging import get_logger
from impact.core.telemetry import error_counter

T = TypeVar("T")

logger = get_logger(__name__)


def error_context(error: Exception, **extra: Any) -> Dict[str, Any]:
    """
    Build a structured logging context for an error.

    Args:
        error: Exception that occurred
        **extra: Additional context entries

    Returns:
        Dict with error details for logging
    """
    context: Dict[str, Any] = {
        "error_type": error.__class__.__name__,
        "error_message": str(error),
        **extra,
    }
    if isinstance(error, ImpactError):
        context["error_code"] = error.code
        context["error_data"] = error.data
    return context


def handle_command_errors(func: Callable[..., int]) -> Callable[..., int]:
    """
    Decorator turning engine errors raised by a command into exit codes.

    ImpactError subclasses are logged and mapped to their exit code; anything
    else is logged with its traceback and reported as a numerical failure.

    Args:
        func: Command function returning an exit code

    Returns:
        Decorated function
    """

    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> int:
        try:
            return func(*args, **kwargs)
        except ImpactError as e:
            error_counter.add(1, {"error_code": e.code})
            logger.error_with_props(f"{e.detail}", error_context(e, command=func.__name__))
            return e.exit_code
        except Exception as e:
            error_counter.add(1, {"error_code": "unexpected"})
            logger.exception(f"Unexpected error in {func.__name__}: {e}")
            return EXIT_NUMERICAL

    return cast(Callable[..., int], wrapper)
