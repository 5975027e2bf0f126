"""
Logging module.

This module sets up structured logging for the engine. Records go to stderr
so that reports written to stdout stay machine-readable. Structured
properties travel on the record as ``props`` and are rendered by both the
JSON and the text formatter.
"""
import json
import logging
import sys
from datetime import datetime, timezone
from typing import Any, Dict, Mapping, Optional

from impact.core.config import settings

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Libraries that only speak up on problems
QUIET_LOGGERS = ("opentelemetry", "asyncio")


def _props(record: logging.LogRecord) -> Mapping[str, Any]:
    return getattr(record, "props", None) or {}


class JsonFormatter(logging.Formatter):
    """
    JSON formatter for logging.

    One JSON object per record, structured properties merged at top level.
    """

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "message": record.getMessage(),
            "logger": record.name,
            "function": record.funcName,
            "line": record.lineno,
        }
        if record.exc_info and record.exc_info[0] is not None:
            entry["exception"] = {
                "type": record.exc_info[0].__name__,
                "message": str(record.exc_info[1]),
            }
        entry.update(_props(record))
        # numpy scalars and paths fall back to str
        return json.dumps(entry, default=str)


class TextFormatter(logging.Formatter):
    """Human-readable formatter appending properties as key=value pairs."""

    def __init__(self) -> None:
        super().__init__(TEXT_FORMAT)

    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        props = _props(record)
        if not props:
            return text
        return text + " | " + " ".join(f"{key}={value}" for key, value in props.items())


class StructuredLogger(logging.Logger):
    """
    Structured logger.

    Adds ``<level>_with_props`` methods that attach a dict of properties to
    the record.
    """

    def _log_with_props(
        self,
        level: int,
        msg: str,
        props: Optional[Dict[str, Any]] = None,
        *args: Any,
        **kwargs: Any,
    ) -> None:
        if not self.isEnabledFor(level):
            return
        if props:
            kwargs["extra"] = {**kwargs.get("extra", {}), "props": props}
        # Report the caller, not this helper
        kwargs.setdefault("stacklevel", 3)
        self.log(level, msg, *args, **kwargs)

    def debug_with_props(self, msg: str, props: Optional[Dict[str, Any]] = None, *args: Any, **kwargs: Any) -> None:
        """Log debug message with properties."""
        self._log_with_props(logging.DEBUG, msg, props, *args, **kwargs)

    def info_with_props(self, msg: str, props: Optional[Dict[str, Any]] = None, *args: Any, **kwargs: Any) -> None:
        """Log info message with properties."""
        self._log_with_props(logging.INFO, msg, props, *args, **kwargs)

    def warning_with_props(self, msg: str, props: Optional[Dict[str, Any]] = None, *args: Any, **kwargs: Any) -> None:
        """Log warning message with properties."""
        self._log_with_props(logging.WARNING, msg, props, *args, **kwargs)

    def error_with_props(self, msg: str, props: Optional[Dict[str, Any]] = None, *args: Any, **kwargs: Any) -> None:
        """Log error message with properties."""
        self._log_with_props(logging.ERROR, msg, props, *args, **kwargs)

    def critical_with_props(self, msg: str, props: Optional[Dict[str, Any]] = None, *args: Any, **kwargs: Any) -> None:
        """Log critical message with properties."""
        self._log_with_props(logging.CRITICAL, msg, props, *args, **kwargs)


logging.setLoggerClass(StructuredLogger)


def get_logger(name: str) -> StructuredLogger:
    """
    Get a structured logger.

    Args:
        name: Logger name, usually ``__name__``

    Returns:
        StructuredLogger: Logger instance
    """
    logger = logging.getLogger(name)
    if not isinstance(logger, StructuredLogger):
        # Created before the class was registered
        logger.__class__ = StructuredLogger
    return logger  # type: ignore[return-value]


def setup_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> None:
    """
    Install the stderr handler on the root logger.

    Args:
        level: Level name overriding settings.LOG_LEVEL
        fmt: "text" or "json", overriding settings.LOG_FORMAT
    """
    log_level = getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO)
    log_format = (fmt or settings.LOG_FORMAT).lower()

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(log_level)
    handler.setFormatter(JsonFormatter() if log_format == "json" else TextFormatter())

    root = logging.getLogger()
    root.setLevel(log_level)
    root.handlers[:] = [handler]

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)
