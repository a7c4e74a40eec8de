from __future__ import annotations

import json
import logging
import os
import sys
import threading
from collections.abc import Mapping, MutableMapping
from pathlib import Path
from typing import Any

import structlog
from structlog.contextvars import bind_contextvars, clear_contextvars, merge_contextvars

LOG_LEVEL_ENV = "OBFLOW_LOG_LEVEL"
LOG_FILE_ENV = "OBFLOW_LOG_FILE"
DEFAULT_LEVEL = "WARNING"
TRACE = 5

_file_lock = threading.RLock()
_CONFIGURED = False


def _level_from_env() -> int:
    """Get log level from OBFLOW_LOG_LEVEL (TRACE|DEBUG|INFO|WARNING|ERROR)."""
    raw = os.getenv(LOG_LEVEL_ENV, DEFAULT_LEVEL).upper()
    if raw == "TRACE":
        return TRACE
    level = logging.getLevelName(raw)
    return level if isinstance(level, int) else logging.WARNING


def _copy_event_to_message(
    logger: Any, method_name: str, event_dict: MutableMapping[str, Any]
) -> Mapping[str, Any]:
    if "event" in event_dict and "message" not in event_dict:
        event_dict["message"] = event_dict["event"]
    return event_dict


def _drop_none_values(
    logger: Any, method_name: str, event_dict: MutableMapping[str, Any]
) -> Mapping[str, Any]:
    return {k: v for k, v in event_dict.items() if v is not None}


def _file_sink_processor(
    logger: Any, method_name: str, event_dict: MutableMapping[str, Any]
) -> MutableMapping[str, Any]:
    """Append each record as a JSON line to OBFLOW_LOG_FILE when it is set."""
    target = os.getenv(LOG_FILE_ENV)
    if not target:
        return event_dict
    line = json.dumps(event_dict, ensure_ascii=False, default=str)
    try:
        path = Path(target)
        path.parent.mkdir(parents=True, exist_ok=True)
        with _file_lock, path.open("a", encoding="utf-8") as f:
            f.write(line + "\n")
    except OSError:
        # Logging must never break a computation
        pass
    return event_dict


class _StderrLoggerFactory:
    """Print loggers bound to the current ``sys.stderr`` (stdout carries data)."""

    def __call__(self, *args: Any) -> structlog.PrintLogger:
        return structlog.PrintLogger(file=sys.stderr)


def setup_logging(*, force: bool = False) -> None:
    """
    Configure structured JSON logging once per process.

    Includes:
    - Log level from OBFLOW_LOG_LEVEL (default WARNING)
    - ISO 8601 timestamp (key: "timestamp") and calling module
    - Run context (command, model, run_id) via contextvars
    - Optional duplication of each record into OBFLOW_LOG_FILE
    - JSON lines on standard error

    Args:
        force: Reconfigure even if logging was already set up (re-reads the environment).
    """
    global _CONFIGURED
    if _CONFIGURED and not force:
        return

    level = _level_from_env()
    structlog.configure(
        processors=[
            merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso", key="timestamp"),
            structlog.processors.CallsiteParameterAdder(
                [structlog.processors.CallsiteParameter.MODULE]
            ),
            _copy_event_to_message,
            _drop_none_values,
            _file_sink_processor,
            structlog.processors.JSONRenderer(),
        ],
        logger_factory=_StderrLoggerFactory(),
        wrapper_class=structlog.make_filtering_bound_logger(level),
        cache_logger_on_first_use=False,
    )
    logging.getLogger().setLevel(level)
    _CONFIGURED = True


def bind_context(
    *, command: str | None = None, model: str | None = None, run_id: str | None = None
) -> None:
    """Bind run context so every record of the current run carries it."""
    context = {"command": command, "model": model, "run_id": run_id}
    bind_contextvars(**{k: v for k, v in context.items() if v is not None})


def get_logger(name: str | None = None) -> Any:
    """Get a structlog logger, configuring logging on first use."""
    if not _CONFIGURED:
        setup_logging()
    return structlog.get_logger(name or __name__)


__all__ = [
    "setup_logging",
    "bind_context",
    "get_logger",
    "clear_contextvars",
]
