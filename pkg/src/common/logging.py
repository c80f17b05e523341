"""Structured logging helpers for solver runs and the command-line front-end.

Records are rendered as one JSON object per line on stderr. Values passed via
``extra`` may be numpy scalars or small arrays; they are converted to plain
JSON numbers and lists.
"""

from __future__ import annotations

import json
import logging
import sys
from datetime import datetime, timezone
from typing import Any, Dict, Optional

import numpy as np

# Attributes every LogRecord carries; anything else came in through ``extra``.
_RESERVED_RECORD_KEYS = frozenset(vars(logging.LogRecord("", 0, "", 0, "", None, None))) | {"message", "asctime"}


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, "value") and isinstance(getattr(value, "value"), (str, int, float)):
        return value.value
    return str(value)


class JsonFormatter(logging.Formatter):
    """Render log records as JSON with consistent keys."""

    def format(self, record: logging.LogRecord) -> str:
        base: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        base.update({key: value for key, value in record.__dict__.items() if key not in _RESERVED_RECORD_KEYS})
        if record.exc_info:
            base["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(base, default=_json_default, ensure_ascii=True)


def _ensure_configured(level: int = logging.INFO) -> None:
    """Configure a shared JSON logger once. Output goes to stderr; stdout carries command summaries."""
    root = logging.getLogger()
    if root.handlers:
        return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonFormatter())
    root.setLevel(level)
    root.addHandler(handler)


def configure(level: str | int) -> None:
    """Set the root level, installing the JSON handler if needed."""
    numeric = logging.getLevelName(level) if isinstance(level, str) else level
    if not isinstance(numeric, int):
        numeric = logging.INFO
    _ensure_configured(numeric)
    logging.getLogger().setLevel(numeric)


def get_logger(name: str, level: int = logging.INFO) -> logging.Logger:
    """Return a logger configured for JSON output."""
    _ensure_configured(level)
    logger = logging.getLogger(name)
    logger.propagate = True
    return logger


def log_decision(
    logger: logging.Logger,
    *,
    run_id: Optional[str],
    action: str,
    outcome: str,
    **context: Any,
) -> None:
    """Emit a structured decision log (continuation steps, bracket updates, fallbacks)."""
    logger.info(
        "decision",
        extra={"event": "decision", "run_id": run_id, "action": action, "outcome": outcome, **context},
    )


def log_event(
    logger: logging.Logger,
    message: str,
    *,
    run_id: Optional[str] = None,
    **context: Any,
) -> None:
    """Emit an info log tied to a run."""
    logger.info(message, extra={"event": message, "run_id": run_id, **context})


def log_error(
    logger: logging.Logger,
    message: str,
    *,
    run_id: Optional[str] = None,
    error: Optional[BaseException] = None,
    **context: Any,
) -> None:
    """Emit an error log with optional exception and run correlation."""
    logger.error(
        message,
        extra={"run_id": run_id, **context},
        exc_info=error if error else None,
    )
