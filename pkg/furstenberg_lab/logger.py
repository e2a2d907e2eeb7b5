"""
Structured logging for Furstenberg Lab.

Console records go to the error stream; standard output carries artifacts
only. Structured fields travel as ``extra={"extra": {...}}`` and become
top-level keys of JSON log lines.
"""

import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

LOGGER_NAME = "furstenberg_lab"
CONSOLE_FORMAT = "%(asctime)s %(levelname)-8s %(name)s: %(message)s"
FILE_FORMAT = "%(asctime)s %(levelname)-8s %(name)s %(funcName)s:%(lineno)d %(message)s"
DATE_FORMAT = "%H:%M:%S"


class JSONFormatter(logging.Formatter):
    """One JSON object per record, keys sorted."""

    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "where": f"{record.module}.{record.funcName}:{record.lineno}",
        }
        fields = getattr(record, "extra", None)
        if isinstance(fields, dict):
            payload.update(fields)
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str, sort_keys=True)


class ColoredFormatter(logging.Formatter):
    """Level names in ANSI colors."""

    LEVEL_COLORS = {
        logging.DEBUG: "\033[2m",
        logging.INFO: "\033[36m",
        logging.WARNING: "\033[33m",
        logging.ERROR: "\033[31m",
        logging.CRITICAL: "\033[1;31m",
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        color = self.LEVEL_COLORS.get(record.levelno)
        if color is None:
            return super().format(record)
        painted = logging.makeLogRecord(record.__dict__)
        painted.levelname = f"{color}{record.levelname}{self.RESET}"
        return super().format(painted)


class LabLogger:
    """Owner of the package logger and its two optional handlers."""

    _instance: Optional["LabLogger"] = None

    def __new__(cls):
        if cls._instance is None:
            instance = super().__new__(cls)
            instance.logger = logging.getLogger(LOGGER_NAME)
            instance.logger.setLevel(logging.DEBUG)
            instance.logger.addHandler(logging.NullHandler())
            instance._handlers = {}
            cls._instance = instance
        return cls._instance

    def _install(self, slot: str, handler: logging.Handler):
        old = self._handlers.pop(slot, None)
        if old is not None:
            self.logger.removeHandler(old)
            old.close()
        self._handlers[slot] = handler
        self.logger.addHandler(handler)

    def setup_console_logging(self, level: int = logging.WARNING, use_colors: bool = True):
        """
        Send records at `level` and above to the current error stream.

        Args:
            level: Console threshold
            use_colors: Color the level names
        """
        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(level)
        formatter_cls = ColoredFormatter if use_colors else logging.Formatter
        handler.setFormatter(formatter_cls(CONSOLE_FORMAT, datefmt=DATE_FORMAT))
        self._install("console", handler)

    def setup_file_logging(self, log_file: str, level: int = logging.DEBUG, use_json: bool = False):
        """
        Append records to a file, creating its directory.

        Args:
            log_file: Path to the log file
            level: File threshold
            use_json: JSON lines instead of plain text
        """
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(log_file)
        handler.setLevel(level)
        handler.setFormatter(JSONFormatter() if use_json else logging.Formatter(FILE_FORMAT))
        self._install("file", handler)

    def get_logger(self) -> logging.Logger:
        return self.logger

    def log_construction(self, name: str, params: Dict[str, Any], summary: Dict[str, Any]):
        """Record a finished construction with its parameters and measured sizes."""
        self.logger.info(
            f"Built {name} instance: {summary}",
            extra={"extra": {"construction": name, "params": params, "summary": summary}},
        )

    def log_check(self, name: str, passed: bool, details: Optional[Dict[str, Any]] = None):
        """
        Record the outcome of an exact check.

        Passing checks log at DEBUG, failing ones at WARNING.

        Args:
            name: Check name
            passed: Outcome
            details: Measured sides of the inequality
        """
        fields = {"check": name, "passed": passed, **(details or {})}
        if passed:
            self.logger.debug(f"{name}: ok", extra={"extra": fields})
        else:
            self.logger.warning(f"{name}: FAILED {details or ''}", extra={"extra": fields})

    def log_exclusion(self, kind: str, element: Any):
        self.logger.info(
            f"Excluded {kind} multiplier {element}",
            extra={"extra": {"exclusion": kind, "element": element}},
        )


def get_logger() -> logging.Logger:
    """The package logger."""
    return LabLogger().get_logger()


def setup_logging(
    console_level: int = logging.WARNING,
    file_level: int = logging.DEBUG,
    log_file: Optional[str] = None,
    use_json: bool = False,
    use_colors: bool = True,
):
    """
    Configure console and file logging.

    Args:
        console_level: Console threshold
        file_level: File threshold
        log_file: Log file path, or None for console only
        use_json: JSON lines in the log file
        use_colors: Colored console level names
    """
    lab_logger = LabLogger()
    lab_logger.setup_console_logging(level=console_level, use_colors=use_colors)
    if log_file:
        lab_logger.setup_file_logging(log_file, level=file_level, use_json=use_json)
