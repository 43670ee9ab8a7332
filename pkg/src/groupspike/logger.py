"""Logging configuration for groupspike.

Console records go through a RichHandler on the shared stderr console so
they interleave cleanly with progress bars. The optional file handler
always records DEBUG, including per-round MC-EM values and the worker
thread of each replication.
"""

import logging
from pathlib import Path
from typing import Optional

from rich.logging import RichHandler

from .utils import console, get_home_config_dir

LOGGER_NAME = "groupspike"
FILE_FORMAT = (
    "%(asctime)s - %(name)s - %(levelname)s - [%(threadName)s] "
    "%(funcName)s:%(lineno)d - %(message)s"
)
PLAIN_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _console_handler(level: int, enable_rich: bool) -> logging.Handler:
    handler: logging.Handler
    if enable_rich:
        handler = RichHandler(
            console=console,
            show_time=True,
            show_path=False,
            rich_tracebacks=True,
            tracebacks_show_locals=False,
        )
    else:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(PLAIN_FORMAT))
    handler.setLevel(level)
    return handler


def _file_handler(log_file: Path) -> logging.Handler:
    log_file.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(log_file, encoding="utf-8")
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(FILE_FORMAT))
    return handler


def setup_logger(
    name: str = LOGGER_NAME,
    level: str = "INFO",
    log_file: Optional[Path] = None,
    enable_rich: bool = True,
) -> logging.Logger:
    """
    Set up the package logger with a console handler and optional file handler.

    If the log file cannot be opened, the logger stays console-only and a
    warning is emitted instead of failing the command.

    Args:
        name: Logger name
        level: Console level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional path to a log file, recorded at DEBUG
        enable_rich: Use Rich handler for console output

    Returns:
        Configured logger instance
    """
    numeric_level = getattr(logging, level.upper())
    logger = logging.getLogger(name)
    # File handler records DEBUG regardless of the console level.
    logger.setLevel(logging.DEBUG if log_file else numeric_level)
    logger.handlers.clear()
    logger.addHandler(_console_handler(numeric_level, enable_rich))

    if log_file:
        try:
            logger.addHandler(_file_handler(log_file))
        except OSError as e:
            logger.warning(f"Logging to file disabled: {e}")

    return logger


def get_default_log_file() -> Path:
    """Default log file under ``~/.groupspike/logs``."""
    return get_home_config_dir() / "logs" / "groupspike.log"


# Default logger instance
logger = setup_logger()
