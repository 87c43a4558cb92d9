"""
Logging for the toolkit. Reports go to stdout; log records go to stderr and,
on request, to a rotating file. Level, format, path and rotation all default
to config.output.
"""

import logging
import logging.handlers
from pathlib import Path
from typing import List, Optional

from .config import config

# handlers installed by setup_logging, so reset_logging removes only ours
_installed: List[logging.Handler] = []


def _level(name: Optional[str]) -> int:
    name = (name or config.output.LOG_LEVEL).upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ValueError(f"unknown log level {name!r}")
    return level


def _console_handler(formatter: logging.Formatter) -> logging.Handler:
    handler = logging.StreamHandler()
    handler.setFormatter(formatter)
    return handler


def _file_handler(path: Path, formatter: logging.Formatter) -> logging.Handler:
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.handlers.RotatingFileHandler(
        path,
        maxBytes=config.output.LOG_MAX_BYTES,
        backupCount=config.output.LOG_BACKUPS,
    )
    handler.setFormatter(formatter)
    return handler


def reset_logging() -> None:
    """Detach and close the handlers a previous setup_logging call installed"""
    root = logging.getLogger()
    while _installed:
        handler = _installed.pop()
        root.removeHandler(handler)
        handler.close()


def setup_logging(
    level: Optional[str] = None,
    log_file: Optional[str] = None,
    console: bool = True,
    file_logging: bool = False
) -> List[logging.Handler]:
    """
    Configure the root logger.

    Args:
        level: DEBUG, INFO, WARNING or ERROR (default config.output.LOG_LEVEL)
        log_file: rotating log file path (default config.output.LOG_FILE)
        console: log to stderr
        file_logging: also log to the rotating file

    Returns:
        The handlers that were installed.
    """
    reset_logging()
    numeric_level = _level(level)
    formatter = logging.Formatter(config.output.LOG_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')

    if console:
        _installed.append(_console_handler(formatter))
    if file_logging:
        _installed.append(_file_handler(Path(log_file or config.output.LOG_FILE), formatter))

    root = logging.getLogger()
    root.setLevel(numeric_level)
    for handler in _installed:
        handler.setLevel(numeric_level)
        root.addHandler(handler)

    # scipy's optimizers are chatty at DEBUG
    logging.getLogger('scipy').setLevel(max(numeric_level, logging.WARNING))

    logging.getLogger(__name__).debug(
        f"Logging configured: level {logging.getLevelName(numeric_level)}, "
        f"{len(_installed)} handler(s)"
    )
    return list(_installed)
