"""
Logging configuration module.

Console output goes to stderr so that JSON and CSV written to stdout by the
command-line tools stay machine readable. A dated log file is added when a
log directory is configured.
"""

import logging
import sys
from datetime import datetime

from .file_utils import ensure_directory

LOG_FORMAT = '%(asctime)s | %(levelname)-8s | %(name)s:%(lineno)d | %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
LOG_FILE_PREFIX = 'geo_sublinear'


def _attach_handlers(
    target: logging.Logger,
    log_dir: str | None,
    level: int
) -> None:
    """Attach the stderr handler and, optionally, the dated file handler."""
    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    target.addHandler(console_handler)

    if log_dir:
        log_path = ensure_directory(log_dir)

        log_filename = f"{LOG_FILE_PREFIX}_{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = logging.FileHandler(
            log_path / log_filename,
            encoding='utf-8'
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        target.addHandler(file_handler)


def setup_root_logger(
    log_dir: str | None = None,
    level: int = logging.INFO
) -> logging.Logger:
    """
    Set up and configure the root logger.

    Child loggers obtained through get_logger() propagate to the root, so
    every module writes to the same console and file handlers.

    Args:
        log_dir: Directory for log files. If None, only console output.
        level: Logging level (default: INFO).

    Returns:
        Configured root logger instance.
    """
    root_logger = logging.getLogger()

    if root_logger.handlers:
        root_logger.setLevel(level)
        return root_logger

    root_logger.setLevel(level)
    _attach_handlers(root_logger, log_dir, level)
    return root_logger


def parse_level(level_name: str) -> int:
    """
    Convert a level name such as "INFO" into its logging constant.

    Args:
        level_name: Case-insensitive level name.

    Returns:
        Numeric logging level.

    Raises:
        ValueError: If the name is not a standard level.
    """
    level = logging.getLevelName(level_name.upper())
    if not isinstance(level, int):
        raise ValueError(f"Unknown log level: {level_name}")
    return level


def get_logger(name: str) -> logging.Logger:
    """
    Get a module logger.

    Args:
        name: Logger name (typically __name__ of the calling module).

    Returns:
        Logger instance.
    """
    return logging.getLogger(name)
