"""Logging setup for the ebus3d logger tree."""

import logging
from pathlib import Path
from typing import Iterable, Optional, Tuple, Union

LOGGER_NAME = "ebus3d"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: Union[int, str] = logging.INFO, log_file: Optional[Path] = None) -> logging.Logger:
    """Install a stderr handler and an optional file handler on the package logger.

    Calling it again replaces previously installed handlers.
    """
    logger = logging.getLogger(LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)
    stream = logging.StreamHandler()
    stream.setFormatter(formatter)
    logger.addHandler(stream)

    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, mode="w", encoding="utf-8")
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.setLevel(level)
    logger.propagate = False
    return logger


def echo_config(logger: logging.Logger, title: str, items: Iterable[Tuple[str, object]]) -> None:
    """Log the effective configuration, one ``key = value`` line per field."""
    logger.info("effective %s configuration:", title)
    for key, value in sorted(items):
        logger.info("  %s = %s", key, value)
