"""
Logging configuration
"""
import logging
from pathlib import Path
from typing import Optional

from colorlog import ColoredFormatter

from config.settings import settings

CONSOLE_FORMAT = '%(log_color)s%(asctime)s | %(levelname)-8s | %(message)s'
FILE_FORMAT = '%(asctime)s | %(levelname)-8s | %(name)s | %(message)s'
LOG_COLORS = {
    'DEBUG': 'cyan',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'red,bg_white',
}

_configured = set()


def setup_logger(name: str, log_file: Optional[str] = None, level: Optional[str] = None) -> logging.Logger:
    """
    Setup logger with colored stderr output and optional file logging

    Args:
        name: Logger name
        log_file: Path to log file (defaults to settings.LOG_FILE_PATH; '' disables)
        level: Logging level name; defaults to settings.LOG_LEVEL

    Returns:
        Configured logger instance
    """
    level = getattr(logging, (level or settings.LOG_LEVEL).upper())
    log_file = settings.LOG_FILE_PATH if log_file is None else log_file

    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.propagate = False
    logger.handlers = []

    console_handler = logging.StreamHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(ColoredFormatter(CONSOLE_FORMAT, datefmt='%H:%M:%S', log_colors=LOG_COLORS))
    logger.addHandler(console_handler)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)  # everything goes to the file
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt='%Y-%m-%d %H:%M:%S'))
        logger.addHandler(file_handler)

    _configured.add(name)
    return logger


def reconfigure_all(level: Optional[str], log_file: Optional[str] = None):
    """Re-apply --log-level / --log-file to every logger made by setup_logger"""
    for name in sorted(_configured):
        setup_logger(name, log_file=log_file, level=level)
