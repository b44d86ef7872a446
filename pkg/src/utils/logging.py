"""
Logging setup for the ARW lab.

Uses Loguru for structured, colorized logging with file rotation.
"""

import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

from loguru import logger


# Track if logging has been configured
_logging_configured = False

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
    "<level>{level:<8}</level> | "
    "<cyan>{extra[component]}</cyan> | "
    "<level>{message}</level>"
)

FILE_FORMAT = (
    "{time:YYYY-MM-DD HH:mm:ss} | "
    "{level:<8} | "
    "{extra[component]} | "
    "{name}:{function}:{line} | "
    "{message}"
)

logger.configure(extra={"component": "lab"})


def setup_logging(
    log_dir: Path,
    level: str = "INFO",
    log_format: Optional[str] = None,
    console: bool = True,
    file: bool = True,
) -> Optional[Path]:
    """
    Configure logging for a lab run.

    Args:
        log_dir: Directory to store log files.
        level: Logging level (DEBUG, INFO, WARNING, ERROR).
        log_format: Custom console format string.
        console: Whether to log to stderr.
        file: Whether to log to a rotating file.

    Returns:
        Path to the log file created, or None when file logging is off.
    """
    global _logging_configured

    logger.remove()

    if console:
        logger.add(
            sys.stderr,
            format=log_format or CONSOLE_FORMAT,
            level=level,
            colorize=True,
        )

    log_file = None
    if file:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
        log_file = log_dir / f"arwlab_{timestamp}.log"
        logger.add(
            log_file,
            format=FILE_FORMAT,
            level=level,
            rotation="10 MB",
            retention="30 days",
            compression="gz",
        )

    _logging_configured = True
    if log_file is not None:
        logger.info(f"Logging initialized. Log file: {log_file}")
    return log_file


def is_configured() -> bool:
    return _logging_configured


def get_logger(name: str = "lab"):
    """
    Get a logger bound to a component name.

    Args:
        name: Component name (typically the module or class).
    """
    return logger.bind(component=name)
