"""
Logging setup shared by every module.

All modules call ``setup_logger(__name__)`` and get a loguru logger bound to
their module name. The sink is configured once per process.
"""
import os
import sys

from loguru import logger as _logger

_LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{extra[module]}</cyan> - <level>{message}</level>"
)

_configured = False


def configure_logging(level: str = None) -> None:
    """
    (Re)configure the stderr sink.

    Args:
        level: Log level name. Defaults to the SSC_LOG_LEVEL environment
               variable, then INFO.
    """
    global _configured
    level = (level or os.environ.get("SSC_LOG_LEVEL") or "INFO").upper()
    _logger.remove()
    _logger.add(sys.stderr, level=level, format=_LOG_FORMAT, colorize=False)
    _configured = True


def setup_logger(name: str):
    """
    Get a logger bound to the given module name.

    Args:
        name: Module name, usually ``__name__``.

    Returns:
        A loguru logger with ``module`` bound in its extra fields.
    """
    if not _configured:
        configure_logging()
    return _logger.bind(module=name)
