import logging
import sys
from typing import Optional

import structlog

from config import settings


def configure_logging(debug: Optional[bool] = None, level: Optional[str] = None) -> None:
    """
    Route structlog to stderr so stdout carries only JSON results.
    Debug mode switches to the console renderer and DEBUG level.
    """
    debug = settings.DEBUG if debug is None else debug
    level = "DEBUG" if debug else (level or settings.LOG_LEVEL)
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer() if debug else structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(getattr(logging, level.upper(), logging.WARNING)),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
