"""
Logging setup shared by every package in the portfolio constructor.
All handlers write to standard error so report output stays clean.
"""
import os
import logging

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_LEVEL_ENV = "PORTFOLIO_LOG_LEVEL"

_configured = False


def configure_logging(level: str = None) -> None:
    """Configure the root logger once, honoring PORTFOLIO_LOG_LEVEL."""
    global _configured
    if _configured and level is None:
        return

    level_name = (level or os.environ.get(LOG_LEVEL_ENV, "INFO")).upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=LOG_FORMAT
    )
    if level is not None:
        logging.getLogger().setLevel(getattr(logging, level_name, logging.INFO))
    _configured = True


def get_logger(name: str) -> logging.Logger:
    """Return a named logger with the shared format applied."""
    configure_logging()
    return logging.getLogger(name)
