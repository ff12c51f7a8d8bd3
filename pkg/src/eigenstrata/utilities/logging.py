import logging
from functools import lru_cache
from typing import Optional

import eigenstrata

PACKAGE_LOGGER = "eigenstrata"


@lru_cache()
def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    The package logger, or one of its children.

    Modules pass `__name__`, which already starts with "eigenstrata." and is
    used as is. Any other name is nested under the package logger, so
    `get_logger("specfn")` and `get_logger("eigenstrata.specfn")` are the
    same logger.

    Example:
        ```python
        logger = get_logger(__name__)
        logger.debug("Painleve solve finished in %d steps", 812)
        ```
    """
    if not name or name == PACKAGE_LOGGER:
        return logging.getLogger(PACKAGE_LOGGER)
    if name.startswith(PACKAGE_LOGGER + "."):
        return logging.getLogger(name)
    return logging.getLogger(PACKAGE_LOGGER).getChild(name)


def setup_logging(level: Optional[str] = None) -> None:
    """Set the package log level, defaulting to `settings.log_level`."""
    get_logger().setLevel(level or eigenstrata.settings.log_level)
