# utils/logger.py

import logging

from config.constants import LOG_LEVEL

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | int = LOG_LEVEL) -> None:
    root = logging.getLogger()
    if not any(getattr(h, "_flowkit", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._flowkit = True
        root.addHandler(handler)
    root.setLevel(level)
