import logging
import os
import sys

from dotenv import load_dotenv

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> int:
    """
    Route the ``oqrw`` loggers to stderr.

    The level is taken from ``level``, then from ``OQRW_LOG`` (a ``.env``
    file is honoured), and defaults to WARNING.
    """
    load_dotenv()
    name = (level or os.getenv("OQRW_LOG") or "WARNING").upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        numeric = logging.WARNING

    root = logging.getLogger("oqrw")
    root.setLevel(numeric)
    # sys.stderr may have been swapped since the last call.
    for handler in [h for h in root.handlers if getattr(h, "_oqrw", False)]:
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._oqrw = True
    root.addHandler(handler)
    return numeric
