"""
Logging facilities

Module-level helpers so callers never have to fetch a logger themselves:

    from hdct.utils import logger
    logger.log_info("simulate: starting")

Everything goes to the stdlib logger named "hdct", which writes to stderr.
Standard output stays reserved for command reports.

"""

import logging
import sys
import traceback

_LOGGER_NAME = "hdct"
_log = logging.getLogger(_LOGGER_NAME)


def setup(level=None, stream=None):
    """
    Attach a stderr handler to the hdct logger (once) and set its level.

    Args:
        level (str or int, optional): Log level; defaults to settings.LOG_LEVEL.
        stream (file, optional): Where to write; defaults to sys.stderr.

    """
    from hdct.conf import settings

    level = level or settings.LOG_LEVEL
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING
    if not _log.handlers:
        handler = logging.StreamHandler(stream or sys.stderr)
        handler.setFormatter(
            logging.Formatter("%(asctime)s [%(levelname)s] %(message)s")
        )
        _log.addHandler(handler)
        _log.propagate = False
    _log.setLevel(level)
    return _log


def log_info(msg, *args):
    _log.info(msg, *args)


def log_warn(msg, *args):
    _log.warning(msg, *args)


def log_err(msg, *args):
    _log.error(msg, *args)


def log_dep(msg, *args):
    _log.warning("[DEP] " + msg, *args)


def log_trace(msg=None):
    """
    Log the exception currently being handled, with its traceback.

    Args:
        msg (str, optional): Extra context prepended to the trace.

    """
    tb = traceback.format_exc()
    if msg:
        tb = f"{msg}\n{tb}"
    _log.error(tb.rstrip())
