"""
Console and report logging for pyva.

Everything goes to the console through ``rich``. Messages logged inside a
function decorated with :func:`add_to_report_log` (data checks, conversions,
the physician EM, pipeline stages) are also written to the report log, tagged
with the name of that function.
"""

import pathlib
import warnings
from functools import wraps

from loguru import logger
from rich.logging import RichHandler

REPORT_LOG = "pyva_report.log"
REPORT_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} {level: <7} [{extra[operation]}] {message}"

_report_handlers = {}


def showwarning(message, category, filename, lineno, file=None, line=None):
    logger.opt(depth=2).warning(f"{category.__name__}: {message}")


def report_filter(record):
    return record["extra"].get("add_to_report", False)


def add_to_report_log(func):
    """Also write what ``func`` logs to the report log, tagged with its name."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        with logger.contextualize(add_to_report=True, operation=func.__name__):
            return func(*args, **kwargs)

    return wrapper


def add_report_logger(path=REPORT_LOG) -> int:
    """Attach the report log at ``path``; attaching the same file twice is a no-op."""
    key = str(pathlib.Path(path).resolve())
    if key not in _report_handlers:
        _report_handlers[key] = logger.add(path, format=REPORT_FORMAT, filter=report_filter)
    return _report_handlers[key]


def remove_report_loggers():
    while _report_handlers:
        logger.remove(_report_handlers.popitem()[1])


warnings.showwarning = showwarning
logger.remove()
logger.configure(extra={"operation": "-"})
rich_handler_id = logger.add(RichHandler(show_path=False, markup=False), format="{message}", level="INFO")
