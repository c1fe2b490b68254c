"""
========================
The pyva Standard Library
========================
The standard library holds the steps of a coding pipeline. Every step has the
signature ``step(inputs, output, options, context) -> Path``: ``inputs`` maps
names to input paths, ``output`` is the file or directory to write,
``options`` holds the step settings and ``context`` is the
:class:`~pyva.core.context.RunContext`. The command line calls the same
functions, so a pipeline stage and the matching subcommand produce the same
files.

* Fetch (PHMRC download)
* Convert (WHO 2012/2016, PHMRC, custom labels)
* Check (symptom hierarchy)
* Debias (physician codes)
* Code (InterVA, InSilicoVA, NBC, Tariff)
* Evaluate (CSMF accuracy)
* Plot (SVG charts)
"""

import pathlib

from ..core.context import RunContext
from ..core.logging import logger
from .steps import check, code, convert, debias, evaluate, fetch, plot

__all__ = [
    "STEPS",
    "check",
    "code",
    "convert",
    "debias",
    "evaluate",
    "fetch",
    "plot",
    "run_step",
]

STEPS = {
    "fetch": fetch,
    "convert": convert,
    "check": check,
    "debias": debias,
    "code": code,
    "evaluate": evaluate,
    "plot": plot,
}
"""dict : Built-in steps by the name a pipeline stage ``uses``."""


def run_step(name, inputs, output, options=None, context=None) -> pathlib.Path:
    """Run the built-in step ``name`` with defaults for the optional arguments."""
    context = context or RunContext.from_options()
    logger.debug(f"Running step {name} -> {output}")
    return STEPS[name](inputs, pathlib.Path(output), dict(options or {}), context)
