"""
Provides validation of pipeline configuration files by checking against a schema.
"""

import importlib
import pathlib

from cerberus import Validator


class DirectoryAwareValidator(Validator):
    """
    A Validator that can check if a field is a directory.
    """

    def _validate_is_directory(self, is_directory, field, value):
        """
        Checks if a string can be a pathlib.Path object.

        The rule's arguments are validated against this schema:
        {'type': 'boolean'}
        """
        if is_directory:
            try:
                pathlib.Path(value).expanduser()
            except TypeError as e:
                self._error(field, f"{e.args[0]}. Must be a string")


class PipelineValidator(DirectoryAwareValidator):
    """
    Validator for pipeline configuration.

    See Also
    --------
    * https://docs.python-cerberus.org/customize.html#class-based-custom-validators
    """

    def _validate_is_step(self, is_step, field, value):
        """Test if a string names a built-in step or a Python qualname.

        The rule's arguments are validated against this schema:
        {'type': 'boolean'}
        """
        if not is_step:
            return
        if not isinstance(value, str):
            self._error(field, "Must be a string")
            return
        from ..std_lib import STEPS

        if value in STEPS:
            return
        parts = value.split(".")
        module_name, attr_name = ".".join(parts[:-1]), parts[-1]
        if not module_name:
            self._error(
                field,
                f"Unknown step {value!r}, choose from {', '.join(sorted(STEPS))} "
                "or give a Python qualname",
            )
            return
        try:
            module = importlib.import_module(module_name)
            if not hasattr(module, attr_name):
                self._error(field, "Must be a valid Python qualname")
        except (ImportError, ModuleNotFoundError):
            self._error(field, "Must be a valid Python qualname")


_INPUT_SCHEMA = {
    "type": ["string", "list"],
    "schema": {"type": "string"},
}

PIPELINE_SCHEMA = {
    "general": {
        "type": "dict",
        "required": False,
        "schema": {
            "name": {"type": "string"},
            "seed": {"type": "integer"},
            "threads": {"type": "integer", "min": 1},
            "workdir": {"type": "string", "is_directory": True},
            "manifest_dir": {"type": "string", "is_directory": True},
        },
    },
    "stages": {
        "type": "list",
        "required": True,
        "nullable": True,
        "schema": {
            "type": "dict",
            "schema": {
                "name": {
                    "type": "string",
                    "required": True,
                    "regex": r"[A-Za-z0-9_.-]+",
                },
                "uses": {"type": "string", "required": True, "is_step": True},
                "inputs": {
                    "type": "dict",
                    "keysrules": {"type": "string"},
                    "valuesrules": _INPUT_SCHEMA,
                },
                "output": {"type": "string", "required": True},
                "options": {"type": "dict", "allow_unknown": True},
            },
        },
    },
}
"""dict : Schema for validating pipeline configuration."""

PIPELINE_VALIDATOR = PipelineValidator(PIPELINE_SCHEMA)
"""Validator : Validator for pipeline configuration."""
