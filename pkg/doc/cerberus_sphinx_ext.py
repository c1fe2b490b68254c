"""
Sphinx directive rendering a cerberus schema as a table::

    .. cerberus-schema:: Pipeline Schema
       :module: pyva.core.validate
       :schema: PIPELINE_SCHEMA
"""

import importlib

from docutils import nodes
from sphinx.util.docutils import SphinxDirective

COLUMNS = ("Field", "Type", "Required", "Constraints")

CUSTOM_RULES = {
    "is_step": "built-in step name or importable qualname",
    "is_directory": "existing directory",
}


def field_type(rule):
    types = rule.get("type", "dict")
    types = types if isinstance(types, list) else [types]
    if "list" in types and isinstance(rule.get("schema"), dict):
        inner = field_type(rule["schema"])
        types = [f"list of {inner}" if t == "list" else t for t in types]
    return " or ".join(types)


def constraints(rule):
    found = []
    if "min" in rule:
        found.append(f">= {rule['min']}")
    if "regex" in rule:
        found.append(f"matches {rule['regex']}")
    if "allowed" in rule:
        found.append(f"one of {', '.join(map(str, rule['allowed']))}")
    if rule.get("nullable"):
        found.append("may be empty")
    if rule.get("allow_unknown"):
        found.append("free-form keys")
    if "valuesrules" in rule:
        found.append(f"values: {field_type(rule['valuesrules'])}")
    found.extend(text for name, text in CUSTOM_RULES.items() if rule.get(name))
    return "; ".join(found)


def flatten(schema, parent=""):
    """(dotted key, rule) pairs, parents before children; list items get ``[]``."""
    for key, rule in schema.items():
        full_key = f"{parent}.{key}" if parent else key
        yield full_key, rule
        inner = rule.get("schema")
        if rule.get("type") == "list" and isinstance(inner, dict) and "schema" in inner:
            yield from flatten(inner["schema"], f"{full_key}[]")
        elif rule.get("type", "dict") == "dict" and isinstance(inner, dict):
            yield from flatten(inner, full_key)


def _row(cells):
    row = nodes.row()
    for cell in cells:
        row += nodes.entry("", nodes.paragraph(text=str(cell)))
    return row


class CerberusSchemaDirective(SphinxDirective):
    has_content = False
    required_arguments = 1
    final_argument_whitespace = True
    option_spec = {"module": str, "schema": str}

    def run(self):
        title = self.arguments[0]
        try:
            module = importlib.import_module(self.options["module"])
            schema = getattr(module, self.options["schema"])
        except (KeyError, ImportError, AttributeError) as e:
            return [
                nodes.error(None, nodes.title(text=title), nodes.paragraph(text=f"Cannot load schema: {e}"))
            ]

        table = nodes.table()
        tgroup = nodes.tgroup(cols=len(COLUMNS))
        table += tgroup
        for _ in COLUMNS:
            tgroup += nodes.colspec(colwidth=1)
        thead = nodes.thead()
        thead += _row(COLUMNS)
        tgroup += thead
        tbody = nodes.tbody()
        for key, rule in flatten(schema):
            tbody += _row(
                (key, field_type(rule), "Required" if rule.get("required") else "Optional", constraints(rule))
            )
        tgroup += tbody
        return [nodes.title(text=title), table]


def setup(app):
    app.add_directive("cerberus-schema", CerberusSchemaDirective)
    return {"version": "0.1", "parallel_read_safe": True}
