"""Parsers turning survey exports into canonical symptom matrices."""

from .custom import LabelMap, convert_custom
from .phmrc import PhmrcCutoffTable, PhmrcSymptomTable, convert_phmrc, fetch_phmrc
from .who import parse_who2012, parse_who2016

__all__ = [
    "LabelMap",
    "PhmrcCutoffTable",
    "PhmrcSymptomTable",
    "convert_custom",
    "convert_phmrc",
    "fetch_phmrc",
    "parse_who2012",
    "parse_who2016",
]
