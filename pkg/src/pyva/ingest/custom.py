"""
Conversion of arbitrary categorical tables into the canonical format.
"""

from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple

import pandas as pd

from ..core.exceptions import ConfigurationError, FormatError
from ..model.types import SymptomMatrix, SymptomValue
from .who import decode_tokens, log_tallies


@dataclass(frozen=True)
class LabelMap:
    """Which cell values mean Yes, No and Missing."""

    yes: FrozenSet[str]
    no: FrozenSet[str]
    missing: FrozenSet[str]

    def __post_init__(self):
        for name in ("yes", "no", "missing"):
            labels = frozenset(str(v) for v in getattr(self, name))
            if not labels:
                raise ConfigurationError(f"The {name} label set must not be empty")
            object.__setattr__(self, name, labels)
        overlap = (self.yes & self.no) | (self.yes & self.missing) | (self.no & self.missing)
        if overlap:
            raise ConfigurationError(
                f"Labels used for more than one state: {', '.join(sorted(overlap))}"
            )

    @classmethod
    def of(cls, yes, no, missing):
        as_set = lambda v: frozenset([v] if isinstance(v, str) else v)  # noqa: E731
        return cls(as_set(yes), as_set(no), as_set(missing))

    def mapping(self):
        mapping = {label: SymptomValue.YES for label in self.yes}
        mapping.update({label: SymptomValue.NO for label in self.no})
        mapping.update({label: SymptomValue.MISSING for label in self.missing})
        return mapping


def convert_custom(
    table: pd.DataFrame,
    labels: LabelMap,
    cause_column: Optional[str] = "Cause",
    lenient: bool = False,
) -> Tuple[SymptomMatrix, Optional[pd.Series]]:
    """
    Convert a table with an ID column first, an optional cause column and
    categorical symptom columns.

    In strict mode (the default) a value outside all three label sets raises
    :class:`~pyva.core.exceptions.TokenError` listing the offending values;
    with ``lenient=True`` such cells become Missing and are counted in a
    warning.

    Examples
    --------
    >>> table = pd.DataFrame({"ID": ["d1", "d2"], "Cause": ["A", "B"],
    ...                       "S1": ["Yes", "Yes"], "S2": ["No", "Don't know"],
    ...                       "S3": ["Don't know", "No"]})
    >>> data, causes = convert_custom(table, LabelMap.of("Yes", "No", ["Don't know"]))
    >>> data.to_frame().values.tolist()
    [['d1', 'Y', '', '.'], ['d2', 'Y', '.', '']]
    """
    if not len(table.columns):
        raise FormatError("Table has no columns; the first column must hold record IDs")
    table = table.fillna("").astype(str)
    has_cause = cause_column is not None and cause_column in table.columns
    symptoms = [c for c in table.columns[1:] if not (has_cause and c == cause_column)]
    codes, _ = decode_tokens(
        table.loc[:, symptoms].to_numpy(dtype=object),
        labels.mapping(),
        lenient=lenient,
        label="custom data",
    )
    ids = table.iloc[:, 0].tolist()
    data = SymptomMatrix(ids, symptoms, codes.reshape(len(ids), len(symptoms)))
    log_tallies("custom data", data)
    causes = None
    if has_cause:
        causes = pd.Series(
            table[cause_column].to_numpy(), index=pd.Index(data.ids, name="ID"), name=cause_column
        )
    return data, causes
