"""
Parsers for the WHO 2012 and WHO 2016 verbal autopsy exports.

Both exports carry the record ID in the first column followed by one column
per indicator (245 for 2012, 353 for 2016). The two instruments spell their
answers differently:

* 2012: ``Y`` is Yes, an empty cell is No, ``.`` is Missing.
* 2016: ``Y``/``y`` is Yes, ``N``/``n`` is No, ``.`` and ``-`` are Missing.

Any other token becomes Missing and is counted in a warning, unless
``lenient=False`` in which case a :class:`~pyva.core.exceptions.TokenError`
lists the offending tokens.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet

import numpy as np

from ..core.exceptions import FormatError, TokenError
from ..core.logging import add_to_report_log, logger
from ..model.io import read_table
from ..model.types import SymptomMatrix, SymptomValue


@dataclass(frozen=True)
class WhoFormat:
    name: str
    n_columns: int
    tokens: Dict[str, SymptomValue]
    known_missing: FrozenSet[str]

    @property
    def n_symptoms(self):
        return self.n_columns - 1


WHO2012 = WhoFormat(
    name="WHO 2012",
    n_columns=246,
    tokens={"Y": SymptomValue.YES, "": SymptomValue.NO, ".": SymptomValue.MISSING},
    known_missing=frozenset({"."}),
)

WHO2016 = WhoFormat(
    name="WHO 2016",
    n_columns=354,
    tokens={
        "Y": SymptomValue.YES,
        "y": SymptomValue.YES,
        "N": SymptomValue.NO,
        "n": SymptomValue.NO,
        ".": SymptomValue.MISSING,
        "-": SymptomValue.MISSING,
    },
    known_missing=frozenset({".", "-"}),
)


def decode_tokens(tokens: np.ndarray, mapping, lenient=True, label="data"):
    """
    Map string cells to symptom codes; unknown tokens become Missing.

    Returns the int8 code array and the number of coerced cells.
    """
    tokens = np.asarray(tokens, dtype=object)
    codes = np.full(tokens.shape, SymptomValue.MISSING, dtype=np.int8)
    known = np.zeros(tokens.shape, dtype=bool)
    for token, value in mapping.items():
        hit = tokens == token
        codes[hit] = value
        known |= hit
    n_coerced = int((~known).sum())
    if n_coerced:
        bad = sorted({str(t) for t in tokens[~known].ravel()})
        if not lenient:
            raise TokenError(
                f"{label}: {n_coerced} cell(s) with unexpected tokens "
                f"{', '.join(map(repr, bad[:20]))}",
                bad,
            )
        logger.warning(
            f"{label}: coerced {n_coerced} cell(s) with unexpected tokens to Missing "
            f"({', '.join(map(repr, bad[:5]))}{', ...' if len(bad) > 5 else ''})"
        )
    return codes, n_coerced


@add_to_report_log
def log_tallies(label, data: SymptomMatrix):
    tallies = data.tallies()
    logger.info(
        f"{label}: {data.n_records} records, {data.n_symptoms} symptoms; "
        f"Yes={tallies['Yes']} No={tallies['No']} Missing={tallies['Missing']}"
    )
    return tallies


def _parse_who(source, fmt: WhoFormat, lenient: bool) -> SymptomMatrix:
    frame = read_table(source)
    if len(frame.columns) != fmt.n_columns:
        raise FormatError(
            f"{fmt.name} data must have {fmt.n_columns} columns (ID plus "
            f"{fmt.n_symptoms} indicators), found {len(frame.columns)}"
        )
    codes, _ = decode_tokens(
        frame.iloc[:, 1:].to_numpy(dtype=object), fmt.tokens, lenient, fmt.name
    )
    data = SymptomMatrix(frame.iloc[:, 0].tolist(), frame.columns[1:].tolist(), codes)
    log_tallies(fmt.name, data)
    return data


def parse_who2012(source, lenient: bool = True) -> SymptomMatrix:
    """Parse a WHO 2012 (InterVA-4) export: 246 columns, ID first."""
    return _parse_who(source, WHO2012, lenient)


def parse_who2016(source, lenient: bool = True) -> SymptomMatrix:
    """Parse a WHO 2016 (InterVA-5) export: 354 columns, ID first."""
    return _parse_who(source, WHO2016, lenient)
