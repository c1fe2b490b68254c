"""
Reading and writing the canonical symptom CSV.

The canonical file has a header row, ``ID`` as first column, and one column per
symptom with ``Y`` for Yes, an empty cell for No and ``.`` for Missing. Other
columns (cause labels, sub-population labels) may be carried along and are
returned separately.
"""

import io
import pathlib
from typing import Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from ..core.exceptions import FormatError
from ..core.logging import logger
from ..core.utils import atomic_write, require_file
from .types import SymptomMatrix

ID_COLUMN = "ID"


def read_table(source, **kwargs) -> pd.DataFrame:
    """
    Read a CSV as strings, keeping empty cells empty and duplicate headers intact.

    ``source`` may be a path, bytes or a file object.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    elif isinstance(source, (str, pathlib.Path)):
        source = require_file(source)
    try:
        raw = pd.read_csv(
            source,
            header=None,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            encoding="utf-8",
            **kwargs,
        )
    except pd.errors.EmptyDataError:
        raise FormatError("CSV file is empty") from None
    except pd.errors.ParserError as e:
        raise FormatError(f"Cannot parse CSV: {e}") from e
    if raw.empty:
        raise FormatError("CSV file has no header row")
    header = [str(h) for h in raw.iloc[0]]
    frame = raw.iloc[1:].reset_index(drop=True)
    frame.columns = header
    return frame


def read_symptom_csv(
    source, extra_columns: Iterable[str] = (), lenient: bool = False
) -> Tuple[SymptomMatrix, pd.DataFrame]:
    """
    Read a canonical symptom CSV.

    Parameters
    ----------
    source : path, bytes or file object
    extra_columns : iterable of str
        Columns that are not symptoms, e.g. a cause label column. They are
        returned in the second element, indexed like the records.
    lenient : bool
        Turn non-canonical cells into Missing (with a warning) instead of
        raising :class:`~pyva.core.exceptions.TokenError`.
    """
    frame = read_table(source)
    if not len(frame.columns) or frame.columns[0] != ID_COLUMN:
        raise FormatError(f"First column must be {ID_COLUMN!r}, found {frame.columns[:1].tolist()}")
    extra_columns = list(extra_columns)
    missing_extra = [c for c in extra_columns if c not in frame.columns]
    if missing_extra:
        raise FormatError(f"Column(s) not found: {', '.join(missing_extra)}")
    positions = [
        i for i, c in enumerate(frame.columns) if i > 0 and c not in extra_columns
    ]
    ids = frame.iloc[:, 0].tolist()
    symptoms = [frame.columns[i] for i in positions]
    tokens = frame.iloc[:, positions].to_numpy(dtype=object)
    if lenient:
        tokens = coerce_tokens(tokens)
    data = SymptomMatrix.from_tokens(ids, symptoms, tokens)
    extras = frame.loc[:, extra_columns].copy()
    extras.index = pd.Index(ids, name=ID_COLUMN)
    logger.debug(f"Read {data.n_records} records with {data.n_symptoms} symptoms")
    return data, extras


def coerce_tokens(tokens: np.ndarray) -> np.ndarray:
    """Replace anything that is not ``Y``, empty or ``.`` by ``.``, warning with a count."""
    tokens = np.asarray(tokens, dtype=object)
    canonical = np.isin(tokens, ["Y", "", "."])
    n_bad = int((~canonical).sum())
    if n_bad:
        logger.warning(f"Coerced {n_bad} non-canonical cell(s) to Missing")
        tokens = np.where(canonical, tokens, ".")
    return tokens


def symptom_frame(data: SymptomMatrix, extras: Optional[pd.DataFrame] = None) -> pd.DataFrame:
    frame = data.to_frame()
    if extras is not None and len(extras.columns):
        if len(extras) != data.n_records:
            raise FormatError(
                f"{len(extras)} rows of extra columns for {data.n_records} records"
            )
        for column in extras.columns:
            frame[column] = extras[column].to_numpy()
    return frame


def write_symptom_csv(data: SymptomMatrix, path, extras: Optional[pd.DataFrame] = None):
    """Write ``data`` (plus optional extra columns after the symptoms) atomically."""
    frame = symptom_frame(data, extras)
    with atomic_write(path, newline="") as f:
        frame.to_csv(f, index=False, lineterminator="\n")
    return pathlib.Path(path)


def read_labels(source, column: str) -> pd.Series:
    """Read one label column of a CSV with an ``ID`` column, indexed by ID."""
    frame = read_table(source)
    if column not in frame.columns:
        raise FormatError(
            f"Column {column!r} not found; available: {', '.join(frame.columns)}"
        )
    ids = frame[ID_COLUMN] if ID_COLUMN in frame.columns else frame.iloc[:, 0]
    return pd.Series(frame[column].to_numpy(), index=pd.Index(ids, name=ID_COLUMN), name=column)

