"""
Download and dichotomize the PHMRC gold standard data.

Yes/no and multi-category items become symptoms through a
:class:`PhmrcSymptomTable`, shipped for the adult module and detected from
the data for the others. Don't Know, Refused and empty answers are Missing.
Quantitative items (durations, weights) are turned into symptoms through a
:class:`PhmrcCutoffTable`, shipped per module in ``pyva/data/phmrc`` and
replaceable by a user file.
"""

import operator
import re
from dataclasses import dataclass
from importlib.resources import files
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd
import requests
import yaml

from ..core.exceptions import ConfigurationError, FetchError, FormatError, SchemaError
from ..core.logging import add_to_report_log, logger
from ..model.types import SymptomMatrix, SymptomValue
from .who import log_tallies

MODULES = ("adult", "child", "neonate")
CUTOFF_MODES = ("default", "adapt")
SYMPTOM_KINDS = ("yesno", "category")
MAX_CATEGORIES = 8
REPORT_COLUMNS = ["symptom", "source_column", "kind", "rule", "Yes", "No", "Missing"]

COMPARATORS = {
    ">=": operator.ge,
    ">": operator.gt,
    "<=": operator.le,
    "<": operator.lt,
}

_DATA = files("pyva.data").joinpath("phmrc")


def load_schema() -> dict:
    with _DATA.joinpath("schema.yaml").open() as f:
        return yaml.safe_load(f)


SCHEMA = load_schema()


def _check_module(module):
    if module not in MODULES:
        raise ConfigurationError(
            f"Unknown PHMRC module {module!r}, choose from {', '.join(MODULES)}"
        )


@dataclass(frozen=True)
class PhmrcCutoffTable:
    """Per-symptom cutoffs for quantitative PHMRC items."""

    table: pd.DataFrame
    mode: str = "default"

    COLUMNS = ["symptom", "source_column", "comparator", "cutoff"]

    def __post_init__(self):
        if self.mode not in CUTOFF_MODES:
            raise ConfigurationError(
                f"Unknown cutoff mode {self.mode!r}, choose from {', '.join(CUTOFF_MODES)}"
            )
        missing = [c for c in self.COLUMNS if c not in self.table.columns]
        if missing:
            raise FormatError(f"Cutoff table lacks column(s) {', '.join(missing)}")
        dupes = self.table["symptom"][self.table["symptom"].duplicated()].tolist()
        if dupes:
            raise FormatError(f"Cutoff table has several rows for {', '.join(dupes)}")
        bad = sorted(set(self.table["comparator"]) - set(COMPARATORS))
        if bad:
            raise FormatError(f"Unknown comparator(s) {', '.join(bad)}")

    @classmethod
    def read(cls, path, mode="default"):
        table = pd.read_csv(path, comment="#", dtype={"symptom": str, "source_column": str})
        table["comparator"] = table["comparator"].str.strip()
        table["cutoff"] = table["cutoff"].astype(float)
        return cls(table.reset_index(drop=True), mode)

    @classmethod
    def default(cls, module, mode="default"):
        _check_module(module)
        name = SCHEMA["modules"][module]["cutoff_table"]
        with _DATA.joinpath(name).open() as f:
            return cls.read(f, mode)

    def __iter__(self):
        return self.table.itertuples(index=False)

    def adapted(self, raw: pd.DataFrame, causes: pd.Series) -> "PhmrcCutoffTable":
        """
        Cutoffs estimated from labeled data: for each item the median over
        causes of the cause-specific mean of the source column.
        """
        table = self.table.copy()
        for i, row in table.iterrows():
            values = numeric_values(raw[row.source_column])
            cause_means = values.groupby(causes.to_numpy()).mean().dropna()
            if len(cause_means):
                table.loc[i, "cutoff"] = float(np.median(cause_means))
            else:
                logger.warning(
                    f"No numeric values for {row.source_column}; keeping cutoff {row.cutoff}"
                )
        return PhmrcCutoffTable(table, "adapt")


@dataclass(frozen=True)
class PhmrcSymptomTable:
    """
    Yes/no and multi-category PHMRC items that become symptoms.

    A ``yesno`` row maps Yes to Yes and No to No. A ``category`` row is one
    answer of a multi-category item: Yes when the answer equals ``value``, No
    for any other substantive answer. Missing tokens are Missing for both.
    """

    table: pd.DataFrame

    COLUMNS = ["symptom", "source_column", "kind", "value"]

    def __post_init__(self):
        missing = [c for c in self.COLUMNS if c not in self.table.columns]
        if missing:
            raise FormatError(f"Symptom table lacks column(s) {', '.join(missing)}")
        dupes = self.table["symptom"][self.table["symptom"].duplicated()].tolist()
        if dupes:
            raise FormatError(f"Symptom table has several rows for {', '.join(dupes)}")
        bad = sorted(set(self.table["kind"]) - set(SYMPTOM_KINDS))
        if bad:
            raise FormatError(f"Unknown symptom kind(s) {', '.join(bad)}")
        unset = self.table["symptom"][(self.table["kind"] == "category") & (self.table["value"] == "")]
        if len(unset):
            raise FormatError(f"Category symptom(s) without an answer: {', '.join(unset)}")

    @classmethod
    def read(cls, path):
        table = pd.read_csv(path, comment="#", dtype=str, keep_default_na=False)
        table["kind"] = table["kind"].str.strip()
        return cls(table.reset_index(drop=True))

    @classmethod
    def default(cls, module) -> Optional["PhmrcSymptomTable"]:
        """Shipped table of ``module``, or None when its items are detected from the data."""
        _check_module(module)
        name = SCHEMA["modules"][module].get("symptom_table")
        if name is None:
            return None
        with _DATA.joinpath(name).open() as f:
            return cls.read(f)

    @classmethod
    def detect(cls, raw: pd.DataFrame, exclude=()) -> "PhmrcSymptomTable":
        """
        Table built from the answers found in ``raw``: yes/no items, plus one
        row per answer of every text item with at most ``MAX_CATEGORIES``
        substantive answers.
        """
        rows = [(c, c, "yesno", "") for c in binary_columns(raw, exclude)]
        for column in category_columns(raw, exclude):
            for value in sorted(set(raw[column].unique()) - set(SCHEMA["missing_tokens"])):
                rows.append((f"{column}_{_slug(value)}", column, "category", value))
        logger.debug(f"Detected {len(rows)} PHMRC symptom(s) from the data")
        return cls(pd.DataFrame(rows, columns=cls.COLUMNS))

    def __iter__(self):
        return self.table.itertuples(index=False)

    def __len__(self):
        return len(self.table)

    def encode(self, raw: pd.DataFrame) -> Dict[str, np.ndarray]:
        missing_tokens = SCHEMA["missing_tokens"]
        columns = {}
        for row in self:
            answers = raw[row.source_column]
            codes = np.full(len(raw), SymptomValue.MISSING, dtype=np.int8)
            if row.kind == "yesno":
                codes[(answers == "Yes").to_numpy()] = SymptomValue.YES
                codes[(answers == "No").to_numpy()] = SymptomValue.NO
            else:
                codes[(~answers.isin(missing_tokens)).to_numpy()] = SymptomValue.NO
                codes[(answers == row.value).to_numpy()] = SymptomValue.YES
            columns[row.symptom] = codes
        return columns


def numeric_values(column: pd.Series) -> pd.Series:
    """Column as floats, with empty cells, text and missing codes as NaN."""
    values = pd.to_numeric(column.replace("", np.nan), errors="coerce")
    return values.mask(values.isin(SCHEMA["missing_codes"]))


def phmrc_url(module, config=None):
    """Download location of a PHMRC module; the configuration may override it."""
    _check_module(module)
    if config is not None:
        return config(f"phmrc_url_{module}")
    from ..core.config import PHMRC_URLS

    return PHMRC_URLS[module]


def check_width(raw: pd.DataFrame, module):
    expected = SCHEMA["modules"][module]["n_columns"]
    if expected is not None and raw.shape[1] != expected:
        raise SchemaError(
            f"PHMRC {module} data must have {expected} columns, found {raw.shape[1]}"
        )


@add_to_report_log
def fetch_phmrc(
    module: str,
    rows: Optional[int] = None,
    url: Optional[str] = None,
    timeout: float = 60,
    session: Optional[requests.Session] = None,
) -> pd.DataFrame:
    """
    Download the raw PHMRC table of ``module``.

    Parameters
    ----------
    module : {"adult", "child", "neonate"}
    rows : int, optional
        Read at most this many records; ``0`` returns only the header.
    url : str, optional
        Override the download location.
    """
    _check_module(module)
    if rows is not None and rows < 0:
        raise ConfigurationError(f"Row limit must not be negative, got {rows}")
    url = url or phmrc_url(module)
    getter = session or requests
    logger.info(f"Downloading PHMRC {module} data from {url}")
    try:
        response = getter.get(url, stream=True, timeout=timeout)
        response.raise_for_status()
        response.raw.decode_content = True
        raw = pd.read_csv(
            response.raw, nrows=rows, dtype=str, keep_default_na=False, na_filter=False
        )
    except requests.exceptions.RequestException as e:
        raise FetchError(f"Failed to download {url}: {e}", url=url) from e
    check_width(raw, module)
    logger.info(f"Fetched {len(raw)} PHMRC {module} record(s) with {raw.shape[1]} columns")
    return raw


def _is_meta(column: str) -> bool:
    return any(column.startswith(prefix) for prefix in SCHEMA["meta_prefixes"])


def binary_columns(raw: pd.DataFrame, exclude=()) -> list:
    """Columns whose answers are all Yes / No / Don't Know / Refused and that have some Yes or No."""
    allowed = {"Yes", "No", *SCHEMA["missing_tokens"]}
    exclude = set(exclude)
    selected = []
    for position, column in enumerate(raw.columns):
        if position == 0 or column in exclude or _is_meta(column):
            continue
        values = set(raw[column].unique())
        if values <= allowed and values & {"Yes", "No"}:
            selected.append(column)
    return selected


def category_columns(raw: pd.DataFrame, exclude=()) -> list:
    """Text columns with two to ``MAX_CATEGORIES`` substantive answers other than plain Yes / No."""
    exclude = set(exclude)
    selected = []
    for position, column in enumerate(raw.columns):
        if position == 0 or column in exclude or _is_meta(column):
            continue
        answers = set(raw[column].unique()) - set(SCHEMA["missing_tokens"])
        if answers <= {"Yes", "No"} or not 2 <= len(answers) <= MAX_CATEGORIES:
            continue
        if numeric_values(pd.Series(sorted(answers))).notna().all():
            continue
        selected.append(column)
    return selected


def _slug(value: str) -> str:
    return re.sub(r"[^0-9a-z]+", "_", value.lower()).strip("_") or "blank"


def dichotomize(values: pd.Series, comparator: str, cutoff: float) -> np.ndarray:
    numbers = numeric_values(values)
    codes = np.full(len(values), SymptomValue.MISSING, dtype=np.int8)
    known = numbers.notna().to_numpy()
    hit = COMPARATORS[comparator](numbers.to_numpy()[known], cutoff)
    codes[known] = np.where(hit, SymptomValue.YES, SymptomValue.NO)
    return codes


def symptom_report(
    data: SymptomMatrix, symptoms: PhmrcSymptomTable, cutoffs: PhmrcCutoffTable
) -> pd.DataFrame:
    """Per-symptom Yes/No/Missing counts with the rule that produced each symptom."""
    rules = {}
    for row in symptoms:
        rules[row.symptom] = (row.source_column, row.kind, row.value if row.kind == "category" else "Yes/No")
    for row in cutoffs:
        rules[row.symptom] = (row.source_column, "cutoff", f"{row.comparator} {row.cutoff:g}")
    rows = []
    for j, symptom in enumerate(data.symptoms):
        values = data.values[:, j]
        rows.append(
            (
                symptom,
                *rules[symptom],
                int((values == SymptomValue.YES).sum()),
                int((values == SymptomValue.NO).sum()),
                int((values == SymptomValue.MISSING).sum()),
            )
        )
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def diff_symptom_reports(report: pd.DataFrame, reference: pd.DataFrame) -> pd.DataFrame:
    """
    Join two symptom reports on ``symptom``.

    The result keeps the rows of ``report``, adds the reference counts as
    ``<tally>_reference`` and their differences as ``<tally>_diff``, and
    marks each symptom ``both``, ``only_here`` or ``only_reference``.
    """
    tallies = ["Yes", "No", "Missing"]
    missing = [c for c in ["symptom", *tallies] if c not in reference.columns]
    if missing:
        raise FormatError(f"Reference report lacks column(s) {', '.join(missing)}")
    reference = reference.assign(**{t: pd.to_numeric(reference[t]) for t in tallies})
    merged = report.merge(
        reference[["symptom", *tallies]], on="symptom", how="outer", suffixes=("", "_reference"), indicator=True
    )
    merged["status"] = merged.pop("_merge").map(
        {"both": "both", "left_only": "only_here", "right_only": "only_reference"}
    ).astype(str)
    for tally in tallies:
        merged[f"{tally}_diff"] = merged[tally] - merged[f"{tally}_reference"]
    differing = merged[(merged["status"] != "both") | merged[[f"{t}_diff" for t in tallies]].ne(0).any(axis=1)]
    logger.info(f"{len(differing)} of {len(merged)} symptom(s) differ from the reference report")
    return merged


def convert_phmrc_with_report(
    raw: pd.DataFrame,
    module: str = "adult",
    cutoff: str = "default",
    cause_column: Optional[str] = None,
    cutoff_table: Optional[PhmrcCutoffTable] = None,
    id_column: Optional[str] = None,
    symptom_table: Optional[PhmrcSymptomTable] = None,
) -> Tuple[SymptomMatrix, Optional[pd.Series], pd.DataFrame]:
    """
    Turn raw PHMRC rows into a symptom matrix and the cause labels.

    Symptoms come from ``symptom_table`` (by default the module's shipped
    table, or one detected from the data when the module ships none) and from
    the dichotomized items of ``cutoff_table``. The first column is the site.
    Records get sequential IDs ``1..N`` unless ``id_column`` names a column to
    take them from. Also returns the :func:`symptom_report` of the result.
    """
    _check_module(module)
    if cutoff not in CUTOFF_MODES:
        raise ConfigurationError(
            f"Unknown cutoff mode {cutoff!r}, choose from {', '.join(CUTOFF_MODES)}"
        )
    check_width(raw, module)
    raw = raw.fillna("").astype(str)
    cause_column = cause_column or SCHEMA["modules"][module]["cause_column"]
    causes = None
    if cause_column in raw.columns:
        causes = pd.Series(raw[cause_column].to_numpy(), name=cause_column)
    elif cutoff == "adapt" or cause_column != SCHEMA["modules"][module]["cause_column"]:
        raise SchemaError(f"Cause column {cause_column!r} not found in PHMRC data")

    table = cutoff_table or PhmrcCutoffTable.default(module)
    quantitative = {r.source_column for r in table}
    symptom_table = (
        symptom_table
        or PhmrcSymptomTable.default(module)
        or PhmrcSymptomTable.detect(raw, exclude=quantitative | {cause_column})
    )
    sources = [r.source_column for r in table] + [r.source_column for r in symptom_table]
    missing_sources = sorted({s for s in sources if s not in raw.columns})
    if missing_sources:
        raise SchemaError(f"PHMRC data lacks source column(s) {', '.join(missing_sources)}")
    clashes = sorted(set(symptom_table.table["symptom"]) & set(table.table["symptom"]))
    if clashes:
        raise FormatError(f"Symptom(s) defined by both the symptom and the cutoff table: {', '.join(clashes)}")
    if cutoff == "adapt":
        if causes is None or (causes == "").any():
            raise ConfigurationError("Adaptive cutoffs need a cause label for every record")
        table = table.adapted(raw, causes)

    columns: Dict[str, np.ndarray] = symptom_table.encode(raw)
    for row in table:
        columns[row.symptom] = dichotomize(raw[row.source_column], row.comparator, row.cutoff)

    if id_column is not None:
        ids = raw[id_column].tolist()
    else:
        ids = [str(i + 1) for i in range(len(raw))]
    symptoms = list(columns)
    values = (
        np.column_stack([columns[s] for s in symptoms])
        if symptoms
        else np.empty((len(raw), 0), dtype=np.int8)
    )
    data = SymptomMatrix(ids, symptoms, values)
    tallies = log_tallies(f"PHMRC {module} ({cutoff} cutoffs)", data)
    logger.info(
        f"{len(symptoms)} binary symptoms generated "
        f"({len(symptom_table)} from the symptom table, {len(table.table)} dichotomized items); "
        f"NotKnown={tallies['Missing']}"
    )
    if causes is not None:
        causes.index = pd.Index(ids, name="ID")
    return data, causes, symptom_report(data, symptom_table, table)


@add_to_report_log
def convert_phmrc(
    raw: pd.DataFrame,
    module: str = "adult",
    cutoff: str = "default",
    cause_column: Optional[str] = None,
    cutoff_table: Optional[PhmrcCutoffTable] = None,
    id_column: Optional[str] = None,
    symptom_table: Optional[PhmrcSymptomTable] = None,
) -> Tuple[SymptomMatrix, Optional[pd.Series]]:
    """Turn raw PHMRC rows into a symptom matrix and the cause labels; see :func:`convert_phmrc_with_report`."""
    data, causes, _ = convert_phmrc_with_report(
        raw, module, cutoff, cause_column, cutoff_table, id_column, symptom_table
    )
    return data, causes
