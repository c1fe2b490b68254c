"""
Letter grades, probability tables and priors.

A :class:`GradeTable` translates letter grades (``A+``, ``B``, ...) into
probabilities. :func:`train_condprob` estimates P(symptom | cause) from
labeled records and optionally converts the estimates to grades.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import yaml

from ..core.config import GRADE_TABLE, PREVALENCE_TABLE
from ..core.exceptions import ConfigurationError, FormatError, TrainingError
from ..core.logging import logger
from ..core.utils import require_file
from ..model.types import CondProbMatrix, PriorCSMF, SymptomMatrix, SymptomValue

CONVERT_TYPES = ("quantile", "fixed", "empirical")
PREVALENCE_GROUPS = ("hiv", "malaria")


@dataclass(frozen=True)
class GradeTable:
    labels: Tuple[str, ...]
    values: np.ndarray
    reference_shares: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if len(self.labels) != len(values) or len(set(self.labels)) != len(self.labels):
            raise FormatError("Grade labels must be unique, one per value")
        if (values < 0).any() or (values > 1).any() or (np.diff(values) >= 0).any():
            raise FormatError("Grade values must be strictly decreasing within [0, 1]")
        if "A+" not in self.labels or values[self.labels.index("A+")] != 0.8:
            raise FormatError("The grade table must contain A+ = 0.8")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "values", values)
        if self.reference_shares is not None:
            shares = np.asarray(self.reference_shares, dtype=float)
            if shares.shape != values.shape or (shares < 0).any() or shares.sum() <= 0:
                raise FormatError("Reference shares must be nonnegative, one per grade")
            object.__setattr__(self, "reference_shares", shares / shares.sum())

    @classmethod
    def read(cls, path=None) -> "GradeTable":
        path = path or GRADE_TABLE
        with open(path) as f:
            grades = yaml.safe_load(f)["grades"]
        return cls(
            tuple(str(g["grade"]) for g in grades),
            [g["value"] for g in grades],
            [g.get("reference_share", 0.0) for g in grades]
            if all("reference_share" in g for g in grades)
            else None,
        )

    def value_of(self, label) -> float:
        try:
            return float(self.values[self.labels.index(label)])
        except ValueError:
            raise FormatError(f"Unknown grade {label!r}") from None

    def nearest(self, probs) -> np.ndarray:
        """Index of the grade with the closest value; ties go to the higher grade."""
        probs = np.asarray(probs, dtype=float)
        return np.abs(probs[..., None] - self.values).argmin(axis=-1)

    def by_quantile(self, probs) -> np.ndarray:
        """
        Grade indices handed out so that each grade covers its reference share
        of the entries, highest probabilities first. Equal probabilities get
        equal grades.
        """
        if self.reference_shares is None:
            raise ConfigurationError("Quantile conversion needs reference shares in the grade table")
        probs = np.asarray(probs, dtype=float)
        flat = probs.ravel()
        if not flat.size:
            return np.zeros(probs.shape, dtype=int)
        ordered = np.sort(flat)[::-1]
        # Fraction of entries strictly above each value.
        above = np.searchsorted(-ordered, -flat, side="left") / flat.size
        bounds = np.cumsum(self.reference_shares)
        idx = np.searchsorted(bounds, above, side="right")
        return np.minimum(idx, len(self.labels) - 1).reshape(probs.shape)


def load_grade_table(path=None) -> GradeTable:
    return GradeTable.read(path)


def labels_for(data: SymptomMatrix, labels: pd.Series) -> np.ndarray:
    """Cause label of every record of ``data``, looked up by ID."""
    labels = labels.astype(str)
    missing = [i for i in data.ids if i not in labels.index]
    if missing:
        raise TrainingError(
            f"{len(missing)} training record(s) have no cause label, e.g. {missing[:5]}"
        )
    values = labels.reindex(list(data.ids)).to_numpy(dtype=object)
    blank = [i for i, v in zip(data.ids, values) if not str(v).strip()]
    if blank:
        raise TrainingError(
            f"{len(blank)} training record(s) have an empty cause label, e.g. {blank[:5]}"
        )
    return values


def cause_counts(labels, causes: Optional[Sequence[str]] = None):
    """The cause list (sorted labels unless given) and the number of records per cause."""
    labels = np.asarray(labels, dtype=object)
    if causes is None:
        causes = tuple(sorted(set(labels)))
    causes = tuple(causes)
    unknown = sorted(set(labels) - set(causes))
    if unknown:
        raise TrainingError(f"Training labels not in the cause list: {', '.join(unknown)}")
    counts = np.array([(labels == c).sum() for c in causes])
    empty = [c for c, n in zip(causes, counts) if n == 0]
    if empty:
        raise TrainingError(f"No training records for cause(s): {', '.join(empty)}")
    return causes, counts


def symptom_counts(train: SymptomMatrix, labels, causes):
    """Yes and non-missing counts per symptom and cause, both S×C."""
    labels = np.asarray(labels, dtype=object)
    onehot = np.stack([labels == c for c in causes], axis=1).astype(float)
    yes = (train.values == SymptomValue.YES).astype(float).T @ onehot
    observed = (train.values != SymptomValue.MISSING).astype(float).T @ onehot
    return yes, observed


def presence_shares(train: SymptomMatrix, labels, causes) -> CondProbMatrix:
    """
    Unsmoothed share of Yes among the answered records per symptom and cause,
    for ruling out causes; unanswered cells count as possible (1).
    """
    yes, observed = symptom_counts(train, labels, causes)
    shares = np.divide(yes, observed, out=np.ones_like(yes), where=observed > 0)
    return CondProbMatrix(train.symptoms, causes, shares, provenance="trained")


def train_condprob(
    train: SymptomMatrix,
    labels,
    grade_table: Optional[GradeTable] = None,
    convert_type: str = "quantile",
    causes: Optional[Sequence[str]] = None,
) -> CondProbMatrix:
    """
    Estimate P(symptom = Yes | cause) from labeled records.

    The estimate is the share of Yes among the non-missing answers of the
    cause's records. A symptom never answered for a cause gets its Yes share
    over all answered records instead, at least the lowest nonzero grade, so
    that a missing training cell never rules the cause out.
    ``convert_type`` then decides what is returned:

    ``empirical``
        the estimates themselves;
    ``fixed``
        each estimate replaced by the value of the nearest grade;
    ``quantile``
        grades handed out by rank so that each grade covers its reference
        share of the table.
    """
    if convert_type not in CONVERT_TYPES:
        raise ConfigurationError(
            f"Unknown convert type {convert_type!r}, choose from {', '.join(CONVERT_TYPES)}"
        )
    causes, _ = cause_counts(labels, causes)
    yes, observed = symptom_counts(train, labels, causes)
    grade_table = grade_table or GradeTable.read()
    lowest = np.flatnonzero(grade_table.values > 0)[-1]
    estimate = np.divide(yes, observed, out=np.zeros_like(yes), where=observed > 0)
    unobserved = observed == 0
    if unobserved.any():
        answered = observed.sum(axis=1)
        marginal = np.divide(yes.sum(axis=1), answered, out=np.zeros_like(answered), where=answered > 0)
        fill = np.maximum(marginal, grade_table.values[lowest])
        estimate = np.where(unobserved, fill[:, None], estimate)
        logger.warning(
            f"{int(unobserved.sum())} symptom/cause pair(s) never observed; "
            "using the symptom's overall Yes share"
        )
    if convert_type == "empirical":
        return CondProbMatrix(train.symptoms, causes, estimate, provenance="trained")
    if convert_type == "fixed":
        idx = grade_table.nearest(estimate)
    else:
        idx = grade_table.by_quantile(estimate)
    idx = np.where(unobserved & (grade_table.values[idx] == 0), lowest, idx)
    grades = np.asarray(grade_table.labels, dtype=object)[idx]
    return CondProbMatrix(
        train.symptoms, causes, grade_table.values[idx], grades, provenance="converted"
    )


def load_probbase(path, grade_table: Optional[GradeTable] = None) -> CondProbMatrix:
    """
    Read a symptom × cause table. The first column names the symptoms, the
    header names the causes; cells are letter grades or numbers in [0, 1].
    """
    frame = pd.read_csv(require_file(path, "probability table"), dtype=str, keep_default_na=False)
    symptoms = frame.iloc[:, 0].str.strip().tolist()
    causes = [str(c) for c in frame.columns[1:]]
    cells = frame.iloc[:, 1:].to_numpy(dtype=object)
    numeric = pd.to_numeric(pd.Series(cells.ravel()), errors="coerce").to_numpy().reshape(cells.shape)
    is_grade = np.isnan(numeric)
    grades = None
    if is_grade.any():
        grade_table = grade_table or GradeTable.read()
        lookup = dict(zip(grade_table.labels, grade_table.values))
        unknown = sorted({str(c).strip() for c in cells[is_grade]} - set(lookup))
        if unknown:
            raise FormatError(f"{path}: unknown grade(s) {', '.join(map(repr, unknown))}")
        numeric[is_grade] = [lookup[str(c).strip()] for c in cells[is_grade]]
        grades = np.where(is_grade, cells, None)
    return CondProbMatrix(symptoms, causes, numeric, grades, provenance="built-in")


def load_prior(path) -> Tuple[PriorCSMF, pd.Series]:
    """Read ``cause,prior,group``; group is ``hiv``, ``malaria`` or empty."""
    frame = pd.read_csv(require_file(path, "prior"), dtype={"cause": str}, keep_default_na=False)
    for column in ("cause", "prior"):
        if column not in frame.columns:
            raise FormatError(f"{path}: prior table needs a {column!r} column")
    groups = frame["group"] if "group" in frame.columns else pd.Series([""] * len(frame))
    groups = pd.Series(groups.astype(str).str.lower().to_numpy(), index=frame["cause"], name="group")
    unknown = sorted(set(groups) - {"", *PREVALENCE_GROUPS})
    if unknown:
        raise FormatError(f"{path}: unknown prior group(s) {', '.join(unknown)}")
    return PriorCSMF(tuple(frame["cause"]), frame["prior"].astype(float).to_numpy()), groups


def load_prevalence_levels(path=None) -> dict:
    with open(path or PREVALENCE_TABLE) as f:
        return {str(k): float(v) for k, v in yaml.safe_load(f)["levels"].items()}


def apply_prevalence(prior: PriorCSMF, groups: pd.Series, hiv="h", malaria="h", levels=None) -> PriorCSMF:
    """Scale the prior of HIV- and malaria-related causes by the factor of the chosen level."""
    levels = levels or load_prevalence_levels()
    for name, level in (("hiv", hiv), ("malaria", malaria)):
        if level not in levels:
            raise ConfigurationError(
                f"Unknown {name} level {level!r}, choose from {', '.join(levels)}"
            )
    factors = {"hiv": levels[hiv], "malaria": levels[malaria], "": 1.0}
    weights = np.array(
        [prior.weights[i] * factors[groups.get(c, "")] for i, c in enumerate(prior.causes)]
    )
    return PriorCSMF(prior.causes, weights)
