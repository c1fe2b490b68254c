"""
Canonical data types shared by all coders.

All types are frozen dataclasses over read-only numpy arrays, so instances can
be shared between threads without copying.
"""

import enum
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd
import xarray as xr

from ..core.exceptions import FormatError, TokenError

UNDETERMINED = "Undetermined"
"""Name of the category collecting mass truncated by InterVA post-processing."""

SUMMARY_COLUMNS = ("Mean", "Std.Error", "Lower", "Median", "Upper")

ROW_TOLERANCE = 1e-9


def _frozen(array, dtype=None):
    array = np.array(array, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class SymptomValue(enum.IntEnum):
    """Tri-state value of a symptom indicator."""

    MISSING = -1
    NO = 0
    YES = 1

    @property
    def token(self) -> str:
        return _TOKENS[self]

    @classmethod
    def from_token(cls, token: str) -> "SymptomValue":
        try:
            return _FROM_TOKENS[token]
        except KeyError:
            raise TokenError(
                f"{token!r} is not a canonical symptom value (Y, empty or .)", [token]
            ) from None


_TOKENS = {SymptomValue.YES: "Y", SymptomValue.NO: "", SymptomValue.MISSING: "."}
_FROM_TOKENS = {v: k for k, v in _TOKENS.items()}


@dataclass(frozen=True)
class SymptomMatrix:
    """
    N records by S symptoms of tri-state values.

    ``values`` holds the integer codes of :class:`SymptomValue`. Duplicated ids
    are representable so that :func:`~pyva.model.dataset.validate_dataset` can
    report them; coders reject them.
    """

    ids: Tuple[str, ...]
    symptoms: Tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        ids = tuple(str(i) for i in self.ids)
        symptoms = tuple(str(s) for s in self.symptoms)
        values = np.asarray(self.values)
        if values.size == 0:
            values = values.reshape(len(ids), len(symptoms))
        if values.ndim != 2 or values.shape != (len(ids), len(symptoms)):
            raise FormatError(
                f"Symptom values have shape {values.shape}, "
                f"expected ({len(ids)}, {len(symptoms)})"
            )
        if not np.isin(values, (-1, 0, 1)).all():
            raise FormatError("Symptom values must be -1 (Missing), 0 (No) or 1 (Yes)")
        if any(i == "" for i in ids):
            raise FormatError("Record ids must be nonempty")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "symptoms", symptoms)
        object.__setattr__(self, "values", _frozen(values, np.int8))

    @classmethod
    def from_tokens(cls, ids, symptoms, tokens):
        """Build a matrix from canonical tokens (``"Y"``, ``""``, ``"."``)."""
        tokens = np.asarray(tokens, dtype=object).reshape(len(ids), len(symptoms))
        coded = np.full(tokens.shape, 2, dtype=np.int8)
        for token, value in _FROM_TOKENS.items():
            coded[tokens == token] = value
        bad = {str(t) for t in tokens[coded == 2].ravel()}
        if bad:
            raise TokenError(
                f"Non-canonical tokens: {', '.join(map(repr, sorted(bad)))}", bad
            )
        return cls(ids, symptoms, coded)

    @property
    def n_records(self) -> int:
        return len(self.ids)

    @property
    def n_symptoms(self) -> int:
        return len(self.symptoms)

    @property
    def shape(self):
        return self.values.shape

    def to_tokens(self) -> np.ndarray:
        lookup = np.array([".", "", "Y"], dtype=object)
        return lookup[self.values.astype(int) + 1]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.to_tokens(), columns=list(self.symptoms))
        frame.insert(0, "ID", list(self.ids))
        return frame

    def index_of(self, symptom: str) -> int:
        try:
            return self.symptoms.index(symptom)
        except ValueError:
            raise KeyError(f"Unknown symptom {symptom!r}") from None

    def column(self, symptom: str) -> np.ndarray:
        return self.values[:, self.index_of(symptom)]

    def select(self, symptoms) -> "SymptomMatrix":
        """Restrict to ``symptoms``, in the given order."""
        idx = [self.index_of(s) for s in symptoms]
        return SymptomMatrix(self.ids, tuple(symptoms), self.values[:, idx])

    def take(self, rows) -> "SymptomMatrix":
        rows = np.asarray(rows, dtype=int)
        return SymptomMatrix(
            tuple(self.ids[r] for r in rows), self.symptoms, self.values[rows]
        )

    def with_values(self, values) -> "SymptomMatrix":
        return SymptomMatrix(self.ids, self.symptoms, values)

    def tallies(self) -> Dict[str, int]:
        """Count of Yes/No/Missing cells; the three counts add up to N×S."""
        return {
            "Yes": int((self.values == SymptomValue.YES).sum()),
            "No": int((self.values == SymptomValue.NO).sum()),
            "Missing": int((self.values == SymptomValue.MISSING).sum()),
        }

    def yes(self) -> np.ndarray:
        return self.values == SymptomValue.YES

    def no(self) -> np.ndarray:
        return self.values == SymptomValue.NO

    def missing(self) -> np.ndarray:
        return self.values == SymptomValue.MISSING


@dataclass(frozen=True)
class CauseList:
    causes: Tuple[str, ...]
    undetermined: Optional[str] = None

    def __post_init__(self):
        causes = tuple(str(c) for c in self.causes)
        if len(set(causes)) != len(causes):
            dupes = sorted({c for c in causes if causes.count(c) > 1})
            raise FormatError(f"Duplicate cause names: {', '.join(dupes)}")
        if len(causes) < 2:
            raise FormatError(f"At least two causes are needed, got {len(causes)}")
        if self.undetermined is not None and self.undetermined in causes:
            raise FormatError(
                f"{self.undetermined!r} is reserved for undetermined deaths "
                "and cannot be a substantive cause"
            )
        object.__setattr__(self, "causes", causes)

    def __len__(self):
        return len(self.causes)

    def __iter__(self):
        return iter(self.causes)

    @property
    def with_undetermined(self) -> Tuple[str, ...]:
        if self.undetermined is None:
            return self.causes
        return self.causes + (self.undetermined,)


@dataclass(frozen=True)
class CondProbMatrix:
    """
    S×C table of P(symptom = Yes | cause).

    ``grades`` optionally holds the letter grade each entry was read from or
    converted to; ``provenance`` is one of ``built-in``, ``trained`` or
    ``converted``.
    """

    symptoms: Tuple[str, ...]
    causes: Tuple[str, ...]
    values: np.ndarray
    grades: Optional[np.ndarray] = None
    provenance: str = "built-in"

    PROVENANCES = ("built-in", "trained", "converted")

    def __post_init__(self):
        symptoms = tuple(str(s) for s in self.symptoms)
        causes = tuple(str(c) for c in self.causes)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(symptoms), len(causes)):
            raise FormatError(
                f"Conditional probabilities have shape {values.shape}, "
                f"expected ({len(symptoms)}, {len(causes)})"
            )
        if not np.isfinite(values).all() or (values < 0).any() or (values > 1).any():
            raise FormatError("Conditional probabilities must lie in [0, 1]")
        if len(set(symptoms)) != len(symptoms):
            raise FormatError("Duplicate symptom names in conditional probabilities")
        if len(set(causes)) != len(causes):
            raise FormatError("Duplicate cause names in conditional probabilities")
        if self.provenance not in self.PROVENANCES:
            raise FormatError(f"Unknown provenance {self.provenance!r}")
        object.__setattr__(self, "symptoms", symptoms)
        object.__setattr__(self, "causes", causes)
        object.__setattr__(self, "values", _frozen(values, float))
        if self.grades is not None:
            grades = np.asarray(self.grades, dtype=object)
            if grades.shape != values.shape:
                raise FormatError("Grade labels must have the same shape as the values")
            object.__setattr__(self, "grades", _frozen(grades, object))

    def select_symptoms(self, symptoms) -> "CondProbMatrix":
        idx = [self.symptoms.index(s) for s in symptoms]
        return CondProbMatrix(
            tuple(symptoms),
            self.causes,
            self.values[idx],
            None if self.grades is None else self.grades[idx],
            self.provenance,
        )

    def select_causes(self, causes) -> "CondProbMatrix":
        idx = [self.causes.index(c) for c in causes]
        return CondProbMatrix(
            self.symptoms,
            tuple(causes),
            self.values[:, idx],
            None if self.grades is None else self.grades[:, idx],
            self.provenance,
        )

    def to_frame(self, grades=False) -> pd.DataFrame:
        data = self.grades if grades and self.grades is not None else self.values
        return pd.DataFrame(data, index=pd.Index(self.symptoms, name="symptom"), columns=self.causes)


@dataclass(frozen=True)
class PriorCSMF:
    causes: Tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (len(self.causes),):
            raise FormatError(
                f"Prior has {weights.size} weights for {len(self.causes)} causes"
            )
        if (weights < 0).any() or not np.isfinite(weights).all():
            raise FormatError("Prior weights must be finite and nonnegative")
        total = weights.sum()
        if total <= 0:
            raise FormatError("Prior weights must not all be zero")
        object.__setattr__(self, "causes", tuple(str(c) for c in self.causes))
        object.__setattr__(self, "weights", _frozen(weights / total, float))

    @classmethod
    def uniform(cls, causes):
        return cls(tuple(causes), np.ones(len(causes)))

    def select(self, causes) -> "PriorCSMF":
        return PriorCSMF(tuple(causes), [self.weights[self.causes.index(c)] for c in causes])


@dataclass(frozen=True)
class IndivProbResult:
    """
    Per-death cause distributions.

    ``point`` is N×C' with rows summing to one. ``quantiles`` optionally maps
    ``mean``, ``median``, ``lower`` and ``upper`` to N×C' posterior summaries.
    """

    ids: Tuple[str, ...]
    causes: Tuple[str, ...]
    point: np.ndarray
    quantiles: Optional[Dict[str, np.ndarray]] = None
    ci: Optional[float] = None

    QUANTILE_NAMES = ("mean", "median", "lower", "upper")

    def __post_init__(self):
        point = np.asarray(self.point, dtype=float).reshape(len(self.ids), len(self.causes))
        if point.shape[0] and not np.allclose(point.sum(axis=1), 1.0, rtol=0, atol=ROW_TOLERANCE):
            worst = np.abs(point.sum(axis=1) - 1).max()
            raise FormatError(f"Individual probabilities must sum to 1 per death (off by {worst:.3g})")
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "causes", tuple(self.causes))
        object.__setattr__(self, "point", _frozen(point, float))
        if self.quantiles is not None:
            quantiles = {k: _frozen(self.quantiles[k], float) for k in self.QUANTILE_NAMES}
            if (quantiles["lower"] > quantiles["median"] + 1e-12).any() or (
                quantiles["median"] > quantiles["upper"] + 1e-12
            ).any():
                raise FormatError("Quantile summaries must satisfy lower <= median <= upper")
            object.__setattr__(self, "quantiles", quantiles)

    def ranking(self) -> np.ndarray:
        """Cause indices per death, most likely first; ties keep cause-list order."""
        return np.argsort(-self.point, axis=1, kind="stable")

    def to_frame(self, which="point") -> pd.DataFrame:
        data = self.point if which == "point" else self.quantiles[which]
        return pd.DataFrame(data, index=pd.Index(self.ids, name="ID"), columns=list(self.causes))

    def to_xarray(self) -> xr.DataArray:
        """Summaries as a DataArray over (id, cause, statistic)."""
        if self.quantiles is None:
            stats = {"point": self.point}
        else:
            stats = self.quantiles
        return xr.DataArray(
            np.stack([stats[k] for k in stats], axis=-1),
            dims=("id", "cause", "statistic"),
            coords={"id": list(self.ids), "cause": list(self.causes), "statistic": list(stats)},
            name="indiv_prob",
        )


@dataclass(frozen=True)
class CSMFEstimate:
    """
    Cause-specific mortality fractions per sub-population.

    ``fractions`` maps a group label to a vector over ``causes``; for a
    posterior-based estimate ``summary`` maps the same labels to a table with
    columns Mean, Std.Error, Lower, Median and Upper.
    """

    causes: Tuple[str, ...]
    fractions: Dict[str, np.ndarray]
    summary: Optional[Dict[str, pd.DataFrame]] = field(default=None, compare=False)

    ALL = "All"

    def __post_init__(self):
        object.__setattr__(self, "causes", tuple(self.causes))
        fractions = {}
        for group, vector in self.fractions.items():
            vector = np.asarray(vector, dtype=float)
            if vector.shape != (len(self.causes),):
                raise FormatError(
                    f"CSMF for group {group!r} has {vector.size} entries for {len(self.causes)} causes"
                )
            if not np.isclose(vector.sum(), 1.0, rtol=0, atol=ROW_TOLERANCE):
                raise FormatError(f"CSMF for group {group!r} sums to {vector.sum():.12g}, not 1")
            fractions[str(group)] = _frozen(vector, float)
        object.__setattr__(self, "fractions", fractions)

    @property
    def groups(self):
        return tuple(self.fractions)

    def __getitem__(self, group) -> np.ndarray:
        return self.fractions[group]

    def series(self, group=None) -> pd.Series:
        group = group or self.groups[0]
        return pd.Series(self.fractions[group], index=list(self.causes), name=group)

    def to_frame(self) -> pd.DataFrame:
        """Long table with columns group, cause and either CSMF or the summary columns."""
        frames = []
        for group in self.groups:
            if self.summary is not None:
                frame = self.summary[group].reindex(list(self.causes)).reset_index()
                frame.columns = ["cause", *SUMMARY_COLUMNS]
            else:
                frame = pd.DataFrame({"cause": list(self.causes), "CSMF": self.fractions[group]})
            frame.insert(0, "group", group)
            frames.append(frame)
        return pd.concat(frames, ignore_index=True)
