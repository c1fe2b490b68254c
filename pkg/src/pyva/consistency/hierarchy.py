"""
Symptom hierarchies for the pre-coding consistency check.

A hierarchy is a set of relations between a lower symptom and a higher one:

``notask``
    the lower symptom is not asked when the higher one holds ``trigger``;
    ``implied`` is the lower symptom's substantive value.
``anc``
    when the lower symptom holds ``trigger`` the higher one is set to
    ``implied`` (a more general version of the same finding).

Relations are read from a CSV with the columns
``symptom,relation,higher_symptom,trigger_value,implied_value,neonate_only``.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from importlib.resources import files
from typing import FrozenSet, Tuple

import pandas as pd

from ..core.exceptions import ConfigurationError
from ..model.types import SymptomValue

RELATIONS = ("notask", "anc")
MAX_DEPTH = 2

_VALUE_TOKENS = {
    "Y": SymptomValue.YES,
    "YES": SymptomValue.YES,
    "N": SymptomValue.NO,
    "NO": SymptomValue.NO,
}

EXAMPLE_HIERARCHY = files("pyva.data").joinpath("hierarchy_example.csv")


def _parse_value(token, column):
    try:
        return _VALUE_TOKENS[str(token).strip().upper()]
    except KeyError:
        raise ConfigurationError(
            f"{column} must be Y or N, got {token!r}"
        ) from None


def _parse_flag(token):
    return str(token).strip().lower() in ("1", "true", "yes", "y")


@dataclass(frozen=True)
class Relation:
    symptom: str
    higher: str
    trigger: SymptomValue = SymptomValue.YES
    implied: SymptomValue = SymptomValue.YES


@dataclass(frozen=True)
class SymptomHierarchy:
    notask: Tuple[Relation, ...] = ()
    anc: Tuple[Relation, ...] = ()
    neonate_only: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "notask", tuple(self.notask))
        object.__setattr__(self, "anc", tuple(self.anc))
        object.__setattr__(self, "neonate_only", frozenset(self.neonate_only))
        for relation in self.notask + self.anc:
            if relation.symptom == relation.higher:
                raise ConfigurationError(f"{relation.symptom!r} cannot be its own ancestor")
        depth = self.depth()
        if depth > MAX_DEPTH:
            raise ConfigurationError(
                f"Hierarchy is {depth} levels deep; at most {MAX_DEPTH} are supported"
            )

    @property
    def symptoms(self) -> FrozenSet[str]:
        names = {r.symptom for r in self.notask + self.anc}
        names |= {r.higher for r in self.notask + self.anc}
        return frozenset(names | self.neonate_only)

    def depth(self) -> int:
        """Longest chain of lower-to-higher relations."""
        parents = defaultdict(set)
        for relation in self.notask + self.anc:
            parents[relation.symptom].add(relation.higher)

        def longest(symptom, path):
            if symptom in path:
                raise ConfigurationError(
                    f"Cyclic hierarchy through {' -> '.join(path + (symptom,))}"
                )
            return max(
                (1 + longest(p, path + (symptom,)) for p in parents[symptom]), default=0
            )

        return max((longest(s, ()) for s in list(parents)), default=0)

    def check_symptoms(self, symptoms):
        unknown = sorted(self.symptoms - set(symptoms))
        if unknown:
            raise ConfigurationError(
                f"Hierarchy refers to symptom(s) not in the data: {', '.join(unknown)}"
            )

    def restricted_to(self, symptoms) -> "SymptomHierarchy":
        """Drop relations that mention symptoms outside ``symptoms``."""
        keep = set(symptoms)
        ok = lambda r: r.symptom in keep and r.higher in keep  # noqa: E731
        return SymptomHierarchy(
            tuple(filter(ok, self.notask)),
            tuple(filter(ok, self.anc)),
            self.neonate_only & keep,
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "SymptomHierarchy":
        required = ["symptom", "relation", "higher_symptom"]
        missing = [c for c in required if c not in frame.columns]
        if missing:
            raise ConfigurationError(f"Hierarchy table lacks column(s) {', '.join(missing)}")
        notask, anc, neonate_only = [], [], set()
        for row in frame.fillna("").to_dict("records"):
            relation = str(row["relation"]).strip().lower()
            if relation not in RELATIONS:
                raise ConfigurationError(
                    f"Unknown relation {row['relation']!r} for {row['symptom']!r}, "
                    f"choose from {', '.join(RELATIONS)}"
                )
            entry = Relation(
                symptom=str(row["symptom"]).strip(),
                higher=str(row["higher_symptom"]).strip(),
                trigger=_parse_value(row.get("trigger_value") or "Y", "trigger_value"),
                implied=_parse_value(row.get("implied_value") or "Y", "implied_value"),
            )
            (notask if relation == "notask" else anc).append(entry)
            if _parse_flag(row.get("neonate_only", "")):
                neonate_only.add(entry.symptom)
        return cls(tuple(notask), tuple(anc), frozenset(neonate_only))

    @classmethod
    def read(cls, path) -> "SymptomHierarchy":
        return cls.from_frame(pd.read_csv(path, dtype=str, keep_default_na=False))

    @classmethod
    def example(cls) -> "SymptomHierarchy":
        with EXAMPLE_HIERARCHY.open() as f:
            return cls.read(f)
