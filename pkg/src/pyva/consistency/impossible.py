"""
Removal of causes that are physically impossible given sex and age.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core.config import DEFAULT_DEMOGRAPHIC_SYMPTOMS
from ..core.exceptions import InconsistencyError
from ..core.logging import add_to_report_log, logger
from ..model.types import CondProbMatrix, SymptomMatrix, SymptomValue

DEMOGRAPHIC_SYMPTOMS = tuple(DEFAULT_DEMOGRAPHIC_SYMPTOMS.split(","))


@dataclass(frozen=True)
class ImpossibleCauses:
    """
    ``possible`` is an N×C boolean mask over ``causes``; ``kept`` are the
    causes possible for at least one record, in the original order.
    """

    causes: Tuple[str, ...]
    possible: np.ndarray
    kept: Tuple[str, ...]
    removed: Tuple[str, ...]

    def kept_mask(self) -> np.ndarray:
        """The per-record mask restricted to the kept causes."""
        idx = [self.causes.index(c) for c in self.kept]
        return self.possible[:, idx]

    @classmethod
    def none(cls, n_records, causes):
        causes = tuple(causes)
        return cls(causes, np.ones((n_records, len(causes)), dtype=bool), causes, ())


@add_to_report_log
def remove_impossible_causes(
    data: SymptomMatrix,
    probs: CondProbMatrix,
    demographics=DEMOGRAPHIC_SYMPTOMS,
) -> ImpossibleCauses:
    """
    Cause k is impossible for record i when a demographic symptom j is Yes for
    i and P(j = Yes | k) is zero. A cause is removed from the population only
    when it is impossible for every record.
    """
    used = [s for s in demographics if s in data.symptoms and s in probs.symptoms]
    ignored = [s for s in demographics if s not in used]
    if ignored:
        logger.debug(f"Demographic symptom(s) not available: {', '.join(ignored)}")
    n, c = data.n_records, len(probs.causes)
    impossible = np.zeros((n, c), dtype=bool)
    for symptom in used:
        present = data.column(symptom) == SymptomValue.YES
        zero = probs.values[probs.symptoms.index(symptom)] == 0
        impossible |= np.outer(present, zero)
    removed_mask = impossible.all(axis=0) if n else np.zeros(c, dtype=bool)
    kept = tuple(k for k, r in zip(probs.causes, removed_mask) if not r)
    removed = tuple(k for k, r in zip(probs.causes, removed_mask) if r)
    if not kept:
        raise InconsistencyError(
            "Every cause is impossible for every record given "
            f"{', '.join(used)}; check the sex and age indicators"
        )
    if removed:
        logger.info(f"Removed {len(removed)} impossible cause(s): {', '.join(removed)}")
    possible = ~impossible
    contradictory = ~possible[:, ~removed_mask].any(axis=1)
    if contradictory.any():
        # e.g. both male and female recorded: nothing is ruled out for these.
        logger.warning(
            f"{int(contradictory.sum())} record(s) rule out every cause; "
            "their demographic indicators are ignored"
        )
        possible[contradictory] = True
    return ImpossibleCauses(probs.causes, possible, kept, removed)
