"""
Pre-coding consistency check.

Passes over the symptoms in column order. For each symptom its ``notask``
relations are applied first (a lower symptom that should not have been asked
is reset), then its ``anc`` relations (a more general symptom is set from a
specific one). Passes repeat until one of them changes nothing; two passes
settle a pure ``anc`` or pure ``notask`` hierarchy of depth two, mixed ones
may need more.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd

from ..core.exceptions import ConfigurationError
from ..core.logging import add_to_report_log, logger
from ..model.types import SymptomMatrix, SymptomValue
from .hierarchy import SymptomHierarchy

VARIANTS = ("interva4", "interva5", "insilico")
PASSES = 2
NEONATE_INDICATOR = "neonate"


@dataclass(frozen=True)
class CheckPolicy:
    """
    How contradictions are resolved.

    ``interva4`` resets an unasked symptom to No. ``interva5`` resets it to
    Missing, but only when it holds its substantive value. ``insilico`` resets
    it to Missing unconditionally. Both later variants also clear
    neonate-only symptoms on records whose neonate indicator is not Yes.
    """

    variant: str = "interva5"
    neonate_indicator: str = NEONATE_INDICATOR

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(
                f"Unknown check policy {self.variant!r}, choose from {', '.join(VARIANTS)}"
            )

    @property
    def impute(self) -> SymptomValue:
        return SymptomValue.NO if self.variant == "interva4" else SymptomValue.MISSING

    @property
    def substantive_only(self) -> bool:
        return self.variant == "interva5"

    @property
    def clears_neonate_only(self) -> bool:
        return self.variant != "interva4"


def _neonate_columns(data, hierarchy, policy):
    """(indicator column, neonate-only columns), or None when nothing is cleared."""
    if not (policy.clears_neonate_only and hierarchy.neonate_only):
        return None
    if policy.neonate_indicator not in data.symptoms:
        logger.warning(
            f"No {policy.neonate_indicator!r} indicator in the data; "
            "neonate-only symptoms are kept"
        )
        return None
    return data.index_of(policy.neonate_indicator), [data.index_of(s) for s in sorted(hierarchy.neonate_only)]


def _clear_neonate_only(values, neonate):
    if neonate is None:
        return
    indicator, columns = neonate
    not_neonate = values[:, indicator] != SymptomValue.YES
    for j in columns:
        values[not_neonate, j] = SymptomValue.MISSING


def _one_pass(values, data, notask, anc, policy):
    for j in range(data.n_symptoms):
        for relation in notask.get(j, ()):
            hit = values[:, relation[0]] == relation[1]
            if policy.substantive_only:
                hit &= values[:, j] == relation[2]
            values[hit, j] = policy.impute
        for relation in anc.get(j, ()):
            hit = values[:, j] == relation[1]
            values[hit, relation[0]] = relation[2]


def _index(relations, data):
    by_symptom = {}
    for r in relations:
        by_symptom.setdefault(data.index_of(r.symptom), []).append(
            (data.index_of(r.higher), r.trigger, r.implied)
        )
    return by_symptom


def change_log(before: SymptomMatrix, after: SymptomMatrix) -> pd.DataFrame:
    """One row per cell that differs between ``before`` and ``after``, in record order."""
    rows, cols = np.nonzero(before.values != after.values)
    tokens_before = before.to_tokens()
    tokens_after = after.to_tokens()
    return pd.DataFrame(
        {
            "ID": [before.ids[i] for i in rows],
            "symptom": [before.symptoms[j] for j in cols],
            "before": tokens_before[rows, cols],
            "after": tokens_after[rows, cols],
        },
        columns=["ID", "symptom", "before", "after"],
    )


@add_to_report_log
def data_check(
    data: SymptomMatrix,
    hierarchy: SymptomHierarchy,
    policy: CheckPolicy = CheckPolicy(),
    passes: int = PASSES,
) -> Tuple[SymptomMatrix, pd.DataFrame]:
    """
    Make records consistent with ``hierarchy``.

    At least ``passes`` passes are made, then more until a pass changes
    nothing, so that checking the result again is a no-op. Returns the checked
    matrix and a change log listing every cell whose value differs from the
    input.
    """
    hierarchy.check_symptoms(data.symptoms)
    values = np.array(data.values, copy=True)
    neonate = _neonate_columns(data, hierarchy, policy)
    notask = _index(hierarchy.notask, data)
    anc = _index(hierarchy.anc, data)
    limit = passes + len(hierarchy.notask) + len(hierarchy.anc) + 1
    for done in range(1, limit + 1):
        before = values.copy()
        _clear_neonate_only(values, neonate)
        _one_pass(values, data, notask, anc, policy)
        if done >= passes and np.array_equal(before, values):
            break
    else:
        logger.warning(f"Data check did not settle after {limit} passes; the last pass still changed cells")
    logger.debug(f"Data check made {done} pass(es)")
    checked = data.with_values(values)
    log = change_log(data, checked)
    logger.info(
        f"Data check ({policy.variant}): {len(log)} cell(s) changed "
        f"in {log['ID'].nunique() if len(log) else 0} record(s)"
    )
    return checked, log
