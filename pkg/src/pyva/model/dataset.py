"""
Dataset checks and alignment of data with probability tables.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..core.exceptions import AlignmentError, FormatError
from ..core.logging import logger
from .types import CondProbMatrix, SymptomMatrix, SymptomValue


@dataclass(frozen=True)
class Finding:
    kind: str
    items: Tuple[str, ...]

    def __str__(self):
        return f"{self.kind}: {', '.join(self.items)}"


@dataclass(frozen=True)
class ValidationReport:
    findings: Tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings

    def of_kind(self, kind) -> List[Finding]:
        return [f for f in self.findings if f.kind == kind]

    def __str__(self):
        if self.ok:
            return "no findings"
        return "\n".join(str(f) for f in self.findings)


DUPLICATE_IDS = "duplicate-ids"
ALL_MISSING_ROWS = "all-missing-rows"
ALL_MISSING_COLUMNS = "all-missing-columns"
SYMPTOM_COLLISIONS = "symptom-name-collisions"


def validate_dataset(data: SymptomMatrix) -> ValidationReport:
    """
    Report duplicate ids, records and symptoms that are Missing throughout, and
    symptom names that collide (exactly, or after case folding and stripping).
    Never raises and never changes ``data``.
    """
    findings = []
    dupes = sorted(i for i, n in Counter(data.ids).items() if n > 1)
    if dupes:
        findings.append(Finding(DUPLICATE_IDS, tuple(dupes)))
    if data.n_symptoms:
        missing = data.values == SymptomValue.MISSING
        rows = [data.ids[i] for i in np.flatnonzero(missing.all(axis=1))]
        if rows:
            findings.append(Finding(ALL_MISSING_ROWS, tuple(rows)))
        if data.n_records:
            cols = [data.symptoms[j] for j in np.flatnonzero(missing.all(axis=0))]
            if cols:
                findings.append(Finding(ALL_MISSING_COLUMNS, tuple(cols)))
    folded = Counter(s.strip().casefold() for s in data.symptoms)
    collisions = sorted(s for s in data.symptoms if folded[s.strip().casefold()] > 1)
    if collisions:
        findings.append(Finding(SYMPTOM_COLLISIONS, tuple(collisions)))
    return ValidationReport(tuple(findings))


def ensure_codable(data: SymptomMatrix):
    """Raise a :class:`FormatError` for problems no coder can work around."""
    report = validate_dataset(data)
    for kind in (DUPLICATE_IDS, SYMPTOM_COLLISIONS):
        for finding in report.of_kind(kind):
            if kind == SYMPTOM_COLLISIONS and len(set(finding.items)) == len(finding.items):
                # Case-only collisions are still distinct columns.
                logger.warning(f"Symptom names differ only by case: {', '.join(finding.items)}")
                continue
            raise FormatError(f"Cannot code data with {finding}")
    for finding in report.of_kind(ALL_MISSING_ROWS):
        logger.warning(f"{len(finding.items)} record(s) have no observed symptoms")
    return data


@dataclass(frozen=True)
class Alignment:
    data: SymptomMatrix
    probs: CondProbMatrix
    dropped_from_data: Tuple[str, ...] = field(default=())
    dropped_from_probs: Tuple[str, ...] = field(default=())


def _preview(names, limit=10):
    names = sorted(names)
    shown = ", ".join(names[:limit])
    return f"[{shown}, ... ({len(names)} total)]" if len(names) > limit else f"[{shown}]"


def align(data: SymptomMatrix, probs: CondProbMatrix) -> Alignment:
    """
    Restrict data and probabilities to their shared symptoms.

    The shared symptoms keep the order they have in ``data`` and rows keep
    their order, so aligning an aligned pair is the identity.
    """
    in_probs = set(probs.symptoms)
    shared = [s for s in data.symptoms if s in in_probs]
    if not shared:
        raise AlignmentError(
            "Data and probability table share no symptoms; "
            f"data has {_preview(data.symptoms)}, table has {_preview(probs.symptoms)}"
        )
    in_data = set(shared)
    dropped_data = tuple(s for s in data.symptoms if s not in in_data)
    dropped_probs = tuple(s for s in probs.symptoms if s not in in_data)
    if dropped_data:
        logger.info(f"Ignoring {len(dropped_data)} data symptom(s) without probabilities")
    if dropped_probs:
        logger.info(f"{len(dropped_probs)} table symptom(s) are not in the data")
    aligned_data = data if tuple(shared) == data.symptoms else data.select(shared)
    aligned_probs = probs if tuple(shared) == probs.symptoms else probs.select_symptoms(shared)
    return Alignment(aligned_data, aligned_probs, dropped_data, dropped_probs)
