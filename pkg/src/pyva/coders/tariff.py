"""
Tariff: symptom-cause scores turned into ranks against resampled reference
scores.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import joblib
import numpy as np
import pandas as pd

from ..consistency.impossible import remove_impossible_causes
from ..core.exceptions import (
    AlignmentError,
    ConfigurationError,
    InconsistencyError,
    ModelRequirementError,
)
from ..core.logging import logger
from ..model.dataset import ensure_codable
from ..model.types import CSMFEstimate, SymptomMatrix, SymptomValue
from .base import Coder, CodingResult
from .grades import cause_counts, labels_for, presence_shares

REFERENCES = ("cause", "pooled")


def tariff_matrix(counts: np.ndarray) -> np.ndarray:
    """
    C×S tariffs from C×S Yes counts: (n - median) / IQR per symptom over causes,
    quartiles by linear interpolation; symptoms with IQR 0 get tariff 0.
    """
    counts = np.asarray(counts, dtype=float)
    median = np.median(counts, axis=0)
    q75, q25 = np.percentile(counts, [75, 25], axis=0)
    iqr = q75 - q25
    flat = iqr == 0
    with np.errstate(invalid="ignore", divide="ignore"):
        tariffs = (counts - median) / np.where(flat, 1.0, iqr)
    tariffs[:, flat] = 0.0
    return tariffs


@dataclass(frozen=True)
class TariffModel:
    causes: Tuple[str, ...]
    symptoms: Tuple[str, ...]
    counts: np.ndarray
    tariffs: np.ndarray
    pools: Tuple[np.ndarray, ...]
    reference: str = "cause"

    def __post_init__(self):
        if any(len(pool) == 0 for pool in self.pools):
            raise ConfigurationError("Every cause needs a nonempty reference pool")
        if not np.isfinite(self.tariffs).all():
            raise ConfigurationError("Tariffs must be finite")

    def select_symptoms(self, symptoms) -> "TariffModel":
        idx = [self.symptoms.index(s) for s in symptoms]
        return TariffModel(
            self.causes,
            tuple(symptoms),
            self.counts[:, idx],
            self.tariffs[:, idx],
            self.pools,
            self.reference,
        )


def tariff_score_matrix(values: np.ndarray, tariffs: np.ndarray) -> np.ndarray:
    """N×C sums of tariffs over the Yes symptoms."""
    return (values == SymptomValue.YES).astype(float) @ tariffs.T


def tariff_score(record, model: TariffModel) -> np.ndarray:
    record = np.asarray(record).reshape(1, -1)
    return tariff_score_matrix(record, model.tariffs)[0]


def _cause_pool(k, values, members, tariffs, bootstrap, seed_seq, reference, all_members):
    rng = np.random.default_rng(seed_seq)
    if reference == "cause":
        sample = rng.choice(members, size=bootstrap, replace=True)
        return np.sort(tariff_score_matrix(values[sample], tariffs[[k]])[:, 0])
    # Uniform resample over every cause, scored on cause k.
    sample = np.concatenate(
        [rng.choice(m, size=bootstrap, replace=True) for m in all_members]
    )
    return np.sort(tariff_score_matrix(values[sample], tariffs[[k]])[:, 0])


def tariff_train(
    train: SymptomMatrix,
    labels,
    bootstrap: int = 100,
    seed: int = 1,
    reference: str = "cause",
    causes: Optional[Sequence[str]] = None,
    threads: int = 1,
) -> TariffModel:
    """
    Tariffs from Yes counts and reference pools of resampled training scores.

    Each cause draws ``bootstrap`` records with replacement from its own
    training records from a stream spawned off ``seed``, so results do not
    depend on ``threads``.
    """
    if bootstrap < 1:
        raise ConfigurationError(f"Bootstrap size must be at least 1, got {bootstrap}")
    if reference not in REFERENCES:
        raise ConfigurationError(
            f"Unknown reference {reference!r}, choose from {', '.join(REFERENCES)}"
        )
    labels = np.asarray(labels, dtype=object)
    causes, _ = cause_counts(labels, causes)
    yes = (train.values == SymptomValue.YES).astype(float)
    counts = np.stack([yes[labels == c].sum(axis=0) for c in causes])
    tariffs = tariff_matrix(counts)
    n_flat = int((tariffs == 0).all(axis=0).sum())
    if n_flat:
        logger.warning(f"{n_flat} symptom(s) have zero tariff for every cause")
    members = [np.flatnonzero(labels == c) for c in causes]
    streams = np.random.SeedSequence(seed).spawn(len(causes))
    pools = joblib.Parallel(n_jobs=threads, prefer="threads")(
        joblib.delayed(_cause_pool)(
            k, train.values, members[k], tariffs, bootstrap, streams[k], reference, members
        )
        for k in range(len(causes))
    )
    return TariffModel(causes, train.symptoms, counts, tariffs, tuple(pools), reference)


def tariff_rank(scores, model: TariffModel) -> np.ndarray:
    """
    Rank of each cause: (1 + number of pool scores strictly above the score)
    divided by the pool size. Lower is more likely.
    """
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    ranks = np.empty_like(scores)
    for k, pool in enumerate(model.pools):
        above = pool.size - np.searchsorted(pool, scores[:, k], side="right")
        ranks[:, k] = (1 + above) / pool.size
    return ranks


def tariff_assign(ranks: np.ndarray) -> np.ndarray:
    """Index of the best (smallest) rank per record; ties go to the earlier cause."""
    return np.argmin(ranks, axis=1)


def tariff_csmf(assignments, causes) -> CSMFEstimate:
    """Share of records whose best-ranked cause is each cause."""
    assignments = np.asarray(assignments)
    if not assignments.size:
        raise InconsistencyError("Cannot estimate CSMFs from zero deaths")
    if assignments.dtype.kind in "iu":
        idx = assignments
    else:
        idx = np.array([list(causes).index(a) for a in assignments])
    counts = np.bincount(idx, minlength=len(causes)).astype(float)
    return CSMFEstimate(tuple(causes), {CSMFEstimate.ALL: counts / counts.sum()})


class TariffCoder(Coder):
    """Options: ``bootstrap``, ``reference``, ``remove_impossible``."""

    requires_training = True

    def code(self, data: SymptomMatrix, train=None, train_labels=None, groups=None, **_) -> CodingResult:
        if train is None:
            raise ModelRequirementError("Tariff requires training data")
        ensure_codable(data)
        bootstrap = self.option("bootstrap", "tariff_bootstrap")
        reference = self.option("reference", "tariff_reference")
        shared = [s for s in data.symptoms if s in set(train.symptoms)]
        if not shared:
            raise AlignmentError("Data and training data share no symptoms")
        data, train = data.select(shared), train.select(shared)
        labels = labels_for(train, train_labels)
        model = tariff_train(
            train,
            labels,
            bootstrap,
            self.context.seed,
            reference,
            threads=self.context.threads,
        )
        if not data.n_records:
            raise InconsistencyError("No deaths to code")
        logger.info(
            f"Tariff: N={data.n_records} S={data.n_symptoms} C={len(model.causes)} "
            f"B={bootstrap} reference={reference}"
        )
        ranks = tariff_rank(tariff_score_matrix(data.values, model.tariffs), model)
        if self.options.get("remove_impossible", False):
            impossible = remove_impossible_causes(
                data,
                presence_shares(train, labels, model.causes),
                self.context.config("demographic_symptoms"),
            )
            ranks[~impossible.possible] = np.inf
            ranks[:, [c in impossible.removed for c in model.causes]] = np.inf
        assigned = tariff_assign(ranks)
        csmf = tariff_csmf(assigned, model.causes)
        if groups is not None:
            group_of = groups.reindex(list(data.ids)).to_numpy()
            csmf = CSMFEstimate(
                model.causes,
                {
                    str(g): tariff_csmf(assigned[group_of == g], model.causes)[CSMFEstimate.ALL]
                    for g in pd.unique(group_of)
                },
            )
        return CodingResult(
            model="tariff",
            ids=data.ids,
            causes=model.causes,
            csmf=csmf,
            ranks=ranks,
            groups=groups,
            options={"bootstrap": bootstrap, "reference": reference, "seed": self.context.seed},
        )
