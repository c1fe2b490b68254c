"""
Naive Bayes classifier with presence and absence terms.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..consistency.impossible import remove_impossible_causes
from ..core.exceptions import ConfigurationError, InconsistencyError, ModelRequirementError
from ..core.logging import logger
from ..model.dataset import align, ensure_codable
from ..model.types import CondProbMatrix, CSMFEstimate, IndivProbResult, PriorCSMF, SymptomMatrix, SymptomValue
from .base import Coder, CodingResult, masked_log_prior, normalize_log, point_csmf
from .grades import cause_counts, labels_for, presence_shares, symptom_counts
from .interva import log_presence_likelihood


@dataclass(frozen=True)
class NbcModel:
    probs: CondProbMatrix
    prior: PriorCSMF
    alpha: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigurationError(f"Smoothing pseudo-count must be positive, got {self.alpha}")
        values = self.probs.values
        if ((values <= 0) | (values >= 1)).any():
            raise ConfigurationError("Smoothed probabilities must lie strictly inside (0, 1)")

    @property
    def causes(self) -> Tuple[str, ...]:
        return self.probs.causes


def nbc_train(
    train: SymptomMatrix,
    labels,
    alpha: float = 1.0,
    uniform_prior: bool = False,
    causes: Optional[Sequence[str]] = None,
) -> NbcModel:
    """
    P(s = Yes | c) = (Yes count + alpha) / (non-missing count + 2 alpha); the
    prior is the smoothed cause frequency (count + alpha) / (N + C alpha), or
    uniform.
    """
    if not alpha > 0:
        raise ConfigurationError(f"Smoothing pseudo-count must be positive, got {alpha}")
    causes, counts = cause_counts(labels, causes)
    yes, observed = symptom_counts(train, labels, causes)
    probs = CondProbMatrix(
        train.symptoms, causes, (yes + alpha) / (observed + 2 * alpha), provenance="trained"
    )
    if uniform_prior:
        prior = PriorCSMF.uniform(causes)
    else:
        prior = PriorCSMF(causes, (counts + alpha) / (counts.sum() + len(causes) * alpha))
    return NbcModel(probs, prior, alpha)


def log_nbc_likelihood(values, probs, skip_missing=False):
    """Presence term for Yes; absence term for everything else, or only for No with ``skip_missing``."""
    absent = values == SymptomValue.NO if skip_missing else values != SymptomValue.YES
    return log_presence_likelihood(values, probs) + absent.astype(float) @ np.log1p(-probs)


def nbc_posterior_matrix(data: SymptomMatrix, model: NbcModel, possible=None, skip_missing=False):
    log_prior = masked_log_prior(model.prior.weights, data.n_records, possible)
    log_post = log_prior + log_nbc_likelihood(data.values, model.probs.values, skip_missing)
    fallback = np.broadcast_to(model.prior.weights, log_post.shape).copy()
    post, _ = normalize_log(log_post, fallback)
    return post


def nbc_posterior(record, model: NbcModel, skip_missing: bool = False) -> np.ndarray:
    """
    Posterior for one record aligned to the model. Missing counts as absent
    unless ``skip_missing`` (not the canonical behaviour) drops it.
    """
    record = np.asarray(record, dtype=np.int8).reshape(1, -1)
    data = SymptomMatrix(("record",), model.probs.symptoms, record)
    return nbc_posterior_matrix(data, model, skip_missing=skip_missing)[0]


def nbc_csmf(result: IndivProbResult, groups: Optional[pd.Series] = None) -> CSMFEstimate:
    return point_csmf(result, groups)


class NBCCoder(Coder):
    """Options: ``alpha``, ``uniform_prior``, ``skip_missing``, ``remove_impossible``."""

    requires_training = True

    def code(self, data: SymptomMatrix, train=None, train_labels=None, groups=None, **_) -> CodingResult:
        if train is None:
            raise ModelRequirementError("NBC requires training data (--train)")
        ensure_codable(data)
        alpha = self.option("alpha", "nbc_alpha")
        labels = labels_for(train, train_labels)
        model = nbc_train(train, labels, alpha, self.options.get("uniform_prior", False))
        aligned = align(data, model.probs)
        data = aligned.data
        model = NbcModel(aligned.probs, model.prior, alpha)
        if not data.n_records:
            raise InconsistencyError("No deaths to code")
        logger.info(f"NBC: N={data.n_records} S={data.n_symptoms} C={len(model.causes)} alpha={alpha}")
        possible = None
        if self.options.get("remove_impossible", False):
            # Smoothed probabilities are never zero; rule causes out on the raw shares.
            impossible = remove_impossible_causes(
                data,
                presence_shares(train, labels, model.causes),
                self.context.config("demographic_symptoms"),
            )
            possible = impossible.possible
            possible[:, [c in impossible.removed for c in model.causes]] = False
        skip_missing = self.options.get("skip_missing", False)
        if skip_missing:
            logger.warning("Skipping Missing symptoms instead of treating them as absent")
        post = nbc_posterior_matrix(data, model, possible, skip_missing)
        indiv = IndivProbResult(data.ids, model.causes, post)
        return CodingResult(
            model="nbc",
            ids=data.ids,
            causes=model.causes,
            csmf=nbc_csmf(indiv, groups),
            indiv=indiv,
            groups=groups,
            options={
                "alpha": alpha,
                "uniform_prior": bool(self.options.get("uniform_prior", False)),
                "skip_missing": bool(skip_missing),
            },
        )
