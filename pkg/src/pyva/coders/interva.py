"""
InterVA: Bayes rule over letter-grade probabilities.

Only symptoms recorded as Yes contribute to the likelihood. After the
posterior, at most the top three causes keep their mass; the rest becomes
Undetermined.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from ..consistency.impossible import remove_impossible_causes
from ..core.exceptions import ConfigurationError, InconsistencyError, ModelRequirementError
from ..core.logging import logger
from ..model.dataset import align, ensure_codable
from ..model.types import (
    UNDETERMINED,
    CondProbMatrix,
    CSMFEstimate,
    IndivProbResult,
    PriorCSMF,
    SymptomMatrix,
    SymptomValue,
)
from .base import Coder, CodingResult, masked_log_prior, normalize_log, point_csmf
from .grades import (
    GradeTable,
    apply_prevalence,
    labels_for,
    load_prevalence_levels,
    load_prior,
    load_probbase,
    train_condprob,
)

VERSIONS = ("4.02", "4.03", "5")
LEVELS = ("h", "l", "v")
# Undetermined mass below this is rounding left over from the kept causes.
RESIDUE = 1e-12


@dataclass(frozen=True)
class IntervaConfig:
    hiv: str = "h"
    malaria: str = "h"
    version: str = "5"
    floor: float = 0.1
    ratio: float = 0.25
    top: int = 3

    def __post_init__(self):
        for name in ("hiv", "malaria"):
            if getattr(self, name) not in LEVELS:
                raise ConfigurationError(
                    f"{name} level must be one of {', '.join(LEVELS)}, got {getattr(self, name)!r}"
                )
        if str(self.version) not in VERSIONS:
            raise ConfigurationError(
                f"InterVA version must be one of {', '.join(VERSIONS)}, got {self.version!r}"
            )
        if not 0 <= self.floor <= 1 or not 0 <= self.ratio <= 1 or self.top < 1:
            raise ConfigurationError("Post-processing needs floor and ratio in [0, 1] and top >= 1")


def log_presence_likelihood(values: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """N×C sum of log P over the Yes symptoms of each record; -inf where some P is 0."""
    yes = (values == SymptomValue.YES).astype(float)
    with np.errstate(divide="ignore"):
        log_p = np.log(probs)
    finite = np.where(np.isfinite(log_p), log_p, 0.0)
    log_lik = yes @ finite
    log_lik[(yes @ (probs == 0)) > 0] = -np.inf
    return log_lik


def interva_posterior_matrix(
    data: SymptomMatrix,
    probs: CondProbMatrix,
    prior: PriorCSMF,
    possible: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Posterior of every record, computed in log space.

    Returns the N×C posterior and a flag per record whose evidence ruled out
    every cause; such records get the (masked) prior instead.
    """
    log_prior = masked_log_prior(prior.weights, data.n_records, possible)
    log_post = log_prior + log_presence_likelihood(data.values, probs.values)
    fallback = np.where(np.isfinite(log_prior), prior.weights, 0.0)
    fallback[fallback.sum(axis=1) == 0] = prior.weights
    return normalize_log(log_post, fallback)


def interva_posterior(record, probs: CondProbMatrix, prior: PriorCSMF):
    """
    Posterior over causes for one tri-state record (aligned to ``probs``).

    Returns ``(distribution, degenerate)``.
    """
    record = np.asarray(record, dtype=np.int8).reshape(1, -1)
    data = SymptomMatrix(("record",), probs.symptoms, record)
    post, degenerate = interva_posterior_matrix(data, probs, prior)
    return post[0], bool(degenerate[0])


def interva_postprocess(dist, config: IntervaConfig = IntervaConfig()) -> np.ndarray:
    """
    Keep at most ``config.top`` causes and move the rest of the mass to
    Undetermined (last entry of the returned vector).

    A cause is kept when its probability reaches ``config.floor`` and, below
    rank one, ``config.ratio`` times the probability of the cause kept before
    it.
    """
    dist = np.asarray(dist, dtype=float)
    out = np.zeros(dist.size + 1)
    previous = None
    for idx in np.argsort(-dist, kind="stable")[: config.top]:
        p = dist[idx]
        if p < config.floor or (previous is not None and p < config.ratio * previous):
            break
        out[idx] = p
        previous = p
    residue = 1.0 - out[:-1].sum()
    out[-1] = residue if residue > RESIDUE else 0.0
    return out / out.sum()


def interva_csmf(result: IndivProbResult, groups: Optional[pd.Series] = None) -> CSMFEstimate:
    """Mean of the post-processed distributions, Undetermined included."""
    return point_csmf(result, groups)


class InterVACoder(Coder):
    """
    Options: ``hiv``, ``malaria``, ``version``, ``convert_type``,
    ``interva_rule`` (apply post-processing), ``remove_impossible``.
    """

    def config(self) -> IntervaConfig:
        return IntervaConfig(
            hiv=self.options.get("hiv", "h"),
            malaria=self.options.get("malaria", "h"),
            version=str(self.options.get("version", "5")),
            floor=self.option("floor", "interva_floor"),
            ratio=self.option("ratio", "interva_ratio"),
            top=self.option("top", "interva_top"),
        )

    def probabilities(self, train=None, train_labels=None, probbase=None, grade_table=None):
        grade_table = grade_table or GradeTable.read(self.context.config("grade_table"))
        if probbase is not None:
            return load_probbase(probbase, grade_table)
        if train is not None:
            labels = labels_for(train, train_labels)
            return train_condprob(
                train, labels, grade_table, self.options.get("convert_type", "quantile")
            )
        raise ModelRequirementError(
            "InterVA requires training data (--train) or a probability table (--probbase)"
        )

    def prior(self, causes, prior_path=None):
        config = self.config()
        if prior_path is None:
            return PriorCSMF.uniform(causes)
        prior, groups = load_prior(prior_path)
        missing = sorted(set(causes) - set(prior.causes))
        if missing:
            raise ConfigurationError(f"Prior lacks cause(s): {', '.join(missing)}")
        prior = apply_prevalence(
            prior.select(causes),
            groups,
            config.hiv,
            config.malaria,
            load_prevalence_levels(self.context.config("prevalence_table")),
        )
        return prior

    def code(
        self,
        data: SymptomMatrix,
        train=None,
        train_labels=None,
        probbase=None,
        prior=None,
        groups=None,
        **_,
    ) -> CodingResult:
        ensure_codable(data)
        config = self.config()
        probs = self.probabilities(train, train_labels, probbase)
        aligned = align(data, probs)
        data, probs = aligned.data, aligned.probs
        prior_csmf = self.prior(probs.causes, prior)
        logger.info(
            f"InterVA {config.version}: N={data.n_records} S={data.n_symptoms} C={len(probs.causes)}"
        )
        if not data.n_records:
            raise InconsistencyError("No deaths to code")
        possible = None
        if self.options.get("remove_impossible", False):
            impossible = remove_impossible_causes(
                data, probs, self.context.config("demographic_symptoms")
            )
            possible = impossible.possible
            possible[:, [c in impossible.removed for c in probs.causes]] = False
        post, degenerate = interva_posterior_matrix(data, probs, prior_csmf, possible)
        if degenerate.any():
            logger.warning(
                f"{int(degenerate.sum())} death(s) with evidence against every cause; "
                "their posterior is the prior"
            )
        raw = IndivProbResult(data.ids, probs.causes, post)
        if self.options.get("interva_rule", True):
            processed = np.array([interva_postprocess(row, config) for row in post]).reshape(
                data.n_records, len(probs.causes) + 1
            )
            indiv = IndivProbResult(data.ids, probs.causes + (UNDETERMINED,), processed)
            undetermined = UNDETERMINED
        else:
            indiv, undetermined = raw, None
        return CodingResult(
            model="interva",
            ids=data.ids,
            causes=probs.causes,
            csmf=interva_csmf(indiv, groups),
            indiv=indiv,
            raw=raw if undetermined else None,
            undetermined=undetermined,
            groups=groups,
            diagnostics={"degenerate": [i for i, d in zip(data.ids, degenerate) if d]},
            options={
                "hiv": config.hiv,
                "malaria": config.malaria,
                "version": config.version,
                "floor": config.floor,
                "ratio": config.ratio,
                "top": config.top,
                "convert_type": self.options.get("convert_type", "quantile"),
                "probs": probs.provenance,
            },
        )
