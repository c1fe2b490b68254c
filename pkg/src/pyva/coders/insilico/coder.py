"""
InSilicoVA as a :class:`~pyva.coders.base.Coder`.
"""

import numpy as np
import pandas as pd

from ...consistency.impossible import remove_impossible_causes
from ...core.exceptions import ModelRequirementError
from ...core.logging import logger
from ...model.dataset import align, ensure_codable
from ...model.types import SymptomMatrix
from ..base import Coder, CodingResult
from ..grades import GradeTable, labels_for, load_probbase, train_condprob
from ..physician import EXTERNAL, DebiasResult, external_causes, map_to_causes, read_cause_categories
from .sampler import InsilicoConfig, insilico_fit
from .summary import insilico_csmf, insilico_indiv_summary


def physician_prior(data, causes, debias, mapping, external=EXTERNAL, threshold=0.5):
    """
    Per-death weights over ``causes`` and the external-cause restriction.

    Deaths absent from ``debias`` get uniform weights. Deaths whose External
    mass reaches ``threshold`` may only die of an external cause.
    """
    weights = map_to_causes(debias, mapping, causes).reindex(list(data.ids))
    uncoded = weights.isna().all(axis=1)
    weights = weights.fillna(1.0 / len(causes)).to_numpy()
    restrict = np.ones((data.n_records, len(causes)), dtype=bool)
    if external in debias.categories:
        ext = external_causes(mapping, external)
        mass = (
            pd.Series(debias.probs[:, debias.categories.index(external)], index=list(debias.ids))
            .reindex(list(data.ids))
            .fillna(0.0)
            .to_numpy()
        )
        forced = mass >= threshold
        if forced.any() and ext:
            restrict[forced] = np.isin(causes, ext)
            logger.info(f"{int(forced.sum())} death(s) restricted to external causes")
    if uncoded.any():
        logger.debug(f"{int(uncoded.sum())} death(s) without physician codes")
    return weights, restrict


class InSilicoCoder(Coder):
    """
    Options: ``nsim``, ``thin``, ``burnin_fraction``, ``auto_length``,
    ``indiv_ci``, ``convert_type``, ``reestimate_levels``,
    ``remove_impossible`` (on by default), ``phy_debias``, ``phy_cat``,
    ``phy_external``, ``keep_draws``.
    """

    def config(self) -> InsilicoConfig:
        return InsilicoConfig.from_context(
            self.context,
            nsim=self.options.get("nsim"),
            thin=self.options.get("thin"),
            burnin_fraction=self.options.get("burnin_fraction"),
            auto_length=self.options.get("auto_length"),
            ci=self.options.get("indiv_ci"),
            reestimate_levels=self.options.get("reestimate_levels"),
        )

    def probabilities(self, train=None, train_labels=None, probbase=None):
        grade_table = GradeTable.read(self.context.config("grade_table"))
        if probbase is not None:
            return load_probbase(probbase, grade_table)
        if train is not None:
            return train_condprob(
                train,
                labels_for(train, train_labels),
                grade_table,
                self.options.get("convert_type", "quantile"),
            )
        raise ModelRequirementError(
            "InSilicoVA requires training data (--train) or a probability table (--probbase)"
        )

    def code(
        self, data: SymptomMatrix, train=None, train_labels=None, probbase=None, groups=None, **_
    ) -> CodingResult:
        ensure_codable(data)
        config = self.config()
        aligned = align(data, self.probabilities(train, train_labels, probbase))
        data, probs = aligned.data, aligned.probs
        possible = np.ones((data.n_records, len(probs.causes)), dtype=bool)
        if self.options.get("remove_impossible", True):
            impossible = remove_impossible_causes(
                data, probs, self.context.config("demographic_symptoms")
            )
            possible = impossible.possible
            possible[:, [c in impossible.removed for c in probs.causes]] = False
        weights = None
        debias = self.options.get("phy_debias")
        if debias is not None:
            if not isinstance(debias, DebiasResult):
                debias = DebiasResult.read(debias)
            mapping = self.options.get("phy_cat")
            if mapping is None:
                raise ModelRequirementError("Physician priors need a cause-category mapping (--phy-cat)")
            if not isinstance(mapping, pd.Series):
                mapping = read_cause_categories(mapping)
            weights, restrict = physician_prior(
                data,
                probs.causes,
                debias,
                mapping,
                self.options.get("phy_external", EXTERNAL),
                self.context.config("physician_external_threshold"),
            )
            restricted = possible & restrict
            # Keep the unrestricted mask where the restriction rules out everything.
            possible = np.where(restricted.any(axis=1, keepdims=True), restricted, possible)
        labels = None if groups is None else groups.reindex(list(data.ids)).astype(str).to_numpy()
        sample = insilico_fit(data, probs, config, labels, weights, possible)
        indiv = insilico_indiv_summary(sample, config.ci)
        diagnostics = {
            "convergence": sample.convergence.to_dict(),
            "doublings": sample.doublings,
            "nsim": sample.config.nsim,
            "n_draws": sample.n_draws,
            "dropped_symptoms": list(sample.dropped_symptoms),
            "acceptance": {
                group: dict(zip(sample.active_causes, map(float, sample.acceptance[g])))
                for g, group in enumerate(sample.groups)
            },
        }
        if sample.level_draws is not None:
            diagnostics["levels"] = {
                str(grade): float(value)
                for grade, value in zip(
                    sample.level_draws.coords["grade"].values, sample.level_draws.mean("draw").values
                )
            }
        return CodingResult(
            model="insilico",
            ids=data.ids,
            causes=probs.causes,
            csmf=insilico_csmf(sample, config.ci),
            indiv=indiv,
            groups=None if groups is None else sample.group_labels(),
            draws=sample.to_frame() if self.options.get("keep_draws", True) else None,
            diagnostics=diagnostics,
            options={
                "nsim": config.nsim,
                "thin": config.thin,
                "burnin": config.burnin,
                "auto_length": config.auto_length,
                "indiv_ci": config.ci,
                "seed": config.seed,
                "reestimate_levels": bool(sample.level_draws is not None),
                "probs": probs.provenance,
                "physician_prior": debias is not None,
            },
        )
