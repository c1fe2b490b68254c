"""
Posterior summaries of an InSilicoVA chain.
"""

from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ...core.exceptions import ConfigurationError, FormatError
from ...model.types import SUMMARY_COLUMNS, CSMFEstimate, IndivProbResult, SymptomMatrix
from .sampler import InsilicoConfig, PosteriorSample, insilico_fit

CHUNK = 256


def _bounds(ci):
    if not 0 < ci < 1:
        raise ConfigurationError(f"The credible level must lie in (0, 1), got {ci}")
    return (1 - ci) / 2, 1 - (1 - ci) / 2


def insilico_indiv_summary(sample: PosteriorSample, ci: Optional[float] = None) -> IndivProbResult:
    """
    Mean, median and the ``ci`` credible interval of every death's cause
    distribution, recomputed from the retained draws.
    """
    ci = sample.config.ci if ci is None else ci
    lower_q, upper_q = _bounds(ci)
    n, c = len(sample.ids), len(sample.causes)
    stats = {name: np.zeros((n, c)) for name in IndivProbResult.QUANTILE_NAMES}
    columns = sample.active_index
    for start in range(0, n, CHUNK):
        rows = slice(start, min(start + CHUNK, n))
        draws = sample.indiv_draws(rows)
        lower, median, upper = np.quantile(draws, [lower_q, 0.5, upper_q], axis=0)
        for name, value in (
            ("mean", draws.mean(axis=0)),
            ("median", median),
            ("lower", lower),
            ("upper", upper),
        ):
            # rows is a slice, so this writes through the view.
            stats[name][rows][:, columns] = value
    point = stats["mean"] / stats["mean"].sum(axis=1, keepdims=True)
    return IndivProbResult(sample.ids, sample.causes, point, stats, ci)


def insilico_csmf(sample: PosteriorSample, ci: Optional[float] = None) -> CSMFEstimate:
    """Per-group CSMF with Mean, Std.Error, Lower, Median and Upper per cause."""
    ci = sample.config.ci if ci is None else ci
    lower_q, upper_q = _bounds(ci)
    fractions, summary = {}, {}
    for group in sample.groups:
        draws = sample.pi_draws.sel(group=group).values
        lower, median, upper = np.quantile(draws, [lower_q, 0.5, upper_q], axis=0)
        mean = draws.mean(axis=0)
        stderr = draws.std(axis=0, ddof=1) if draws.shape[0] > 1 else np.zeros_like(mean)
        summary[group] = pd.DataFrame(
            np.column_stack([mean, stderr, lower, median, upper]),
            index=pd.Index(sample.causes, name="cause"),
            columns=list(SUMMARY_COLUMNS),
        )
        fractions[group] = mean / mean.sum()
    return CSMFEstimate(sample.causes, fractions, summary)


def subpop_labels(extras: pd.DataFrame, columns: Sequence[str], declared: Optional[Sequence[str]] = None) -> pd.Series:
    """
    Sub-population label of every death: its values in ``columns`` joined by a
    space, e.g. ``"Women 60-"``.

    Raises
    ------
    ConfigurationError
        When a column is absent, a value is empty, or a ``declared`` label has
        no deaths.
    """
    columns = list(columns)
    absent = [c for c in columns if c not in extras.columns]
    if absent:
        raise ConfigurationError(f"Sub-population column(s) not found: {', '.join(absent)}")
    values = extras[columns].astype(str).apply(lambda col: col.str.strip())
    blank = values.eq("").any(axis=1)
    if blank.any():
        raise ConfigurationError(
            f"{int(blank.sum())} death(s) have an empty sub-population value, "
            f"e.g. {list(values.index[blank][:5])}"
        )
    labels = values.apply(" ".join, axis=1).rename("group")
    if declared is not None:
        present = set(labels)
        for label in declared:
            if label not in present:
                raise ConfigurationError(f"Sub-population {label!r} has no deaths")
        unknown = sorted(present - set(declared))
        if unknown:
            raise FormatError(f"Undeclared sub-population(s): {', '.join(unknown)}")
    return labels


def insilico_subpop(
    data: SymptomMatrix,
    probs,
    extras: pd.DataFrame,
    columns: Sequence[str],
    config: InsilicoConfig = InsilicoConfig(),
    declared: Optional[Sequence[str]] = None,
    **kwargs,
) -> PosteriorSample:
    """One CSMF per sub-population, sharing probabilities and hyperpriors."""
    labels = subpop_labels(extras, columns, declared).reindex(list(data.ids))
    return insilico_fit(data, probs, config, groups=labels.to_numpy(), **kwargs)
