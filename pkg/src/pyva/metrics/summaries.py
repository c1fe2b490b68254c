"""
Extraction of CSMFs, top causes and individual distributions from results.
"""

from typing import Dict, Union

import numpy as np
import pandas as pd

from ..coders.base import CodingResult, point_csmf
from ..core.exceptions import UnsupportedOperationError
from ..model.types import CSMFEstimate


def get_csmf(result: CodingResult, include_undetermined: bool = True) -> CSMFEstimate:
    """
    The CSMF of ``result``; a summary table per group for InSilicoVA.

    Without ``include_undetermined`` an InterVA result reports the CSMF of
    its distributions before post-processing, so no Undetermined entry
    exists.
    """
    csmf = result.csmf
    if include_undetermined or result.undetermined is None:
        return csmf
    if result.raw is not None:
        return point_csmf(result.raw, result.groups)
    keep = [i for i, c in enumerate(csmf.causes) if c != result.undetermined]
    causes = tuple(csmf.causes[i] for i in keep)
    return CSMFEstimate(
        causes, {g: v[keep] / v[keep].sum() for g, v in csmf.fractions.items()}
    )


def get_top_cod(result: CodingResult) -> pd.DataFrame:
    """
    Most likely cause per death with its probability (or its Tariff rank).

    Ties go to the cause listed first.
    """
    if result.indiv is not None:
        point = result.indiv.point
        best = np.argmax(point, axis=1)
        causes = np.asarray(result.indiv.causes, dtype=object)
        score = point[np.arange(len(best)), best]
    elif result.ranks is not None:
        ranks = np.asarray(result.ranks, dtype=float)
        best = np.argmin(ranks, axis=1)
        causes = np.asarray(result.causes, dtype=object)
        score = ranks[np.arange(len(best)), best]
    else:
        raise UnsupportedOperationError(f"{result.model} result has no per-death output")
    return pd.DataFrame({"ID": list(result.ids), "cause": causes[best], "score": score})


def get_indiv_prob(result: CodingResult) -> Union[pd.DataFrame, Dict[str, pd.DataFrame]]:
    """N×C distributions, or the mean/median/lower/upper tables of InSilicoVA."""
    if result.indiv is None:
        raise UnsupportedOperationError(
            f"{result.model} ranks causes and has no individual probabilities"
        )
    if result.indiv.quantiles is not None:
        return {name: result.indiv.to_frame(name) for name in result.indiv.QUANTILE_NAMES}
    return result.indiv.to_frame()


def summary_lines(result: CodingResult, top: int = 5, death=None):
    """Human-readable top-``top`` CSMFs, or top causes of one death."""
    lines = [f"{result.model} fit on {result.n_records} death(s)"]
    if death is not None:
        if result.indiv is None:
            raise UnsupportedOperationError(f"{result.model} has no per-death distributions")
        row = result.indiv.to_frame().loc[death].sort_values(ascending=False, kind="stable")
        lines.append(f"Top {top} causes of death {death}:")
        lines.extend(f"  {cause:<40} {value:.4f}" for cause, value in row.head(top).items())
        return lines
    csmf = result.csmf
    for group in csmf.groups:
        lines.append(f"Top {top} CSMFs ({group}):")
        if csmf.summary is not None:
            table = csmf.summary[group].sort_values("Mean", ascending=False, kind="stable").head(top)
            lines.append(f"  {'':<40} " + " ".join(f"{c:>10}" for c in table.columns))
            for cause, row in table.iterrows():
                lines.append(f"  {cause:<40} " + " ".join(f"{v:>10.4f}" for v in row))
        else:
            series = csmf.series(group).sort_values(ascending=False, kind="stable").head(top)
            lines.extend(f"  {cause:<40} {value:.4f}" for cause, value in series.items())
    return lines
