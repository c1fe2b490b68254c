"""
CSMF accuracy against a known cause distribution.
"""

from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ..core.exceptions import AlignmentError, ConfigurationError, FormatError
from ..core.logging import logger

UNDETERMINED_MODES = ("drop", "uniform")


def truth_csmf(labels, causes: Sequence[str]) -> pd.Series:
    """Empirical cause fractions of ``labels``; causes without deaths get 0."""
    labels = pd.Series(labels).astype(str)
    if not len(labels):
        raise FormatError("Cannot compute a CSMF from zero labels")
    unknown = sorted(set(labels) - set(causes))
    if unknown:
        raise AlignmentError(f"True causes not in the cause list: {', '.join(unknown)}")
    counts = labels.value_counts().reindex(list(causes), fill_value=0)
    return (counts / counts.sum()).astype(float)


def resolve_undetermined(est: pd.Series, undetermined: Optional[str], mode: str = "drop") -> pd.Series:
    """
    Remove the ``undetermined`` entry from ``est``.

    ``drop`` renormalizes the remaining mass, which is the same as handing the
    undetermined mass out in proportion; ``uniform`` spreads it evenly.
    """
    if mode not in UNDETERMINED_MODES:
        raise ConfigurationError(
            f"Unknown undetermined mode {mode!r}, choose from {', '.join(UNDETERMINED_MODES)}"
        )
    if undetermined is None or undetermined not in est.index:
        return est
    mass = float(est[undetermined])
    rest = est.drop(undetermined).astype(float)
    if mode == "uniform" or rest.sum() <= 0:
        if mode == "drop":
            logger.warning("All mass is undetermined; spreading it evenly")
        return rest + mass / len(rest)
    return rest / rest.sum()


def csmf_accuracy(est, truth, undetermined: Optional[str] = None, mode: str = "drop") -> float:
    """
    ``1 - sum |est - truth| / (2 (1 - min truth))``.

    Both arguments are Series indexed by cause (plain vectors are taken to
    share one cause order). The result lies in [0, 1] and is 1 only for
    identical distributions, including a one-cause truth.
    """
    est = est if isinstance(est, pd.Series) else pd.Series(np.asarray(est, dtype=float))
    truth = truth if isinstance(truth, pd.Series) else pd.Series(np.asarray(truth, dtype=float))
    est = resolve_undetermined(est.astype(float), undetermined, mode)
    if set(est.index) != set(truth.index) or len(est) != len(truth):
        extra = sorted(map(str, set(est.index) ^ set(truth.index)))
        raise AlignmentError(f"Estimated and true CSMFs cover different causes: {', '.join(extra)}")
    truth = truth.astype(float)
    if not np.isclose(truth.sum(), 1.0, rtol=0, atol=1e-9):
        raise FormatError(f"True CSMF sums to {truth.sum():.12g}, not 1")
    est = est.reindex(truth.index)
    error = np.abs(est.to_numpy() - truth.to_numpy()).sum()
    worst = 2.0 * (1.0 - truth.min())
    if worst <= 1e-12:
        # A single cause: the only estimate summing to 1 is the truth itself.
        return 1.0 if np.isclose(error, 0.0, rtol=0, atol=1e-12) else 0.0
    accuracy = 1.0 - error / worst
    return float(min(1.0, max(0.0, accuracy)))
