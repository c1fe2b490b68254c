"""
Single-chain stationarity check for the retained CSMF draws.

Each chain is compared between its first 10% and last 50% (a Geweke-style z
score, with the Monte Carlo standard error of each window's mean taken from
arviz); the p-values are Bonferroni corrected over the chains.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

import arviz as az
import numpy as np
from scipy import stats

MIN_DRAWS = 50
FIRST = 0.1
LAST = 0.5
ALPHA = 0.01
# Windows flatter than this, relative to their level, are constant.
FLAT = 1e-12


def is_flat(window: np.ndarray) -> bool:
    window = np.asarray(window, dtype=float)
    return bool(np.ptp(window) <= FLAT * max(1.0, abs(window.mean())))


def window_mcse(window: np.ndarray) -> float:
    """Standard error of the mean of one window; 0 for a constant window."""
    window = np.asarray(window, dtype=float)
    if window.size < 4 or is_flat(window):
        return 0.0
    mcse = float(az.mcse(window, method="mean"))
    return mcse if np.isfinite(mcse) else 0.0


def geweke_z(chain: np.ndarray, first: float = FIRST, last: float = LAST) -> float:
    """z score of the mean difference between the start and the end of a chain."""
    chain = np.asarray(chain, dtype=float)
    n = chain.size
    a = chain[: max(1, int(np.floor(first * n)))]
    b = chain[n - max(1, int(np.floor(last * n))) :]
    diff = a.mean() - b.mean()
    if abs(diff) <= FLAT * max(1.0, abs(a.mean()), abs(b.mean())):
        return 0.0
    se = np.hypot(window_mcse(a), window_mcse(b))
    if se == 0:
        return np.copysign(np.inf, diff)
    return float(diff / se)


@dataclass
class ConvergenceReport:
    """
    ``passed`` is ``None`` when there were too few draws to judge.
    """

    passed: Optional[bool]
    n_draws: int
    alpha: float = ALPHA
    z_scores: Dict[str, float] = field(default_factory=dict)
    p_values: Dict[str, float] = field(default_factory=dict)
    failed: tuple = ()

    @property
    def inconclusive(self) -> bool:
        return self.passed is None

    def to_dict(self):
        return {
            "passed": self.passed,
            "inconclusive": self.inconclusive,
            "n_draws": self.n_draws,
            "alpha": self.alpha,
            "failed": list(self.failed),
            "z_scores": {k: float(v) for k, v in self.z_scores.items()},
            "p_values": {k: float(v) for k, v in self.p_values.items()},
        }


def chain_convergence(chains: Dict[str, np.ndarray], alpha: float = ALPHA) -> ConvergenceReport:
    """Stationarity verdict over named chains of equal length."""
    n_draws = min((len(c) for c in chains.values()), default=0)
    if n_draws < MIN_DRAWS:
        return ConvergenceReport(None, n_draws, alpha)
    z_scores, p_values = {}, {}
    for name, chain in chains.items():
        z = geweke_z(chain)
        z_scores[name] = z
        p_values[name] = 2 * stats.norm.sf(abs(z))
    threshold = alpha / max(1, len(chains))
    failed = tuple(name for name, p in p_values.items() if p < threshold)
    return ConvergenceReport(not failed, n_draws, alpha, z_scores, p_values, failed)


def insilico_convergence(sample, alpha: float = ALPHA) -> ConvergenceReport:
    """Check the retained CSMF draws of every group and cause of ``sample``."""
    draws = sample.pi_draws
    chains = {}
    for group in draws.coords["group"].values:
        for cause in sample.active_causes:
            chain = draws.sel(group=group, cause=cause).values
            chains[f"{group}/{cause}" if len(draws.coords["group"]) > 1 else str(cause)] = chain
    return chain_convergence(chains, alpha)
