"""
Metropolis-within-Gibbs sampler of the InSilicoVA hierarchical model.

One sweep updates, in this order:

1. every death's cause ``y_i`` from its full conditional,
2. each group's log-fractions ``theta`` by componentwise random-walk
   Metropolis-Hastings (proposal scales tuned during burn-in, frozen after),
3. the hyperparameters ``mu`` (Normal) and ``sigma2`` (inverse gamma),
4. optionally the probability of every letter grade, from a Beta
   distribution truncated by the neighbouring grades.

The likelihood of a death uses P for Yes and 1 - P for No; Missing symptoms
contribute nothing.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import xarray as xr
from scipy import special

from ...core.exceptions import ConfigurationError, InconsistencyError
from ...core.logging import logger
from ...model.types import CondProbMatrix, SymptomMatrix

PROB_CLIP = 1e-10
ALL = "All"


@dataclass(frozen=True)
class InsilicoConfig:
    nsim: int = 10000
    burnin_fraction: float = 0.5
    thin: int = 20
    auto_length: bool = False
    max_doublings: int = 3
    ci: float = 0.95
    seed: int = 1
    subpop: Tuple[str, ...] = ()
    mu_mean: float = 0.0
    mu_var: float = 100.0
    sigma_shape: float = 0.001
    sigma_scale: float = 0.001
    proposal_scale: float = 1.0
    target_acceptance: float = 0.35
    reestimate_levels: bool = True
    adapt_every: int = 50

    def __post_init__(self):
        if self.thin < 1:
            raise ConfigurationError(f"Thinning must be at least 1, got {self.thin}")
        if not 0 <= self.burnin_fraction < 1:
            raise ConfigurationError("The burn-in fraction must lie in [0, 1)")
        if self.nsim - self.burnin < self.thin:
            raise ConfigurationError(
                f"Nsim={self.nsim} with burn-in {self.burnin} retains no draw at thinning {self.thin}"
            )
        if not 0 < self.ci < 1:
            raise ConfigurationError(f"The credible level must lie in (0, 1), got {self.ci}")
        if self.mu_var <= 0 or self.sigma_shape <= 0 or self.sigma_scale <= 0:
            raise ConfigurationError("Hyperprior variance, shape and scale must be positive")
        if self.proposal_scale <= 0 or not 0 < self.target_acceptance < 1:
            raise ConfigurationError("Proposal scale must be positive, target acceptance in (0, 1)")
        object.__setattr__(self, "subpop", tuple(self.subpop))

    @property
    def burnin(self) -> int:
        return int(self.nsim * self.burnin_fraction)

    @property
    def n_draws(self) -> int:
        return (self.nsim - self.burnin) // self.thin

    def doubled(self) -> "InsilicoConfig":
        return replace(self, nsim=2 * self.nsim)

    @classmethod
    def from_context(cls, context, **overrides):
        """Defaults from the run configuration, ``None`` overrides ignored."""
        values = dict(
            nsim=context.config("insilico_nsim"),
            burnin_fraction=context.config("insilico_burnin_fraction"),
            thin=context.config("insilico_thin"),
            max_doublings=context.config("insilico_max_doublings"),
            seed=context.seed,
            mu_mean=context.config("insilico_mu_mean"),
            mu_var=context.config("insilico_mu_var"),
            sigma_shape=context.config("insilico_sigma_shape"),
            sigma_scale=context.config("insilico_sigma_scale"),
            proposal_scale=context.config("insilico_proposal_scale"),
            target_acceptance=context.config("insilico_target_acceptance"),
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class LikelihoodModel:
    """
    Everything the per-death likelihood needs.

    With ``grade_index`` set, P is ``levels[grade_index]`` and the levels can
    be re-estimated; otherwise ``probs`` is used as is.
    """

    yes: np.ndarray
    no: np.ndarray
    probs: np.ndarray
    grade_index: Optional[np.ndarray] = None
    level_labels: Tuple[str, ...] = ()
    level_values: Optional[np.ndarray] = None

    @classmethod
    def build(cls, data: SymptomMatrix, probs: CondProbMatrix, reestimate=True):
        yes = data.yes().astype(float)
        no = data.no().astype(float)
        if not reestimate or probs.grades is None or any(g is None for g in probs.grades.ravel()):
            if reestimate and probs.grades is None:
                logger.debug("Probabilities carry no grades; level re-estimation is off")
            return cls(yes, no, np.asarray(probs.values, dtype=float))
        labels = probs.grades.astype(str)
        value_of = {}
        for label, value in zip(labels.ravel(), probs.values.ravel()):
            value_of.setdefault(label, float(value))
        ordered = sorted(value_of, key=lambda g: -value_of[g])
        values = np.array([value_of[g] for g in ordered])
        if len(set(values)) != len(values):
            raise ConfigurationError("Distinct grades must have distinct probabilities")
        position = {g: i for i, g in enumerate(ordered)}
        index = np.vectorize(position.__getitem__, otypes=[int])(labels) if labels.size else np.zeros(labels.shape, dtype=int)
        return cls(yes, no, np.asarray(probs.values, dtype=float), index, tuple(ordered), values)

    @property
    def reestimates(self) -> bool:
        return self.grade_index is not None

    def condprob(self, levels=None) -> np.ndarray:
        if self.grade_index is None or levels is None:
            return self.probs
        return np.asarray(levels)[self.grade_index]

    def log_likelihood(self, levels=None, rows=slice(None)) -> np.ndarray:
        """N×C log likelihood of the deaths in ``rows``."""
        p = np.clip(self.condprob(levels), PROB_CLIP, 1 - PROB_CLIP)
        return self.yes[rows] @ np.log(p) + self.no[rows] @ np.log1p(-p)


@dataclass
class McmcState:
    theta: np.ndarray
    y: np.ndarray
    mu: float
    sigma2: float
    levels: Optional[np.ndarray] = None

    @property
    def pi(self) -> np.ndarray:
        return softmax_rows(self.theta)


def softmax_rows(theta):
    theta = np.atleast_2d(theta)
    weights = np.exp(theta - theta.max(axis=1, keepdims=True))
    return weights / weights.sum(axis=1, keepdims=True)


def _logsumexp_rows(theta):
    top = theta.max(axis=1)
    return top + np.log(np.exp(theta - top[:, None]).sum(axis=1))


@dataclass
class PosteriorSample:
    """
    Retained draws of one chain.

    ``pi_draws`` runs over (draw, group, cause) and covers every cause of the
    probability table; causes impossible for the whole population are zero
    in every draw. ``log_extra`` (deaths × active causes) holds the log of the
    per-death prior weights, ``-inf`` for impossible causes.
    """

    ids: Tuple[str, ...]
    causes: Tuple[str, ...]
    active_causes: Tuple[str, ...]
    groups: Tuple[str, ...]
    record_groups: np.ndarray
    pi_draws: xr.DataArray
    level_draws: Optional[xr.DataArray]
    acceptance: np.ndarray
    scales: np.ndarray
    likelihood: LikelihoodModel
    log_extra: np.ndarray
    config: InsilicoConfig
    dropped_symptoms: Tuple[str, ...] = ()
    convergence: Optional[object] = field(default=None, compare=False)
    doublings: int = 0

    @property
    def n_draws(self) -> int:
        return self.pi_draws.sizes["draw"]

    @property
    def active_index(self):
        return [self.causes.index(c) for c in self.active_causes]

    def group_labels(self) -> pd.Series:
        return pd.Series(
            np.asarray(self.groups, dtype=object)[self.record_groups],
            index=pd.Index(self.ids, name="ID"),
            name="group",
        )

    def indiv_draws(self, rows=slice(None)) -> np.ndarray:
        """draws × deaths × active causes of individual cause distributions."""
        active = self.pi_draws.sel(cause=list(self.active_causes)).values
        record_groups = self.record_groups[rows]
        extra = self.log_extra[rows]
        fixed = None if self.level_draws is not None else self.likelihood.log_likelihood(rows=rows)
        out = np.empty((self.n_draws, extra.shape[0], len(self.active_causes)))
        with np.errstate(divide="ignore"):
            log_pi = np.log(active)
        for d in range(self.n_draws):
            log_lik = fixed
            if log_lik is None:
                log_lik = self.likelihood.log_likelihood(self.level_draws.values[d], rows=rows)
            logits = log_pi[d][record_groups] + extra + log_lik
            out[d] = softmax_rows(logits)
        return out

    def to_frame(self) -> pd.DataFrame:
        """Draws table: one row per (draw, group), one column per cause, then levels."""
        frame = self.pi_draws.to_dataframe(name="pi")["pi"].unstack("cause")
        frame = frame.reindex(columns=list(self.causes)).reset_index()
        if self.level_draws is not None:
            levels = self.level_draws.to_pandas()
            levels.columns = [f"level:{c}" for c in levels.columns]
            frame = frame.merge(levels, left_on="draw", right_index=True, how="left")
        return frame


def _validate_inputs(data, probs, groups, prior_weights, possible):
    n, c = data.n_records, len(probs.causes)
    if not n:
        raise InconsistencyError("InSilicoVA needs at least one death")
    if tuple(data.symptoms) != tuple(probs.symptoms):
        raise ConfigurationError("Data and probabilities must be aligned before sampling")
    if groups is not None and len(groups) != n:
        raise ConfigurationError(f"{len(groups)} group labels for {n} deaths")
    if prior_weights is not None and np.shape(prior_weights) != (n, c):
        raise ConfigurationError(f"Per-death prior must be {n}×{c}, got {np.shape(prior_weights)}")
    if possible is not None and np.shape(possible) != (n, c):
        raise ConfigurationError(f"Cause mask must be {n}×{c}, got {np.shape(possible)}")


def _log_extra(n, c, prior_weights, possible):
    log_extra = np.zeros((n, c))
    mask = np.ones((n, c), dtype=bool) if possible is None else np.asarray(possible, dtype=bool)
    if prior_weights is not None:
        weights = np.asarray(prior_weights, dtype=float)
        with np.errstate(divide="ignore"):
            log_w = np.log(weights)
        usable = (np.isfinite(log_w) & mask).any(axis=1)
        if (~usable).any():
            logger.warning(
                f"{int((~usable).sum())} death(s) have no prior mass on a possible cause; "
                "their physician prior is ignored"
            )
        log_extra[usable] = log_w[usable]
    log_extra[~mask] = -np.inf
    return log_extra


class _Sampler:
    """One chain over the active causes."""

    def __init__(self, likelihood, log_extra, record_groups, n_groups, config: InsilicoConfig):
        self.lik = likelihood
        self.log_extra = log_extra
        self.record_groups = record_groups
        self.n_groups = n_groups
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.n_causes = log_extra.shape[1]
        self.group_sizes = np.bincount(record_groups, minlength=n_groups)
        self.scales = np.full((n_groups, self.n_causes), config.proposal_scale)
        self.accepted = np.zeros((n_groups, self.n_causes))
        self.log_lik = likelihood.log_likelihood(likelihood.level_values)
        if likelihood.reestimates:
            values = likelihood.level_values
            self.free = np.flatnonzero((values > 0) & (values < 1))
        else:
            self.free = np.zeros(0, dtype=int)

    def initial_state(self):
        theta = np.zeros((self.n_groups, self.n_causes))
        levels = None if not self.lik.reestimates else self.lik.level_values.copy()
        state = McmcState(theta, np.zeros(len(self.record_groups), dtype=int), self.config.mu_mean, 1.0, levels)
        self.update_y(state)
        return state

    def update_y(self, state):
        log_pi = state.theta - _logsumexp_rows(state.theta)[:, None]
        logits = log_pi[self.record_groups] + self.log_extra + self.log_lik
        weights = np.exp(logits - logits.max(axis=1, keepdims=True))
        cumulative = np.cumsum(weights, axis=1)
        u = (1.0 - self.rng.random(len(state.y))) * cumulative[:, -1]
        state.y = np.minimum((cumulative < u[:, None]).sum(axis=1), self.n_causes - 1)

    def update_theta(self, state):
        counts = np.zeros((self.n_groups, self.n_causes))
        np.add.at(counts, (self.record_groups, state.y), 1.0)
        theta = state.theta
        sizes = self.group_sizes
        lse = _logsumexp_rows(theta)
        for k in range(self.n_causes):
            proposal = theta.copy()
            proposal[:, k] = theta[:, k] + self.scales[:, k] * self.rng.standard_normal(self.n_groups)
            new_lse = _logsumexp_rows(proposal)
            log_ratio = (
                counts[:, k] * (proposal[:, k] - theta[:, k])
                - sizes * (new_lse - lse)
                - ((proposal[:, k] - state.mu) ** 2 - (theta[:, k] - state.mu) ** 2) / (2 * state.sigma2)
            )
            accept = np.log(1.0 - self.rng.random(self.n_groups)) < log_ratio
            theta[accept, k] = proposal[accept, k]
            lse = np.where(accept, new_lse, lse)
            self.accepted[:, k] += accept

    def update_hyper(self, state):
        config = self.config
        values = state.theta.ravel()
        n = values.size
        var = 1.0 / (1.0 / config.mu_var + n / state.sigma2)
        mean = var * (config.mu_mean / config.mu_var + values.sum() / state.sigma2)
        state.mu = mean + np.sqrt(var) * self.rng.standard_normal()
        shape = config.sigma_shape + n / 2
        scale = config.sigma_scale + ((values - state.mu) ** 2).sum() / 2
        state.sigma2 = 1.0 / self.rng.gamma(shape, 1.0 / scale)

    def update_levels(self, state):
        if not self.free.size:
            return
        grade_of = self.lik.grade_index[:, state.y].T
        n_levels = state.levels.size
        yes = np.bincount(grade_of[self.lik.yes > 0], minlength=n_levels)
        no = np.bincount(grade_of[self.lik.no > 0], minlength=n_levels)
        # Levels two apart do not condition on each other; update alternately.
        for parity in (0, 1):
            idx = self.free[self.free % 2 == parity]
            if not idx.size:
                continue
            upper = np.where(idx > 0, state.levels[np.maximum(idx - 1, 0)], 1.0)
            lower = np.where(idx < n_levels - 1, state.levels[np.minimum(idx + 1, n_levels - 1)], 0.0)
            a, b = 1.0 + yes[idx], 1.0 + no[idx]
            cdf_lo, cdf_hi = special.betainc(a, b, lower), special.betainc(a, b, upper)
            u = self.rng.random(idx.size)
            draw = special.betaincinv(a, b, cdf_lo + u * (cdf_hi - cdf_lo))
            inside = (cdf_hi - cdf_lo > 1e-12) & (draw > lower) & (draw < upper)
            # All mass outside the interval: stay near the closer bound.
            mode = (a - 1) / np.maximum(a + b - 2, 1)
            edge = np.where(mode >= upper, upper - 1e-9 * (upper - lower), lower + 1e-9 * (upper - lower))
            state.levels[idx] = np.where(inside, draw, edge)
        self.log_lik = self.lik.log_likelihood(state.levels)

    def adapt(self):
        rate = self.accepted / self.config.adapt_every
        self.scales *= np.exp(rate - self.config.target_acceptance)
        self.accepted[:] = 0

    def run(self):
        config = self.config
        state = self.initial_state()
        retained_pi, retained_levels = [], []
        burnin = config.burnin
        for t in range(config.nsim):
            if t:
                self.update_y(state)
            self.update_theta(state)
            self.update_hyper(state)
            if state.levels is not None:
                self.update_levels(state)
            if t < burnin and (t + 1) % config.adapt_every == 0:
                self.adapt()
            if t + 1 == burnin:
                self.accepted[:] = 0
            if t >= burnin and (t - burnin + 1) % config.thin == 0:
                retained_pi.append(state.pi)
                if state.levels is not None:
                    retained_levels.append(state.levels.copy())
        acceptance = self.accepted / max(1, config.nsim - burnin)
        return state, np.array(retained_pi), np.array(retained_levels) if retained_levels else None, acceptance


def _fit_once(data, likelihood, log_extra, record_groups, groups, causes, active, config, dropped):
    sampler = _Sampler(likelihood, log_extra, record_groups, len(groups), config)
    _, pi, levels, acceptance = sampler.run()
    full = np.zeros((pi.shape[0], len(groups), len(causes)))
    full[:, :, [causes.index(c) for c in active]] = pi
    pi_draws = xr.DataArray(
        full,
        dims=("draw", "group", "cause"),
        coords={"draw": np.arange(pi.shape[0]), "group": list(groups), "cause": list(causes)},
        name="pi",
    )
    level_draws = None
    if levels is not None:
        level_draws = xr.DataArray(
            levels,
            dims=("draw", "grade"),
            coords={"draw": np.arange(levels.shape[0]), "grade": list(likelihood.level_labels)},
            name="level",
        )
    return PosteriorSample(
        ids=data.ids,
        causes=causes,
        active_causes=active,
        groups=tuple(groups),
        record_groups=record_groups,
        pi_draws=pi_draws,
        level_draws=level_draws,
        acceptance=acceptance,
        scales=sampler.scales.copy(),
        likelihood=likelihood,
        log_extra=log_extra,
        config=config,
        dropped_symptoms=dropped,
    )


def insilico_fit(
    data: SymptomMatrix,
    probs: CondProbMatrix,
    config: InsilicoConfig = InsilicoConfig(),
    groups: Optional[Sequence[str]] = None,
    prior_weights=None,
    possible=None,
) -> PosteriorSample:
    """
    Sample the posterior of the CSMFs and the cause of every death.

    Parameters
    ----------
    data, probs :
        Checked data and conditional probabilities over the same symptoms.
    groups :
        Sub-population label per death; one CSMF is estimated per label.
    prior_weights :
        Deaths × causes weights multiplying the population CSMF, e.g. from
        physician codes.
    possible :
        Deaths × causes mask; causes masked for every death are left out of
        the sampler and get zero mass in every draw.
    """
    from .diagnostics import insilico_convergence

    _validate_inputs(data, probs, groups, prior_weights, possible)
    causes = probs.causes
    mask = np.ones((data.n_records, len(causes)), dtype=bool) if possible is None else np.asarray(possible, bool)
    active_idx = np.flatnonzero(mask.any(axis=0))
    if active_idx.size < 2:
        raise InconsistencyError(
            f"InSilicoVA needs at least two possible causes, {active_idx.size} remain"
        )
    active = tuple(causes[i] for i in active_idx)

    observed = ~data.missing().all(axis=0)
    dropped = tuple(s for s, o in zip(data.symptoms, observed) if not o)
    if dropped:
        logger.info(f"Dropping {len(dropped)} symptom(s) missing for every death")
        kept = [s for s, o in zip(data.symptoms, observed) if o]
        data, probs = data.select(kept), probs.select_symptoms(kept)
    probs = probs.select_causes(active)

    labels = np.full(data.n_records, ALL, dtype=object) if groups is None else np.asarray(groups, dtype=object)
    group_names = tuple(sorted(set(map(str, labels))))
    record_groups = np.searchsorted(np.asarray(group_names, dtype=object), labels.astype(str))
    likelihood = LikelihoodModel.build(data, probs, config.reestimate_levels)
    log_extra = _log_extra(
        data.n_records,
        len(active),
        None if prior_weights is None else np.asarray(prior_weights, dtype=float)[:, active_idx],
        mask[:, active_idx],
    )
    logger.info(
        f"InSilicoVA: N={data.n_records} S={data.n_symptoms} C={len(active)} "
        f"groups={len(group_names)} Nsim={config.nsim} seed={config.seed}"
    )

    current = config
    for doublings in range(config.max_doublings + 1):
        sample = _fit_once(
            data, likelihood, log_extra, record_groups, group_names, causes, active, current, dropped
        )
        sample.doublings = doublings
        sample.convergence = insilico_convergence(sample)
        if sample.convergence.passed is not False or not config.auto_length:
            break
        if doublings < config.max_doublings:
            current = current.doubled()
            logger.info(f"Chain did not converge; refitting with Nsim={current.nsim}")
    verdict = {True: "converged", False: "did not converge", None: "inconclusive"}[sample.convergence.passed]
    if sample.convergence.passed is False:
        logger.warning(f"InSilicoVA chain {verdict}: {', '.join(sample.convergence.failed)}")
    else:
        logger.info(f"InSilicoVA chain {verdict} ({sample.n_draws} draws)")
    return sample
