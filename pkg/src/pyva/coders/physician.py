"""
De-biasing of physician codes into per-death priors.

Several physicians may assign a broad category (e.g. ``Communicable``,
``External``) to the same death. A rater model with one confusion matrix per
physician is fitted by EM; the per-death posteriors over categories become
priors for InSilicoVA after :func:`map_to_causes` spreads them over the fine
causes.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from ..core.exceptions import ConfigurationError, FormatError, InconsistencyError
from ..core.logging import add_to_report_log, logger
from ..core.utils import write_frame_atomic
from ..model.io import ID_COLUMN, read_table

UNKNOWN = "Unknown"
EXTERNAL = "External"
NA_TOKENS = frozenset({"", "NA", "<NA>", "nan", "NaN"})


@dataclass(frozen=True)
class PhysicianCodes:
    """
    ``codes`` holds, per death, the ``(physician, category)`` pairs assigned to
    it. ``categories`` lists the substantive categories; codes equal to
    ``unknown`` are kept but carry no information.
    """

    ids: Tuple[str, ...]
    codes: Tuple[Tuple[Tuple[str, str], ...], ...]
    categories: Tuple[str, ...]
    unknown: str = UNKNOWN

    def __post_init__(self):
        if len(self.ids) != len(self.codes):
            raise FormatError("Physician codes need one entry per death")
        if len(set(self.ids)) != len(self.ids):
            raise FormatError("Duplicate death ids in physician codes")
        if self.unknown in self.categories:
            raise FormatError(f"{self.unknown!r} cannot be a substantive category")
        declared = set(self.categories)
        undeclared = sorted(
            {cat for pairs in self.codes for _, cat in pairs if cat not in declared and cat != self.unknown}
        )
        if undeclared:
            raise FormatError(f"Physician codes use undeclared categories: {', '.join(undeclared)}")
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "codes", tuple(tuple(pairs) for pairs in self.codes))
        object.__setattr__(self, "categories", tuple(self.categories))

    @property
    def physicians(self) -> Tuple[str, ...]:
        return tuple(sorted({doc for pairs in self.codes for doc, _ in pairs}))

    def informative(self) -> np.ndarray:
        """Deaths with at least one substantive code."""
        return np.array([any(cat != self.unknown for _, cat in pairs) for pairs in self.codes], dtype=bool)

    def unknown_only(self) -> np.ndarray:
        return np.array([bool(pairs) for pairs in self.codes]) & ~self.informative()

    def triples(self):
        """Sorted (death, physician, category) index arrays of the substantive codes."""
        docs = {d: r for r, d in enumerate(self.physicians)}
        cats = {c: k for k, c in enumerate(self.categories)}
        rows = sorted(
            (i, docs[doc], cats[cat])
            for i, pairs in enumerate(self.codes)
            for doc, cat in pairs
            if cat != self.unknown
        )
        if not rows:
            return (np.zeros(0, dtype=int),) * 3
        return tuple(np.array(col, dtype=int) for col in zip(*rows))


@dataclass
class DebiasResult:
    ids: Tuple[str, ...]
    categories: Tuple[str, ...]
    probs: np.ndarray
    physicians: Tuple[str, ...]
    confusion: np.ndarray
    marginal: np.ndarray
    iterations: int
    converged: bool
    loglik: Sequence[float] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.probs, columns=list(self.categories))
        frame.insert(0, ID_COLUMN, list(self.ids))
        return frame

    def confusion_frame(self, physician) -> pd.DataFrame:
        """Rows: true category, columns: category coded by ``physician``."""
        r = self.physicians.index(physician)
        return pd.DataFrame(
            self.confusion[r],
            index=pd.Index(self.categories, name="true"),
            columns=list(self.categories),
        )

    def save(self, path):
        write_frame_atomic(self.to_frame(), path)
        return path

    @classmethod
    def read(cls, path) -> "DebiasResult":
        """Load a ``debias.csv``; only the per-death probabilities survive the round trip."""
        frame = read_table(path)
        if ID_COLUMN not in frame.columns:
            raise FormatError(f"{path} has no {ID_COLUMN} column")
        probs = frame.drop(columns=[ID_COLUMN]).astype(float)
        return cls(
            ids=tuple(frame[ID_COLUMN]),
            categories=tuple(probs.columns),
            probs=probs.to_numpy(),
            physicians=(),
            confusion=np.zeros((0, probs.shape[1], probs.shape[1])),
            marginal=probs.to_numpy().mean(axis=0) if len(probs) else np.zeros(probs.shape[1]),
            iterations=0,
            converged=True,
        )


def initial_confusion(n_physicians, n_categories, diagonal=0.8):
    if n_categories == 1:
        return np.ones((n_physicians, 1, 1))
    off = (1 - diagonal) / (n_categories - 1)
    single = np.full((n_categories, n_categories), off)
    np.fill_diagonal(single, diagonal)
    return np.broadcast_to(single, (n_physicians, n_categories, n_categories)).copy()


def _log(values):
    with np.errstate(divide="ignore"):
        return np.log(values)


def _e_step(log_marginal, log_confusion, deaths, docs, cats, n_deaths):
    log_post = np.broadcast_to(log_marginal, (n_deaths, log_marginal.size)).copy()
    np.add.at(log_post, deaths, log_confusion[docs, :, cats])
    norm = logsumexp(log_post, axis=1)
    return np.exp(log_post - norm[:, None]), float(norm.sum())


def _m_step(post, deaths, docs, cats, n_physicians, n_categories):
    marginal = post.mean(axis=0)
    counts = np.zeros((n_physicians, n_categories, n_categories))
    # counts[r, k, l] = sum over deaths coded l by r of P(true = k)
    np.add.at(counts, (docs, slice(None), cats), post[deaths])
    totals = counts.sum(axis=2, keepdims=True)
    confusion = np.divide(
        counts, totals, out=np.full_like(counts, 1.0 / n_categories), where=totals > 0
    )
    return marginal, confusion


@add_to_report_log
def physician_debias(
    codes: PhysicianCodes, tol: float = 1e-4, max_itr: int = 100, diagonal: float = 0.8
) -> DebiasResult:
    """
    Fit per-physician confusion matrices and category marginals by EM.

    Iterations stop once the relative change of the log-likelihood drops
    below ``tol``. Deaths without codes get the fitted marginal; deaths coded
    only as unknown get a uniform distribution over the categories.

    Raises
    ------
    InconsistencyError
        If no death carries a substantive code.
    """
    if tol <= 0 or max_itr < 1:
        raise ConfigurationError("Debiasing needs tol > 0 and max_itr >= 1")
    if not codes.categories:
        raise ConfigurationError("At least one substantive category is needed")
    informative = codes.informative()
    if not informative.any():
        raise InconsistencyError("No death carries a physician code to debias")
    physicians = codes.physicians
    n_cats, n_docs = len(codes.categories), len(physicians)
    deaths, docs, cats = codes.triples()
    coded = np.flatnonzero(informative)
    # Re-index deaths to the informative subset.
    local = np.searchsorted(coded, deaths)

    marginal = np.full(n_cats, 1.0 / n_cats)
    confusion = initial_confusion(n_docs, n_cats, diagonal)
    history = []
    converged = False
    iterations = 0
    for iterations in range(1, max_itr + 1):
        post, loglik = _e_step(_log(marginal), _log(confusion), local, docs, cats, coded.size)
        if history and loglik < history[-1] - 1e-9 * max(1.0, abs(history[-1])):
            raise InconsistencyError(
                f"EM log-likelihood decreased at iteration {iterations}: {history[-1]} -> {loglik}"
            )
        history.append(loglik)
        if len(history) > 1:
            change = abs(history[-1] - history[-2]) / max(abs(history[-2]), np.finfo(float).tiny)
            if change < tol:
                converged = True
                break
        marginal, confusion = _m_step(post, local, docs, cats, n_docs, n_cats)
    if not converged:
        logger.warning(f"Physician debiasing did not converge in {max_itr} iterations")
    else:
        logger.info(f"Physician debiasing converged after {iterations} iteration(s)")

    probs = np.broadcast_to(marginal, (len(codes.ids), n_cats)).copy()
    probs[coded] = post
    probs[codes.unknown_only()] = 1.0 / n_cats
    return DebiasResult(
        ids=codes.ids,
        categories=codes.categories,
        probs=probs,
        physicians=physicians,
        confusion=confusion,
        marginal=marginal,
        iterations=iterations,
        converged=converged,
        loglik=history,
    )


def read_physician_codes(source, categories=None, unknown: str = UNKNOWN) -> PhysicianCodes:
    """
    Read ``ID, code1, rev1, code2, rev2, ...``.

    Empty and ``NA`` entries are skipped. A code without a reviewer id is
    attributed to an anonymous physician per column. Without ``categories``
    the substantive categories are the sorted codes found.
    """
    frame = read_table(source)
    if ID_COLUMN not in frame.columns:
        raise FormatError(f"Physician codes need an {ID_COLUMN} column")
    positions = [i for i, c in enumerate(frame.columns) if c != ID_COLUMN]
    if len(positions) % 2:
        raise FormatError("Physician codes must come in (code, reviewer) column pairs")
    cells = frame.iloc[:, positions].to_numpy(dtype=object)
    pairs_of = []
    for row in cells:
        pairs = []
        for j in range(0, len(positions), 2):
            code, doc = str(row[j]).strip(), str(row[j + 1]).strip()
            if code in NA_TOKENS:
                continue
            pairs.append((doc if doc not in NA_TOKENS else f"anonymous:{j // 2 + 1}", code))
        pairs_of.append(tuple(pairs))
    if categories is None:
        categories = sorted({c for pairs in pairs_of for _, c in pairs if c != unknown})
    return PhysicianCodes(tuple(frame[ID_COLUMN]), tuple(pairs_of), tuple(categories), unknown)


def read_cause_categories(source, cause_column="cause", category_column="category") -> pd.Series:
    """The ``cause,category`` mapping as a Series indexed by cause."""
    frame = read_table(source)
    for column in (cause_column, category_column):
        if column not in frame.columns:
            raise FormatError(f"Cause mapping needs a {column!r} column")
    if frame[cause_column].duplicated().any():
        dupes = sorted(set(frame.loc[frame[cause_column].duplicated(), cause_column]))
        raise FormatError(f"Causes mapped more than once: {', '.join(dupes)}")
    return pd.Series(
        frame[category_column].to_numpy(), index=pd.Index(frame[cause_column], name="cause"), name="category"
    )


def map_to_causes(
    debias: DebiasResult, mapping: pd.Series, causes: Optional[Sequence[str]] = None
) -> pd.DataFrame:
    """
    Spread each category's mass equally over its member causes.

    Returns a deaths × causes frame indexed by ID whose rows sum to one.
    Causes outside ``mapping`` (when ``causes`` is given) get zero mass.
    """
    members: Dict[str, list] = {}
    for cause, category in mapping.items():
        members.setdefault(category, []).append(cause)
    unmapped = [c for c in debias.categories if c not in members]
    if unmapped:
        raise ConfigurationError(f"Categories without causes: {', '.join(unmapped)}")
    causes = list(causes) if causes is not None else list(mapping.index)
    weights = np.zeros((len(debias.categories), len(causes)))
    index = {c: j for j, c in enumerate(causes)}
    for k, category in enumerate(debias.categories):
        share = [index[c] for c in members[category] if c in index]
        if share:
            weights[k, share] = 1.0 / len(members[category])
    prior = debias.probs @ weights
    totals = prior.sum(axis=1, keepdims=True)
    empty = totals[:, 0] <= 0
    if empty.any():
        logger.warning(f"{int(empty.sum())} death(s) have no mass on the coded causes; using uniform")
        prior[empty] = 1.0
        totals = prior.sum(axis=1, keepdims=True)
    return pd.DataFrame(prior / totals, index=pd.Index(debias.ids, name=ID_COLUMN), columns=causes)


def external_causes(mapping: pd.Series, external: str = EXTERNAL) -> Tuple[str, ...]:
    return tuple(c for c, cat in mapping.items() if cat == external)
