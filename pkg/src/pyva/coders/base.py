"""
Common interface of the cause-of-death coders and their results.
"""

import json
import pathlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
import yaml

from ..core.context import RunContext
from ..core.exceptions import FormatError, InconsistencyError, MissingInputError
from ..core.factory import MetaFactory, create_factory
from ..core.logging import logger
from ..core.utils import write_frame_atomic, write_text_atomic
from ..model.io import read_table
from ..model.types import (
    SUMMARY_COLUMNS,
    UNDETERMINED,
    CSMFEstimate,
    IndivProbResult,
)

RESULT_FILE = "result.yaml"
QUANTILE_FILES = {name: f"indiv_prob_{name}.csv" for name in IndivProbResult.QUANTILE_NAMES}


@dataclass
class CodingResult:
    """
    What a coder produced for a set of deaths.

    ``indiv`` holds per-death distributions (``None`` for Tariff, which only
    ranks causes); ``raw`` the InterVA distributions before post-processing;
    ``ranks`` the Tariff ranks (lower is more likely).
    """

    model: str
    ids: tuple
    causes: tuple
    csmf: CSMFEstimate
    indiv: Optional[IndivProbResult] = None
    raw: Optional[IndivProbResult] = None
    ranks: Optional[np.ndarray] = None
    undetermined: Optional[str] = None
    groups: Optional[pd.Series] = None
    draws: Optional[pd.DataFrame] = None
    diagnostics: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    @property
    def n_records(self):
        return len(self.ids)

    def save(self, directory):
        """Write every table of the result into ``directory``."""
        directory = pathlib.Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        if self.indiv is not None:
            if self.indiv.quantiles is not None:
                for name, file in QUANTILE_FILES.items():
                    write_frame_atomic(self.indiv.to_frame(name).reset_index(), directory / file)
                    written.append(file)
            else:
                write_frame_atomic(self.indiv.to_frame().reset_index(), directory / "indiv_prob.csv")
                written.append("indiv_prob.csv")
        if self.raw is not None:
            write_frame_atomic(self.raw.to_frame().reset_index(), directory / "indiv_prob_raw.csv")
            written.append("indiv_prob_raw.csv")
        if self.ranks is not None:
            ranks = pd.DataFrame(self.ranks, columns=list(self.causes))
            ranks.insert(0, "ID", list(self.ids))
            write_frame_atomic(ranks, directory / "ranks.csv")
            written.append("ranks.csv")
        write_frame_atomic(self.csmf.to_frame(), directory / "csmf.csv")
        written.append("csmf.csv")
        from ..metrics.summaries import get_top_cod

        write_frame_atomic(get_top_cod(self), directory / "top_cod.csv")
        written.append("top_cod.csv")
        if self.groups is not None:
            write_frame_atomic(
                pd.DataFrame({"ID": list(self.ids), "group": self.groups.to_numpy()}),
                directory / "groups.csv",
            )
            written.append("groups.csv")
        if self.draws is not None:
            write_frame_atomic(self.draws, directory / "draws.csv")
            written.append("draws.csv")
        if self.diagnostics:
            write_text_atomic(
                directory / "diagnostics.json",
                json.dumps(self.diagnostics, indent=2, sort_keys=True, default=float) + "\n",
            )
            written.append("diagnostics.json")
        meta = {
            "model": self.model,
            "causes": list(self.causes),
            "undetermined": self.undetermined,
            "groups": list(self.csmf.groups),
            "ci": self.indiv.ci if self.indiv is not None else None,
            "files": written,
            "options": self.options,
        }
        write_text_atomic(directory / RESULT_FILE, yaml.safe_dump(meta, sort_keys=False))
        logger.info(f"Wrote {self.model} result for {self.n_records} death(s) to {directory}")
        return directory

    @classmethod
    def load(cls, directory) -> "CodingResult":
        directory = pathlib.Path(directory)
        meta_path = directory / RESULT_FILE
        if not meta_path.exists():
            raise MissingInputError(f"{directory} is not a result directory (no {RESULT_FILE})")
        with open(meta_path) as f:
            meta = yaml.safe_load(f)
        files = set(meta.get("files", []))

        def table(name):
            frame = read_table(directory / name)
            return frame.iloc[:, 0].tolist(), frame.iloc[:, 1:].astype(float)

        causes = tuple(meta["causes"])
        ids, indiv, raw, ranks = (), None, None, None
        if "indiv_prob.csv" in files:
            ids, frame = table("indiv_prob.csv")
            indiv = IndivProbResult(tuple(ids), tuple(frame.columns), frame.to_numpy())
        elif QUANTILE_FILES["mean"] in files:
            quantiles = {}
            for name, file in QUANTILE_FILES.items():
                ids, frame = table(file)
                quantiles[name] = frame.to_numpy()
            columns = tuple(frame.columns)
            mean = quantiles["mean"]
            # The stored mean was rounded on output; renormalize the point estimate.
            point = mean / mean.sum(axis=1, keepdims=True) if len(mean) else mean
            indiv = IndivProbResult(tuple(ids), columns, point, quantiles, meta.get("ci"))
        if "indiv_prob_raw.csv" in files:
            ids, frame = table("indiv_prob_raw.csv")
            raw = IndivProbResult(tuple(ids), tuple(frame.columns), frame.to_numpy())
        if "ranks.csv" in files:
            ids, frame = table("ranks.csv")
            ranks = frame.to_numpy()
        csmf = _load_csmf(directory / "csmf.csv", meta)
        groups = None
        if "groups.csv" in files:
            frame = read_table(directory / "groups.csv")
            groups = pd.Series(frame["group"].to_numpy(), index=pd.Index(frame["ID"], name="ID"))
        draws = pd.read_csv(directory / "draws.csv") if "draws.csv" in files else None
        diagnostics = {}
        if "diagnostics.json" in files:
            diagnostics = json.loads((directory / "diagnostics.json").read_text())
        if not ids:
            top = read_table(directory / "top_cod.csv")
            ids = top["ID"].tolist()
        return cls(
            model=meta["model"],
            ids=tuple(ids),
            causes=causes,
            csmf=csmf,
            indiv=indiv,
            raw=raw,
            ranks=ranks,
            undetermined=meta.get("undetermined"),
            groups=groups,
            draws=draws,
            diagnostics=diagnostics,
            options=meta.get("options") or {},
        )


def _load_csmf(path, meta) -> CSMFEstimate:
    frame = pd.read_csv(path, dtype={"group": str, "cause": str}, keep_default_na=False)
    causes = list(dict.fromkeys(frame["cause"]))
    fractions, summary = {}, None
    if "CSMF" in frame.columns:
        for group, rows in frame.groupby("group", sort=False):
            vector = rows.set_index("cause")["CSMF"].reindex(causes).to_numpy(dtype=float)
            fractions[group] = vector / vector.sum()
    else:
        summary = {}
        for group, rows in frame.groupby("group", sort=False):
            table = rows.set_index("cause")[list(SUMMARY_COLUMNS)].reindex(causes).astype(float)
            summary[group] = table
            fractions[group] = table["Mean"].to_numpy() / table["Mean"].sum()
    return CSMFEstimate(tuple(causes), fractions, summary)


def point_csmf(indiv: IndivProbResult, groups: Optional[pd.Series] = None) -> CSMFEstimate:
    """CSMF as the mean of the per-death distributions, per group if ``groups`` is given."""
    if not len(indiv.ids):
        raise InconsistencyError("Cannot estimate CSMFs from zero deaths")
    if groups is None:
        return CSMFEstimate(indiv.causes, {CSMFEstimate.ALL: _mean_rows(indiv.point)})
    labels = groups.reindex(list(indiv.ids)).to_numpy()
    fractions = {
        str(g): _mean_rows(indiv.point[labels == g]) for g in pd.unique(labels)
    }
    return CSMFEstimate(indiv.causes, fractions)


def _mean_rows(point):
    vector = point.mean(axis=0)
    return vector / vector.sum()


def masked_log_prior(prior_weights, n_records, possible=None):
    """N×C log prior with impossible causes at -inf."""
    with np.errstate(divide="ignore"):
        log_prior = np.log(np.asarray(prior_weights, dtype=float))
    log_prior = np.broadcast_to(log_prior, (n_records, log_prior.size)).copy()
    if possible is not None:
        log_prior[~possible] = -np.inf
    return log_prior


def normalize_log(log_post, fallback):
    """
    Exponentiate and normalize rows of log posteriors. Rows without any finite
    entry get ``fallback`` (N×C) instead and are flagged.
    """
    top = log_post.max(axis=1, keepdims=True)
    degenerate = ~np.isfinite(top[:, 0])
    safe_top = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(invalid="ignore"):
        weights = np.exp(log_post - safe_top)
    weights[degenerate] = fallback[degenerate]
    return weights / weights.sum(axis=1, keepdims=True), degenerate


class Coder(metaclass=MetaFactory):
    """
    Base class of all coders.

    Subclasses register themselves by name (``InterVACoder`` as ``interva``)
    and are created through :data:`CoderFactory`.
    """

    abstract = True
    requires_training = False

    def __init__(self, context: Optional[RunContext] = None, **options):
        self.context = context or RunContext.from_options()
        self.options = options

    def option(self, name, config_key=None):
        return self.context.option(config_key or name, self.options.get(name))

    def code(self, data, **inputs) -> CodingResult:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.options})"


CoderFactory = create_factory(Coder)


def require_undetermined_free(causes):
    if UNDETERMINED in causes:
        raise FormatError(f"{UNDETERMINED!r} is reserved and cannot be a training cause")
