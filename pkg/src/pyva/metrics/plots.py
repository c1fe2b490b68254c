"""
CSMF charts as SVG, each with a CSV of exactly the plotted numbers.

SVG output is byte-reproducible: element ids are salted with a fixed string,
text is kept as text, and no creation date is written.
"""

import io
import pathlib
from typing import Dict, Mapping, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from ..core.exceptions import ConfigurationError  # noqa: E402
from ..core.logging import logger  # noqa: E402
from ..core.utils import atomic_write, write_frame_atomic  # noqa: E402
from ..model.types import CSMFEstimate  # noqa: E402
from .grouping import CauseGrouping, aggregate_csmf  # noqa: E402

KINDS = ("bar", "stacked", "dodge", "compare", "subpop")
PLOT_COLUMNS = ("series", "cause_or_group", "value", "lower", "upper")


def collect_series(estimates: Mapping[str, CSMFEstimate], which_sub: Optional[str] = None) -> Dict[str, pd.DataFrame]:
    """
    One table (value, lower, upper) per plotted series.

    A series is a (result, group) pair; it is named after the result when the
    result has a single group, after the group when there is a single result.
    """
    series = {}
    for label, csmf in estimates.items():
        groups = list(csmf.groups)
        if which_sub is not None:
            if which_sub not in groups:
                raise ConfigurationError(
                    f"Unknown sub-population {which_sub!r}; valid labels: {', '.join(groups)}"
                )
            groups = [which_sub]
        for group in groups:
            if len(estimates) == 1 and (len(csmf.groups) > 1 or which_sub is not None):
                name = group
            elif len(groups) == 1:
                name = label
            else:
                name = f"{label}: {group}"
            table = pd.DataFrame({"value": csmf.fractions[group]}, index=pd.Index(csmf.causes, name="cause_or_group"))
            if csmf.summary is not None and group in csmf.summary:
                summary = csmf.summary[group].reindex(list(csmf.causes))
                table["lower"] = summary["Lower"].to_numpy()
                table["upper"] = summary["Upper"].to_numpy()
            series[name] = table
    return series


def _top(table: pd.DataFrame, k: int):
    return list(table["value"].sort_values(ascending=False, kind="stable").index[:k])


def select_causes(series: Dict[str, pd.DataFrame], kind, top, causelist=None):
    """Causes to draw, in drawing order."""
    first = next(iter(series.values()))
    if causelist:
        unknown = [c for c in causelist if c not in first.index]
        if unknown:
            raise ConfigurationError(f"Unknown cause(s) in causelist: {', '.join(unknown)}")
        return list(causelist)
    if kind == "bar":
        return _top(first, top)
    if kind in ("compare", "subpop"):
        chosen = []
        for table in series.values():
            chosen.extend(c for c in _top(table, top) if c not in chosen)
        # Draw the union in descending order of the first series.
        return sorted(chosen, key=lambda c: (-first.loc[c, "value"], list(first.index).index(c)))
    return list(first.index)


def plot_data(series, causes) -> pd.DataFrame:
    frames = []
    for name, table in series.items():
        frame = table.reindex(causes).reset_index()
        frame.insert(0, "series", name)
        frames.append(frame)
    data = pd.concat(frames, ignore_index=True)
    columns = [c for c in PLOT_COLUMNS if c in data.columns]
    return data[columns]


def _draw(ax, data: pd.DataFrame, kind):
    names = list(dict.fromkeys(data["series"]))
    causes = list(dict.fromkeys(data["cause_or_group"]))
    values = data.pivot(index="cause_or_group", columns="series", values="value").reindex(index=causes, columns=names)
    has_ci = "lower" in data.columns and data["lower"].notna().any()
    if kind == "stacked":
        bottom = np.zeros(len(names))
        for cause in causes:
            heights = values.loc[cause].to_numpy()
            ax.bar(names, heights, bottom=bottom, label=cause)
            bottom += heights
        ax.set_ylabel("CSMF")
        ax.legend(fontsize="small", loc="center left", bbox_to_anchor=(1.0, 0.5))
        return
    width = 0.8 / len(names)
    positions = np.arange(len(causes))
    for j, name in enumerate(names):
        offset = (j - (len(names) - 1) / 2) * width
        heights = values[name].to_numpy()
        yerr = None
        if has_ci:
            rows = data[data["series"] == name].set_index("cause_or_group").reindex(causes)
            yerr = np.vstack([heights - rows["lower"].to_numpy(), rows["upper"].to_numpy() - heights])
            yerr = np.where(np.isfinite(yerr), np.maximum(yerr, 0.0), 0.0)
        ax.bar(positions + offset, heights, width=width, yerr=yerr, capsize=2, label=name)
    ax.set_xticks(positions)
    ax.set_xticklabels(causes, rotation=60, ha="right", fontsize="small")
    ax.set_ylabel("CSMF")
    if len(names) > 1:
        ax.legend(fontsize="small")


def render_svg(data: pd.DataFrame, kind: str, title: Optional[str] = None, hashsalt: str = "pyva") -> bytes:
    """Draw ``data`` (a plot-data table) and return deterministic SVG bytes."""
    with plt.rc_context({"svg.hashsalt": hashsalt, "svg.fonttype": "none", "font.family": "DejaVu Sans"}):
        fig, ax = plt.subplots(figsize=(8, 5))
        try:
            _draw(ax, data, kind)
            if title:
                ax.set_title(title)
            fig.tight_layout()
            buffer = io.BytesIO()
            fig.savefig(buffer, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return buffer.getvalue()


def emit_plots(
    estimates: Mapping[str, CSMFEstimate],
    kind: str,
    output_dir,
    top: int = 10,
    grouping: Optional[CauseGrouping] = None,
    order_group: Optional[Sequence[str]] = None,
    causelist: Optional[Sequence[str]] = None,
    which_sub: Optional[str] = None,
    title: Optional[str] = None,
    hashsalt: str = "pyva",
    name: Optional[str] = None,
):
    """
    Write ``<name>.svg`` and ``<name>.csv`` (default name: the kind) into
    ``output_dir`` and return both paths.

    ``bar`` shows the top causes of one series; ``stacked`` and ``dodge`` show
    all causes (or groups) of every series; ``compare`` and ``subpop`` show
    the union of each series' top causes and need two series or a
    ``which_sub`` label.
    """
    if kind not in KINDS:
        raise ConfigurationError(f"Unknown plot kind {kind!r}, choose from {', '.join(KINDS)}")
    if not estimates:
        raise ConfigurationError("Nothing to plot")
    if top < 1:
        raise ConfigurationError("top must be at least 1")
    if grouping is not None:
        estimates = {
            label: aggregate_csmf(
                csmf,
                grouping.with_undetermined() if any(c not in grouping.mapping for c in csmf.causes) else grouping,
                order_group,
            )
            for label, csmf in estimates.items()
        }
    series = collect_series(estimates, which_sub)
    if kind in ("compare", "subpop") and len(series) < 2 and which_sub is None:
        raise ConfigurationError(f"A {kind} plot needs at least two series or a sub-population label")
    causes = select_causes(series, kind, top, causelist)
    data = plot_data(series, causes)
    output_dir = pathlib.Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    name = name or kind
    csv_path, svg_path = output_dir / f"{name}.csv", output_dir / f"{name}.svg"
    write_frame_atomic(data, csv_path)
    with atomic_write(svg_path, mode="wb", encoding=None) as f:
        f.write(render_svg(data, kind, title, hashsalt))
    logger.info(f"Wrote {kind} plot of {len(series)} series and {len(causes)} categories to {svg_path}")
    return svg_path, csv_path
