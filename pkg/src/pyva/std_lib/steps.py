"""
Implementation of the built-in pipeline steps.
"""

import pathlib

import dpath
import pandas as pd

from ..coders import CoderFactory, CodingResult
from ..coders.base import point_csmf
from ..coders.insilico import subpop_labels
from ..coders.physician import UNKNOWN, physician_debias, read_cause_categories, read_physician_codes
from ..consistency import CheckPolicy, SymptomHierarchy, data_check
from ..core.context import RunContext
from ..core.exceptions import ConfigurationError, UnsupportedOperationError
from ..core.logging import logger
from ..core.utils import write_frame_atomic
from ..ingest import LabelMap, PhmrcCutoffTable, PhmrcSymptomTable, convert_custom, fetch_phmrc
from ..ingest.phmrc import convert_phmrc_with_report, diff_symptom_reports, phmrc_url
from ..ingest.who import parse_who2012, parse_who2016
from ..metrics import CauseGrouping, csmf_accuracy, emit_plots, truth_csmf
from ..model.io import read_labels, read_symptom_csv, read_table, write_symptom_csv
from ..model.types import CSMFEstimate

CAUSE_COLUMN = "Cause"
SOURCES = ("phmrc",)
FORMATS = ("who2012", "who2016", "phmrc", "phmrc-adult", "phmrc-child", "phmrc-neonate", "custom", "canonical")
DEFAULT_MISSING_LABELS = ("Don't Know", "Refused", "DK", "")


def _option(options, path, default=None):
    """
    Look up ``path`` (``"phy/external"``) in nested options, falling back to
    the flat key ``"phy_external"``.
    """
    value = dpath.get(options, path, default=None)
    if value is None:
        value = options.get(path.replace("/", "_"), default)
    return value


def _as_list(value):
    if value is None:
        return []
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return list(value)


def load_symptoms(path, extra_columns=()):
    """Read a canonical CSV; a ``Cause`` column is always treated as a label."""
    header = list(read_table(path, nrows=1).columns)
    wanted = list(dict.fromkeys([*extra_columns, *(c for c in (CAUSE_COLUMN,) if c in header)]))
    return read_symptom_csv(path, extra_columns=wanted)


def fetch(inputs, output, options, context: RunContext) -> pathlib.Path:
    """Download a public dataset (``source: phmrc``, ``module``, ``rows``) to ``output``."""
    source = options.get("source", "phmrc")
    if source not in SOURCES:
        raise ConfigurationError(f"Unknown source {source!r}, choose from {', '.join(SOURCES)}")
    module = options.get("module", "adult")
    raw = fetch_phmrc(
        module,
        rows=options.get("rows"),
        url=options.get("url") or phmrc_url(module, context.config),
        timeout=context.config("http_timeout"),
    )
    write_frame_atomic(raw, output)
    return output


def convert(inputs, output, options, context: RunContext) -> pathlib.Path:
    """
    Convert ``inputs["data"]`` into a canonical symptom CSV.

    ``options["from"]`` picks the format: ``who2012``, ``who2016``,
    ``phmrc-<module>`` (with ``cutoff`` and optional ``inputs["cutoffs"]`` and
    ``inputs["symptoms"]`` tables; the per-symptom report goes to
    ``options["report"]``, by default ``<name>.symptoms.csv``, and is diffed
    against ``inputs["reference"]`` when given), ``custom`` (with ``yes``, ``no`` and ``missing`` labels) or
    ``canonical``.
    Cause labels found in the input are written to a ``Cause`` column.
    """
    fmt = options.get("from", "canonical")
    module = options.get("module", "adult")
    if fmt.startswith("phmrc-"):
        fmt, module = "phmrc", fmt[len("phmrc-") :]
    lenient = bool(options.get("lenient", fmt.startswith("who")))
    path = inputs["data"]
    extras = None
    if fmt == "who2012":
        data = parse_who2012(path, lenient=lenient)
    elif fmt == "who2016":
        data = parse_who2016(path, lenient=lenient)
    elif fmt == "phmrc":
        cutoff = options.get("cutoff", "default")
        table = symptoms = None
        if inputs.get("cutoffs") is not None:
            table = PhmrcCutoffTable.read(inputs["cutoffs"], cutoff)
        if inputs.get("symptoms") is not None:
            symptoms = PhmrcSymptomTable.read(inputs["symptoms"])
        data, causes, report = convert_phmrc_with_report(
            read_table(path),
            module=module,
            cutoff=cutoff,
            cause_column=options.get("cause_column"),
            cutoff_table=table,
            id_column=options.get("id_column"),
            symptom_table=symptoms,
        )
        if inputs.get("reference") is not None:
            report = diff_symptom_reports(report, read_table(inputs["reference"]))
        write_frame_atomic(report, options.get("report") or report_path(output))
        if causes is not None:
            extras = pd.DataFrame({CAUSE_COLUMN: causes.to_numpy()}, index=causes.index)
    elif fmt == "custom":
        labels = LabelMap.of(
            _as_list(options.get("yes", "Yes")),
            _as_list(options.get("no", "No")),
            options.get("missing", list(DEFAULT_MISSING_LABELS)),
        )
        data, causes = convert_custom(
            read_table(path), labels, options.get("cause_column", CAUSE_COLUMN), lenient
        )
        if causes is not None:
            extras = pd.DataFrame({CAUSE_COLUMN: causes.to_numpy()}, index=causes.index)
    elif fmt == "canonical":
        data, extras = load_symptoms(path, _as_list(options.get("extra_columns")))
    else:
        raise ConfigurationError(f"Unknown input format {fmt!r}, choose from {', '.join(FORMATS)}")
    write_symptom_csv(data, output, extras)
    logger.info(f"Converted {data.n_records} record(s) with {data.n_symptoms} symptom(s) to {output}")
    return output


def check(inputs, output, options, context: RunContext) -> pathlib.Path:
    """
    Apply the symptom hierarchy (``inputs["hierarchy"]``, else the bundled
    example) with ``options["policy"]``; the change log goes to ``options["log"]``,
    by default next to ``output`` as ``<name>.changes.csv``.
    """
    data, extras = load_symptoms(inputs["data"], _as_list(options.get("extra_columns")))
    if inputs.get("hierarchy") is not None:
        hierarchy = SymptomHierarchy.read(inputs["hierarchy"])
    else:
        hierarchy = SymptomHierarchy.example()
    if not options.get("strict", False):
        hierarchy = hierarchy.restricted_to(data.symptoms)
    policy = CheckPolicy(
        options.get("policy", "interva5"), options.get("neonate_indicator", "neonate")
    )
    checked, log = data_check(data, hierarchy, policy, int(options.get("passes", 2)))
    write_symptom_csv(checked, output, extras)
    write_frame_atomic(log, options.get("log") or changes_path(output))
    return output


def changes_path(output) -> pathlib.Path:
    output = pathlib.Path(output)
    return output.with_name(f"{output.stem}.changes.csv")


def report_path(output) -> pathlib.Path:
    output = pathlib.Path(output)
    return output.with_name(f"{output.stem}.symptoms.csv")


def debias_codes(codes, mapping=None, options=None):
    """Run the physician EM on the codes file ``codes``; ``mapping`` fixes the categories."""
    options = options or {}
    unknown = _option(options, "phy/unknown", options.get("unknown", UNKNOWN))
    categories = None
    if mapping is not None:
        categories = list(dict.fromkeys(c for c in read_cause_categories(mapping) if c != unknown))
    return physician_debias(
        read_physician_codes(codes, categories, unknown),
        float(options.get("tol", 1e-4)),
        int(options.get("max_itr", 100)),
    )


def debias(inputs, output, options, context: RunContext) -> pathlib.Path:
    """Aggregate physician codes (``inputs["codes"]``) into ``debias.csv``."""
    debias_codes(inputs["codes"], inputs.get("mapping"), options).save(output)
    return output


def _coder_context(options, context):
    seed = options.get("seed")
    if seed is None:
        return context
    return RunContext.from_options(
        seed=seed, threads=context.threads, base_dir=context.base_dir, manifest_dir=context.manifest_dir
    )


def code(inputs, output, options, context: RunContext) -> pathlib.Path:
    """
    Code the deaths of ``inputs["data"]`` with ``options["model"]`` and save
    the result directory ``output``.

    Optional inputs: ``train`` (labels in ``train_cause_column``),
    ``probbase``, ``prior``, ``phy_cat`` and either ``phy_debias`` or raw
    ``phy_codes`` (debiased on the fly). Settings for the
    chosen model may also be nested under its name, e.g.
    ``{"model": "insilico", "insilico": {"nsim": 4000}}``.
    """
    model = options.get("model")
    if not model:
        raise ConfigurationError("No model given; choose from " + ", ".join(sorted(CoderFactory.names())))
    try:
        klass = CoderFactory.get(model)
    except ValueError as e:
        raise ConfigurationError(str(e)) from None
    subpop = _as_list(options.get("subpop"))
    data, extras = load_symptoms(inputs["data"], subpop)
    coder_options = {
        k: v
        for k, v in options.items()
        if k not in ("model", "subpop", "seed", "train_cause_column") and not isinstance(v, dict)
    }
    coder_options.update(dpath.get(options, model.lower(), default={}) or {})
    external = _option(options, "phy/external")
    if external is not None:
        coder_options["phy_external"] = external
    for key in ("phy_debias", "phy_cat"):
        if inputs.get(key) is not None:
            coder_options[key] = inputs[key]
    if inputs.get("phy_codes") is not None and inputs.get("phy_debias") is None:
        coder_options["phy_debias"] = debias_codes(inputs["phy_codes"], inputs.get("phy_cat"), options)
    coder = klass(context=_coder_context(options, context), **coder_options)

    train = train_labels = None
    if inputs.get("train") is not None:
        column = options.get("train_cause_column", CAUSE_COLUMN)
        train, _ = load_symptoms(inputs["train"], [column])
        train_labels = read_labels(inputs["train"], column)
    groups = subpop_labels(extras, subpop) if subpop else None
    result = coder.code(
        data,
        train=train,
        train_labels=train_labels,
        probbase=inputs.get("probbase"),
        prior=inputs.get("prior"),
        groups=groups,
    )
    result.save(output)
    return output


def _overall_csmf(result: CodingResult) -> CSMFEstimate:
    if CSMFEstimate.ALL in result.csmf.groups:
        return result.csmf
    if result.indiv is None:
        raise UnsupportedOperationError("Cannot pool a grouped result without individual distributions")
    return point_csmf(result.indiv)


def evaluate(inputs, output, options, context: RunContext) -> pathlib.Path:
    """
    CSMF accuracy of one or more result directories (``inputs["results"]``)
    against the labels of ``inputs["truth"]``; one row per result.
    """
    results = inputs["results"] if isinstance(inputs["results"], list) else [inputs["results"]]
    labels = read_labels(inputs["truth"], options.get("truth_column", CAUSE_COLUMN))
    mode = options.get("undetermined", "drop")
    rows, per_cause = [], []
    for path in results:
        result = CodingResult.load(path)
        csmf = _overall_csmf(result)
        est = csmf.series(CSMFEstimate.ALL)
        causes = [c for c in est.index if c != result.undetermined]
        truth = truth_csmf(labels.reindex(list(result.ids)).dropna(), causes)
        accuracy = csmf_accuracy(est, truth, result.undetermined, mode)
        logger.info(f"{result.model} ({path}): CSMF accuracy {accuracy:.4f}")
        rows.append({"result": str(path), "model": result.model, "csmf_accuracy": accuracy})
        per_cause.append(
            pd.DataFrame(
                {
                    "result": str(path),
                    "cause": causes,
                    "estimate": est.reindex(causes).to_numpy(),
                    "truth": truth.to_numpy(),
                }
            )
        )
    write_frame_atomic(pd.DataFrame(rows), output)
    causes_path = pathlib.Path(output).with_name(f"{pathlib.Path(output).stem}.causes.csv")
    write_frame_atomic(pd.concat(per_cause, ignore_index=True), causes_path)
    return output


def plot(inputs, output, options, context: RunContext) -> pathlib.Path:
    """
    Draw the CSMFs of ``inputs["results"]`` into the directory ``output``;
    ``inputs["grouping"]`` optionally aggregates causes first.
    """
    results = inputs["results"] if isinstance(inputs["results"], list) else [inputs["results"]]
    estimates = {}
    for path in results:
        label = options.get("labels", {}).get(str(path)) if isinstance(options.get("labels"), dict) else None
        estimates[label or pathlib.Path(path).name] = CodingResult.load(path).csmf
    grouping = CauseGrouping.read(inputs["grouping"]) if inputs.get("grouping") is not None else None
    emit_plots(
        estimates,
        options.get("kind", "bar"),
        output,
        top=int(options.get("top", 10)),
        grouping=grouping,
        order_group=_as_list(options.get("order_group")) or None,
        causelist=_as_list(options.get("causelist")) or None,
        which_sub=options.get("which_sub"),
        title=options.get("title"),
        hashsalt=context.config("svg_hashsalt"),
        name=options.get("name"),
    )
    return output
