from .accuracy import UNDETERMINED_MODES, csmf_accuracy, resolve_undetermined, truth_csmf
from .grouping import CauseGrouping, aggregate_csmf
from .plots import KINDS, emit_plots
from .summaries import get_csmf, get_indiv_prob, get_top_cod, summary_lines

__all__ = [
    "KINDS",
    "UNDETERMINED_MODES",
    "CauseGrouping",
    "aggregate_csmf",
    "csmf_accuracy",
    "emit_plots",
    "get_csmf",
    "get_indiv_prob",
    "get_top_cod",
    "resolve_undetermined",
    "summary_lines",
    "truth_csmf",
]
