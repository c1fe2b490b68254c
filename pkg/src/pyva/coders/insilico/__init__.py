from .coder import InSilicoCoder, physician_prior
from .diagnostics import ConvergenceReport, chain_convergence, geweke_z, insilico_convergence
from .sampler import InsilicoConfig, LikelihoodModel, McmcState, PosteriorSample, insilico_fit
from .summary import insilico_csmf, insilico_indiv_summary, insilico_subpop, subpop_labels

__all__ = [
    "ConvergenceReport",
    "InSilicoCoder",
    "InsilicoConfig",
    "LikelihoodModel",
    "McmcState",
    "PosteriorSample",
    "chain_convergence",
    "geweke_z",
    "insilico_convergence",
    "insilico_csmf",
    "insilico_fit",
    "insilico_indiv_summary",
    "insilico_subpop",
    "physician_prior",
    "subpop_labels",
]
