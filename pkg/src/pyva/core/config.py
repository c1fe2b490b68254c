"""
This module defines the configuration hierarchy for pyva, using ``everett``'s
``~everett.manager.ConfigManager``. The configuration hierarchy is as follows (lowest to highest
priority):
    1. Hardcoded defaults
    2. User configuration file
    3. Environment variables
    4. Run-specific configuration (command-line switches)

User Configuration File
-----------------------

The files found at these locations will be used, in highest to lowest priority order:
    1. ``${PYVA_CONFIG_FILE}``
    2. ``${XDG_CONFIG_HOME}/pyva.yaml``
    3. ``${XDG_CONFIG_HOME}/pyva/pyva.yaml``
    4. ``~/.pyva.yaml``

Keys live under a ``pyva`` section and every value is a double-quoted string::

    pyva:
      interva_top: "2"
      insilico_nsim: "4000"

Environment variables use the ``PYVA_`` prefix, e.g. ``PYVA_INSILICO_NSIM=4000``.

Usage
-----

    >>> config = PyvaConfigManager.from_pyva_cfg({})
    >>> config("nbc_alpha")
    1.0
    >>> config = PyvaConfigManager.from_pyva_cfg({"insilico_nsim": "2000"})
    >>> config("insilico_nsim")
    2000

See Also
--------
- `Everett Documentation <https://everett.readthedocs.io/en/latest/>`_
"""

import os
import pathlib
from importlib.resources import files

from everett import InvalidKeyError
from everett.ext.yamlfile import ConfigYamlEnv
from everett.manager import (
    ChoiceOf,
    ConfigDictEnv,
    ConfigManager,
    ConfigOSEnv,
    ListOf,
    Option,
    _get_component_name,
    parse_bool,
)

DATA = files("pyva.data")
GRADE_TABLE = DATA.joinpath("grade_table.yaml")
PREVALENCE_TABLE = DATA.joinpath("prevalence_levels.yaml")

PHMRC_URLS = {
    "adult": "https://ghdx.healthdata.org/sites/default/files/record-attached-files/"
    "IHME_PHMRC_VA_DATA_ADULT_Y2013M09D11_0.csv",
    "child": "https://ghdx.healthdata.org/sites/default/files/record-attached-files/"
    "IHME_PHMRC_VA_DATA_CHILD_Y2013M09D11_0.csv",
    "neonate": "https://ghdx.healthdata.org/sites/default/files/record-attached-files/"
    "IHME_PHMRC_VA_DATA_NEONATE_Y2013M09D11_0.csv",
}

DEFAULT_DEMOGRAPHIC_SYMPTOMS = (
    "elder,midage,adult,child,under5,infant,neonate,male,female"
)


def _parse_bool(value):
    if isinstance(value, bool):
        return value
    return parse_bool(value)


class PyvaConfig:
    class Config:
        # Keep the list of all options alphabetical!
        demographic_symptoms = Option(
            default=DEFAULT_DEMOGRAPHIC_SYMPTOMS,
            doc="Sex and age-group indicators used to detect physically impossible causes.",
            parser=ListOf(str),
        )
        grade_table = Option(
            default=str(GRADE_TABLE),
            doc="YAML file with the letter grades, their values and reference shares.",
            parser=str,
        )
        http_timeout = Option(
            default="60",
            doc="Timeout in seconds for downloads.",
            parser=float,
        )
        insilico_burnin_fraction = Option(
            default="0.5",
            doc="Fraction of iterations discarded as burn-in.",
            parser=float,
        )
        insilico_max_doublings = Option(
            default="3",
            doc="How often the chain length is doubled when auto-length is on and the chain did not converge.",
            parser=int,
        )
        insilico_mu_mean = Option(
            default="0",
            doc="Prior mean of the Normal hyperprior on mu.",
            parser=float,
        )
        insilico_mu_var = Option(
            default="100",
            doc="Prior variance of the Normal hyperprior on mu.",
            parser=float,
        )
        insilico_nsim = Option(
            default="10000",
            doc="Total number of sampler iterations.",
            parser=int,
        )
        insilico_proposal_scale = Option(
            default="1.0",
            doc="Initial random-walk scale of the theta proposals.",
            parser=float,
        )
        insilico_sigma_scale = Option(
            default="0.001",
            doc="Scale of the inverse-gamma hyperprior on sigma^2.",
            parser=float,
        )
        insilico_sigma_shape = Option(
            default="0.001",
            doc="Shape of the inverse-gamma hyperprior on sigma^2.",
            parser=float,
        )
        insilico_target_acceptance = Option(
            default="0.35",
            doc="Acceptance rate the proposal scale is tuned towards during burn-in.",
            parser=float,
        )
        insilico_thin = Option(
            default="20",
            doc="Keep every n-th iteration after burn-in.",
            parser=int,
        )
        interva_floor = Option(
            default="0.1",
            doc="Minimum probability for a cause to be reported by InterVA post-processing.",
            parser=float,
        )
        interva_ratio = Option(
            default="0.25",
            doc="Ranks two and three must reach this fraction of the previous reported cause.",
            parser=float,
        )
        interva_top = Option(
            default="3",
            doc="Maximum number of causes reported per death by InterVA post-processing.",
            parser=int,
        )
        nbc_alpha = Option(
            default="1.0",
            doc="Laplace pseudo-count for the naive Bayes classifier.",
            parser=float,
        )
        phmrc_url_adult = Option(
            default=PHMRC_URLS["adult"],
            doc="Where the PHMRC adult module is downloaded from.",
            parser=str,
        )
        phmrc_url_child = Option(
            default=PHMRC_URLS["child"],
            doc="Where the PHMRC child module is downloaded from.",
            parser=str,
        )
        phmrc_url_neonate = Option(
            default=PHMRC_URLS["neonate"],
            doc="Where the PHMRC neonate module is downloaded from.",
            parser=str,
        )
        physician_external_threshold = Option(
            default="0.5",
            doc="Debiased External mass above which a death is restricted to external causes.",
            parser=float,
        )
        prevalence_table = Option(
            default=str(PREVALENCE_TABLE),
            doc="YAML file mapping HIV/malaria prevalence levels to prior multipliers.",
            parser=str,
        )
        quiet = Option(
            default="no",
            doc="Whether to suppress output.",
            parser=_parse_bool,
        )
        seed = Option(
            default="1",
            doc="Master seed for every random number generator.",
            parser=int,
        )
        svg_hashsalt = Option(
            default="pyva",
            doc="Salt for the element ids matplotlib writes into SVG files.",
            parser=str,
        )
        tariff_bootstrap = Option(
            default="100",
            doc="Number of resampled records per cause in the Tariff reference pools.",
            parser=int,
        )
        tariff_reference = Option(
            default="cause",
            doc="Rank scores against the true-cause pool (cause) or the whole resample (pooled).",
            parser=ChoiceOf(str, choices=["cause", "pooled"]),
        )
        threads = Option(
            default="1",
            doc="Number of worker threads for per-record work.",
            parser=int,
        )


class PyvaConfigManager(ConfigManager):
    """
    Custom ConfigManager for pyva, with a predefined hierarchy and
    support for injecting run-specific configuration.
    """

    _XDG_CONFIG_HOME = os.environ.get("XDG_CONFIG_HOME", "~/.config")
    """str : The XDG configuration directory."""
    _CONFIG_FILES = [
        str(f)
        for f in [
            os.environ.get("PYVA_CONFIG_FILE"),
            pathlib.Path(f"{_XDG_CONFIG_HOME}/pyva.yaml").expanduser(),
            pathlib.Path(f"{_XDG_CONFIG_HOME}/pyva/pyva.yaml").expanduser(),
            pathlib.Path("~/.pyva.yaml").expanduser(),
        ]
        if f
    ]
    """List[str] : The list of configuration files to check for user configuration."""

    @classmethod
    def from_pyva_cfg(cls, run_specific_cfg=None):
        """
        Create a PyvaConfigManager with the appropriate hierarchy.

        Parameters
        ----------
        run_specific_cfg : dict
            Optional. Overrides specific values for this run. ``None`` values are ignored,
            so unset command-line switches fall through to lower levels.
        """
        # Keys are looked up with the namespace prefix, like environment variables.
        run_specific_cfg = {
            f"pyva_{key}": str(value)
            for key, value in (run_specific_cfg or {}).items()
            if value is not None
        }
        run_specific = ConfigDictEnv(run_specific_cfg)
        env_vars = ConfigOSEnv()
        user_file = ConfigYamlEnv(cls._CONFIG_FILES)
        # Environments are searched in order, first hit wins:
        manager = cls(
            environments=[run_specific, env_vars, user_file],
        )
        manager = manager.with_namespace("pyva").with_options(PyvaConfig)
        return manager

    # NOTE: the parent implementation explicitly uses ConfigManager (not cls)
    # to create the clone instance.
    def clone(self):
        my_clone = PyvaConfigManager(
            environments=list(self.envs),
            doc=self.doc,
            msg_builder=self.msg_builder,
            with_override=self.with_override,
        )
        my_clone.namespace = list(self.namespace)
        my_clone.bound_component = self.bound_component
        my_clone.bound_component_prefix = []
        my_clone.bound_component_options = self.bound_component_options

        my_clone.original_manager = self.original_manager

        return my_clone

    def __repr__(self) -> str:
        if self.bound_component:
            name = _get_component_name(self.bound_component)
            return f"<PyvaConfigManager({name}): namespace:{self.get_namespace()}>"
        else:
            return f"<PyvaConfigManager: namespace:{self.get_namespace()}>"

    def get(self, key, default=None, parser=None):
        """
        Get a configuration value by key, with a default value.

        Parameters
        ----------
        key : str
            The configuration key to get.
        default : Any
            The default value to return if the key is not found.
        parser : Callable
            Optional. A callable to parse the configuration value.

        Returns
        -------
        Any
            The configuration value.
        """
        try:
            return self(key, parser=parser)
        except InvalidKeyError:
            return default

