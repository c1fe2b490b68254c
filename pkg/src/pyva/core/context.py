"""
Run-wide settings handed to every step: the resolved configuration, the seed
and the degree of parallelism.
"""

import pathlib
from dataclasses import dataclass, field

import numpy as np

from .config import PyvaConfigManager


@dataclass
class RunContext:
    config: PyvaConfigManager
    base_dir: pathlib.Path = field(default_factory=pathlib.Path.cwd)
    manifest_dir: pathlib.Path = None

    @classmethod
    def from_options(cls, seed=None, threads=None, base_dir=None, manifest_dir=None, **extra):
        """
        Build a context whose configuration sees ``seed``, ``threads`` and any
        other non-``None`` keyword as run-specific overrides.
        """
        run_specific = {"seed": seed, "threads": threads, **extra}
        config = PyvaConfigManager.from_pyva_cfg(run_specific)
        return cls(
            config=config,
            base_dir=pathlib.Path(base_dir) if base_dir else pathlib.Path.cwd(),
            manifest_dir=pathlib.Path(manifest_dir) if manifest_dir else None,
        )

    @property
    def seed(self) -> int:
        return self.config("seed")

    @property
    def threads(self) -> int:
        return max(1, self.config("threads"))

    def option(self, key, override=None):
        """``override`` unless it is ``None``, otherwise the configured value of ``key``."""
        if override is not None:
            return override
        return self.config(key)

    def rng(self, seed=None):
        return np.random.default_rng(self.seed if seed is None else seed)

    def resolve(self, path):
        path = pathlib.Path(path).expanduser()
        return path if path.is_absolute() else self.base_dir / path
