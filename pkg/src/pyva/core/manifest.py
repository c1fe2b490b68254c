"""
Run manifests: a YAML record of what produced a set of outputs.

Every command writes ``run_manifest.yaml`` next to its outputs (or into
``--manifest-dir``) with the tool version, the resolved options, SHA-256
digests of the inputs, the seed and start/end timestamps.
"""

import pathlib
from dataclasses import asdict, dataclass, field

import pendulum
import yaml

from .logging import logger
from .utils import file_digest, write_text_atomic

MANIFEST_NAME = "run_manifest.yaml"


def _plain(value):
    """Make option values YAML friendly (paths, tuples, numpy scalars)."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, pathlib.PurePath):
        return str(value)
    if hasattr(value, "item") and callable(value.item):
        return value.item()
    return value


@dataclass
class RunManifest:
    version: str
    subcommand: str
    options: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    seed: int = None
    started: str = None
    finished: str = None

    @classmethod
    def start(cls, version, subcommand, options=None, seed=None):
        return cls(
            version=version,
            subcommand=subcommand,
            options=_plain(options or {}),
            seed=seed,
            started=pendulum.now("UTC").to_iso8601_string(),
        )

    def add_input(self, label, path):
        path = pathlib.Path(path)
        self.inputs[label] = {"path": str(path), "sha256": file_digest(path)}

    def finish(self):
        self.finished = pendulum.now("UTC").to_iso8601_string()
        return self

    @property
    def duration(self):
        if self.started is None or self.finished is None:
            return None
        return pendulum.parse(self.finished) - pendulum.parse(self.started)

    def write(self, directory):
        if self.finished is None:
            self.finish()
        path = pathlib.Path(directory) / MANIFEST_NAME
        write_text_atomic(path, yaml.safe_dump(asdict(self), sort_keys=False))
        logger.debug(f"Wrote run manifest {path}")
        return path

    @classmethod
    def read(cls, path):
        path = pathlib.Path(path)
        if path.is_dir():
            path = path / MANIFEST_NAME
        with open(path) as f:
            return cls(**yaml.safe_load(f))
