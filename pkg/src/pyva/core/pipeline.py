"""
Pipeline of coding stages.

A pipeline file is YAML with an optional ``general`` section and an ordered
list of ``stages``. Each stage names the step it ``uses`` (one of the
functions in :mod:`pyva.std_lib`, or a Python qualname with the same
signature), its ``inputs``, its ``output`` path and step ``options``. An input
value of ``"@name"`` refers to the output of the earlier stage ``name``::

    general:
      seed: 1
    stages:
      - name: convert
        uses: convert
        inputs: {data: raw.csv}
        output: work/data.csv
        options: {from: who2016}
      - name: code
        uses: code
        inputs: {data: "@convert", probbase: probbase.csv, prior: prior.csv}
        output: work/interva
        options: {model: interva}

Code stages with a stochastic model (insilico, tariff) need a seed, either in
``general`` or in the stage options.
"""

import pathlib
from dataclasses import dataclass, field

import randomname
import yaml

from .exceptions import ConfigurationError, PyvaError
from .logging import add_to_report_log, logger
from .utils import get_callable_by_name, require_file
from .validate import PIPELINE_VALIDATOR

REFERENCE_PREFIX = "@"
SEEDED_MODELS = ("insilico", "tariff")


@dataclass(frozen=True)
class Stage:
    name: str
    uses: str
    output: str
    inputs: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data):
        return cls(
            name=data["name"],
            uses=data["uses"],
            output=data["output"],
            inputs=dict(data.get("inputs") or {}),
            options=dict(data.get("options") or {}),
        )

    def references(self):
        """Names of the stages whose outputs this stage consumes."""
        for value in self.inputs.values():
            values = value if isinstance(value, list) else [value]
            for item in values:
                if isinstance(item, str) and item.startswith(REFERENCE_PREFIX):
                    yield item[len(REFERENCE_PREFIX) :]

    @property
    def step(self):
        from ..std_lib import STEPS

        if self.uses in STEPS:
            return STEPS[self.uses]
        return get_callable_by_name(self.uses)


class Pipeline:
    def __init__(self, *stages, name=None, general=None):
        self._stages = tuple(stages)
        self.general = dict(general or {})
        self.name = name or self.general.get("name") or randomname.get_name()
        self._check_stages()
        self._check_seeds()

    def __str__(self):
        name_header = f"Pipeline: {self.name}"
        name_uline = "-" * len(name_header)
        stage_header = "stages"
        stage_uline = "-" * len(stage_header)
        r_val = [name_header, name_uline, stage_header, stage_uline]
        for i, stage in enumerate(self.stages):
            r_val.append(f"[{i+1}/{len(self.stages)}] {stage.name} ({stage.uses})")
        return "\n".join(r_val)

    @property
    def stages(self):
        return self._stages

    def _check_stages(self):
        seen = set()
        for stage in self._stages:
            if stage.name in seen:
                raise ConfigurationError(f"Duplicate stage name {stage.name!r}")
            for ref in stage.references():
                if ref == stage.name:
                    raise ConfigurationError(
                        f"Stage {stage.name!r} refers to its own output"
                    )
                if ref not in seen:
                    # Either unknown, or a later stage: both make the order cyclic.
                    known = {s.name for s in self._stages}
                    kind = "a later stage" if ref in known else "an unknown stage"
                    raise ConfigurationError(
                        f"Stage {stage.name!r} refers to {kind} {ref!r}; "
                        "stages may only use outputs of earlier stages"
                    )
            seen.add(stage.name)

    def _check_seeds(self):
        if self.general.get("seed") is not None:
            return
        for stage in self._stages:
            model = str(stage.options.get("model", "")).lower()
            if stage.uses == "code" and model in SEEDED_MODELS and stage.options.get("seed") is None:
                raise ConfigurationError(
                    f"Stage {stage.name!r} runs {model} and needs a seed "
                    "(general.seed or options.seed)"
                )

    @classmethod
    def from_dict(cls, data):
        data = data or {}
        if not PIPELINE_VALIDATOR.validate(data):
            errors = "; ".join(
                f"{key}: {error}" for key, error in PIPELINE_VALIDATOR.errors.items()
            )
            raise ConfigurationError(f"Invalid pipeline configuration: {errors}")
        general = data.get("general") or {}
        stages = [Stage.from_dict(s) for s in data.get("stages") or []]
        return cls(*stages, general=general)

    @classmethod
    def from_yaml(cls, path):
        path = require_file(path, "pipeline configuration")
        with open(path) as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigurationError(f"{path} is not valid YAML: {e}") from e
        return cls.from_dict(data)

    def _resolve_inputs(self, stage, outputs, context):
        resolved = {}
        for key, value in stage.inputs.items():
            values = value if isinstance(value, list) else [value]
            paths = []
            for item in values:
                if item.startswith(REFERENCE_PREFIX):
                    paths.append(outputs[item[len(REFERENCE_PREFIX) :]])
                else:
                    paths.append(require_file(context.resolve(item), f"{stage.name}.{key}"))
            resolved[key] = paths if isinstance(value, list) else paths[0]
        return resolved

    def run(self, context):
        """
        Run all stages in order.

        Returns
        -------
        dict
            Stage name to output path.
        """
        outputs = {}
        logger.info(f"Running pipeline {self.name} with {len(self.stages)} stage(s)")
        for i, stage in enumerate(self.stages):
            logger.info(f"[{i+1}/{len(self.stages)}] {stage.name} ({stage.uses})")
            try:
                inputs = self._resolve_inputs(stage, outputs, context)
                output = context.resolve(stage.output)
                outputs[stage.name] = pathlib.Path(
                    stage.step(inputs, output, dict(stage.options), context)
                )
            except (PyvaError, OSError) as e:
                self.on_failure(stage, e)
                e.args = (f"stage {stage.name!r} ({stage.uses}) failed: {e}",)
                raise
        self.on_completion(outputs)
        return outputs

    @staticmethod
    @add_to_report_log
    def on_completion(outputs):
        for name, path in outputs.items():
            logger.success(f"{name}: {path}")

    @staticmethod
    @add_to_report_log
    def on_failure(stage, error):
        logger.error(f"Stage {stage.name} failed: {error}")
