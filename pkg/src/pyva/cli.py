import os
import pathlib
import sys

import rich_click as click
import yaml
from click_loguru import ClickLoguru
from rich.traceback import install as rich_traceback_install

from . import _version
from .coders import CoderFactory, CodingResult
from .consistency.datacheck import VARIANTS
from .core.context import RunContext
from .core.exceptions import ConfigurationError, PyvaError
from .core.logging import add_report_logger, logger
from .core.manifest import RunManifest
from .core.pipeline import REFERENCE_PREFIX, Pipeline
from .core.validate import PIPELINE_VALIDATOR
from .dev import toy
from .ingest.phmrc import CUTOFF_MODES, MODULES
from .metrics import KINDS, UNDETERMINED_MODES, summary_lines
from .std_lib import run_step
from .std_lib.steps import FORMATS, SOURCES

MAX_FRAMES = int(os.environ.get("PYVA_ERROR_MAX_FRAMES", 3))
"""
str: The maximum number of frames to show in the traceback if there is an error. Default to 3
"""
# install rich traceback
rich_traceback_install(show_locals=False, max_frames=MAX_FRAMES)

VERSION = _version.get_versions()["version"]

# global constants
LOG_FILE_RETENTION = 3
NAME = "pyva"
RUN_SETTINGS = "pyva.run"
# define the CLI
click_loguru = ClickLoguru(
    NAME,
    VERSION,
    retention=LOG_FILE_RETENTION,
    timer_log_level="info",
)


def _options(**kwargs):
    """Step options without the switches that were not given."""
    return {k: v for k, v in kwargs.items() if v is not None and v not in ((), [])}


def _context(**overrides) -> RunContext:
    settings = dict(click.get_current_context().meta.get(RUN_SETTINGS, {}))
    settings.update({k: v for k, v in overrides.items() if v is not None})
    return RunContext.from_options(**settings)


def _execute(subcommand, step, inputs, output, options, context=None):
    """Run a built-in step and write the run manifest next to its output."""
    context = context or _context()
    add_report_logger()
    inputs = {k: v for k, v in inputs.items() if v is not None and v != []}
    manifest = RunManifest.start(
        VERSION,
        subcommand,
        {**options, "output": output},
        options.get("seed", context.seed),
    )
    for label, value in inputs.items():
        values = value if isinstance(value, list) else [value]
        for i, path in enumerate(values):
            manifest.add_input(label if len(values) == 1 else f"{label}[{i}]", path)
    output = run_step(step, inputs, output, options, context)
    manifest.write(context.manifest_dir or (output if output.is_dir() else output.parent))
    return output


@click_loguru.logging_options
@click.group(name="va", help="pyva - cause-of-death coding for verbal autopsy data")
@click_loguru.stash_subcommand()
@click.version_option(version=VERSION, prog_name=NAME)
@click.option("--seed", type=int, default=None, help="Master seed for every random number generator.")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker threads.")
@click.option(
    "--manifest-dir",
    type=click.Path(file_okay=False),
    default=None,
    help="Write run manifests here instead of next to the outputs.",
)
@click.pass_context
def cli(ctx, verbose, quiet, logfile, profile_mem, seed, threads, manifest_dir):
    ctx.meta[RUN_SETTINGS] = {
        "seed": seed,
        "threads": threads,
        "manifest_dir": manifest_dir,
        "quiet": True if quiet else None,
    }
    return 0


################################################################################
# Direct Commands
################################################################################


@cli.command()
@click_loguru.init_logger()
@click.argument("source", type=click.Choice(SOURCES))
@click.option("--module", type=click.Choice(MODULES), default="adult", show_default=True)
@click.option("--rows", type=click.IntRange(min=0), default=None, help="Read at most this many records.")
@click.option("--url", default=None, help="Override the download location.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def fetch(source, module, rows, url, output):
    """Download a public VA dataset."""
    output = pathlib.Path(output or f"{source}_{module}.csv")
    _execute("fetch", "fetch", {}, output, _options(source=source, module=module, rows=rows, url=url))
    return 0


@cli.command()
@click_loguru.init_logger()
@click.argument("data", type=click.Path(exists=True, dir_okay=False))
@click.option("--from", "fmt", type=click.Choice(FORMATS), required=True, help="Input layout.")
@click.option("--cutoff", type=click.Choice(CUTOFF_MODES), default=None, help="PHMRC cutoff mode.")
@click.option("--cutoffs", type=click.Path(exists=True, dir_okay=False), default=None, help="PHMRC cutoff table.")
@click.option("--symptoms", type=click.Path(exists=True, dir_okay=False), default=None, help="PHMRC symptom table.")
@click.option("--report", type=click.Path(dir_okay=False), default=None, help="PHMRC per-symptom report CSV.")
@click.option(
    "--reference",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Symptom report to diff the PHMRC report against.",
)
@click.option("--cause-column", default=None, help="Column holding cause labels.")
@click.option("--id-column", default=None)
@click.option("--yes", multiple=True, help="Label meaning Yes (repeatable).")
@click.option("--no", multiple=True, help="Label meaning No (repeatable).")
@click.option("--missing", multiple=True, help="Label meaning Missing (repeatable).")
@click.option("--lenient/--strict", default=None, help="Coerce unknown tokens to Missing.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
def convert(
    data, fmt, cutoff, cutoffs, symptoms, report, reference, cause_column, id_column, yes, no, missing, lenient, output
):
    """Convert survey exports into the canonical symptom CSV."""
    options = _options(
        cutoff=cutoff,
        report=report,
        cause_column=cause_column,
        id_column=id_column,
        yes=list(yes),
        no=list(no),
        missing=list(missing),
        lenient=lenient,
    )
    options["from"] = fmt
    inputs = {"data": data, "cutoffs": cutoffs, "symptoms": symptoms, "reference": reference}
    _execute("convert", "convert", inputs, pathlib.Path(output), options)
    return 0


@cli.command()
@click_loguru.init_logger()
@click.argument("data", type=click.Path(exists=True, dir_okay=False))
@click.option("--hierarchy", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--policy", type=click.Choice(VARIANTS), default="interva5", show_default=True)
@click.option(
    "--passes",
    type=click.IntRange(min=1),
    default=2,
    show_default=True,
    help="Minimum passes; more are made until one changes nothing.",
)
@click.option("--strict-hierarchy", "strict", is_flag=True, help="Do not drop relations on absent symptoms.")
@click.option("--log", "log", type=click.Path(dir_okay=False), default=None, help="Change log CSV.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
def check(data, hierarchy, policy, passes, strict, log, output):
    """Resolve contradictions against the symptom hierarchy."""
    options = _options(policy=policy, passes=passes, strict=strict, log=log)
    _execute("check", "check", {"data": data, "hierarchy": hierarchy}, pathlib.Path(output), options)
    return 0


@cli.command()
@click_loguru.init_logger()
@click.argument("codes", type=click.Path(exists=True, dir_okay=False))
@click.option("--mapping", type=click.Path(exists=True, dir_okay=False), default=None, help="cause,category CSV.")
@click.option("--unknown", default=None, help="Label of the Unknown code.")
@click.option("--tol", type=float, default=None)
@click.option("--max-itr", type=click.IntRange(min=1), default=None)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default="debias.csv", show_default=True)
def debias(codes, mapping, unknown, tol, max_itr, output):
    """Aggregate physician codes into per-death category distributions."""
    options = _options(unknown=unknown, tol=tol, max_itr=max_itr)
    _execute("debias", "debias", {"codes": codes, "mapping": mapping}, pathlib.Path(output), options)
    return 0


@cli.command()
@click_loguru.init_logger()
@click.argument("data", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", type=click.Choice(sorted(CoderFactory.names())), required=True)
@click.option("--train", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--train-causes", default=None, help="Cause column of the training data.")
@click.option("--probbase", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--prior", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--remove-impossible/--keep-impossible", default=None)
@click.option("--convert-type", type=click.Choice(["quantile", "fixed", "empirical"]), default=None)
# InterVA
@click.option("--version", "interva_version", type=click.Choice(["4.02", "4.03", "5"]), default=None)
@click.option("--hiv", type=click.Choice(["h", "l", "v"]), default=None)
@click.option("--malaria", type=click.Choice(["h", "l", "v"]), default=None)
@click.option("--interva-rule/--no-interva-rule", default=None)
# NBC
@click.option("--alpha", type=float, default=None)
@click.option("--skip-missing", is_flag=True, default=None)
@click.option("--uniform-prior", is_flag=True, default=None)
# Tariff
@click.option("--bootstrap", type=click.IntRange(min=1), default=None)
@click.option("--reference", type=click.Choice(["cause", "pooled"]), default=None)
# InSilicoVA
@click.option("--nsim", type=click.IntRange(min=1), default=None)
@click.option("--thin", type=click.IntRange(min=1), default=None)
@click.option("--burnin", "burnin_fraction", type=float, default=None, help="Burn-in fraction.")
@click.option("--auto-length/--fixed-length", default=None)
@click.option("--indiv-ci", type=float, default=None)
@click.option("--subpop", default=None, help="Comma separated sub-population columns.")
@click.option("--reestimate-levels/--fixed-levels", default=None)
@click.option("--keep-draws/--no-draws", default=None)
@click.option("--phy-debias", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--phy-codes", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--phy-cat", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--phy-external", default=None)
@click.option("--phy-unknown", default=None)
@click.option("-o", "--output", type=click.Path(file_okay=False), required=True)
def code(data, model, train, train_causes, probbase, prior, phy_debias, phy_codes, phy_cat, interva_version, output, **kwargs):
    """Assign causes of death with one of the coders."""
    options = _options(model=model, train_cause_column=train_causes, version=interva_version, **kwargs)
    inputs = {
        "data": data,
        "train": train,
        "probbase": probbase,
        "prior": prior,
        "phy_debias": phy_debias,
        "phy_codes": phy_codes,
        "phy_cat": phy_cat,
    }
    _execute("code", "code", inputs, pathlib.Path(output), options)
    return 0


@cli.command()
@click_loguru.init_logger()
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--truth-causes", default="Cause", show_default=True, help="Cause column of the truth file.")
@click.option("--undetermined", type=click.Choice(UNDETERMINED_MODES), default="drop", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default="accuracy.csv", show_default=True)
def evaluate(paths, truth_causes, undetermined, output):
    """CSMF accuracy of RESULT_DIR... against the labels of the last path."""
    if len(paths) < 2:
        raise click.UsageError("Give at least one result directory and a truth file")
    inputs = {"results": list(paths[:-1]), "truth": paths[-1]}
    options = _options(truth_column=truth_causes, undetermined=undetermined)
    output = _execute("evaluate", "evaluate", inputs, pathlib.Path(output), options)
    for line in pathlib.Path(output).read_text().splitlines()[1:]:
        click.echo(line)
    return 0


@cli.command()
@click_loguru.init_logger()
@click.argument("results", nargs=-1, required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--kind", type=click.Choice(KINDS), default="bar", show_default=True)
@click.option("--top", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--grouping", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--order-group", default=None, help="Comma separated group order.")
@click.option("--causelist", default=None, help="Comma separated causes to draw.")
@click.option("--which-sub", default=None, help="Sub-population to draw.")
@click.option("--title", default=None)
@click.option("--name", default=None, help="Base name of the SVG and CSV files.")
@click.option("-o", "--output", type=click.Path(file_okay=False), default="figs", show_default=True)
def plot(results, kind, top, grouping, order_group, causelist, which_sub, title, name, output):
    """Draw CSMF charts (SVG plus the plotted numbers as CSV)."""
    options = _options(
        kind=kind,
        top=top,
        order_group=order_group,
        causelist=causelist,
        which_sub=which_sub,
        title=title,
        name=name,
    )
    _execute("plot", "plot", {"results": list(results), "grouping": grouping}, pathlib.Path(output), options)
    return 0


@cli.command()
@click_loguru.init_logger()
@click.argument("result", type=click.Path(exists=True, file_okay=False))
@click.option("--id", "death", default=None, help="Show the top causes of one death.")
@click.option("--top", type=click.IntRange(min=1), default=5, show_default=True)
def summary(result, death, top):
    """Print the top CSMFs of a result directory."""
    for line in summary_lines(CodingResult.load(result), top, death):
        click.echo(line)
    return 0


@cli.command()
@click_loguru.init_logger()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
def pipeline(config_file):
    """Run the stages of a pipeline file in order."""
    add_report_logger()
    config_file = pathlib.Path(config_file).resolve()
    logger.info(f"Processing {config_file}")
    pipe = Pipeline.from_yaml(config_file)
    base_dir = config_file.parent / pipe.general.get("workdir", ".")
    settings = click.get_current_context().meta.get(RUN_SETTINGS, {})
    context = _context(
        seed=settings.get("seed") if settings.get("seed") is not None else pipe.general.get("seed"),
        threads=settings.get("threads") or pipe.general.get("threads"),
        manifest_dir=settings.get("manifest_dir") or pipe.general.get("manifest_dir"),
        base_dir=base_dir,
    )
    manifest = RunManifest.start(VERSION, "pipeline", {"name": pipe.name, "config": config_file}, context.seed)
    manifest.add_input("config", config_file)
    for stage in pipe.stages:
        for key, value in stage.inputs.items():
            for item in value if isinstance(value, list) else [value]:
                path = context.resolve(item)
                if not item.startswith(REFERENCE_PREFIX) and path.exists():
                    manifest.add_input(f"{stage.name}.{key}", path)
    logger.info(str(pipe))
    pipe.run(context)
    manifest.write(context.manifest_dir or context.base_dir)
    return 0


################################################################################
# SUBCOMMANDS
################################################################################
@click_loguru.logging_options
@click.group()
@click_loguru.stash_subcommand()
@click.version_option(version=VERSION, prog_name=NAME)
def validate(verbose, quiet, logfile, profile_mem):
    return 0


@click_loguru.logging_options
@click.group()
@click_loguru.stash_subcommand()
@click.version_option(version=VERSION, prog_name=NAME)
def develop(verbose, quiet, logfile, profile_mem):
    return 0


################################################################################
# COMMANDS FOR validate
################################################################################


@validate.command()
@click_loguru.logging_options
@click_loguru.init_logger()
@click.argument("config_file", type=click.Path(exists=True))
def config(config_file, verbose, quiet, logfile, profile_mem):
    logger.info(f"Checking if a pipeline can be built from {config_file}")
    with open(config_file, "r") as f:
        try:
            cfg = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"{config_file} is not valid YAML: {e}") from e
    if not PIPELINE_VALIDATOR.validate(cfg):
        for key, error in PIPELINE_VALIDATOR.errors.items():
            logger.error(f"{key}: {error}")
        raise ConfigurationError(f"Configuration {config_file} does not match the pipeline schema")
    pipe = Pipeline.from_dict(cfg)
    logger.success(f"Configuration {config_file} is valid: {len(pipe.stages)} stage(s)")
    return 0


################################################################################
# COMMANDS FOR develop
################################################################################


@develop.command("toy-data")
@click_loguru.logging_options
@click_loguru.init_logger()
@click.argument("directory", type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=toy.SEED, show_default=True)
def toy_data(directory, seed, verbose, quiet, logfile, profile_mem):
    """Write the deterministic toy dataset into DIRECTORY."""
    for path in toy.write_toy_data(directory, seed):
        click.echo(str(path))
    return 0


################################################################################
# Defined subcommands
################################################################################

cli.add_command(develop)
cli.add_command(validate)


def run(argv=None) -> int:
    """
    Run the command line with ``argv`` and return the exit code.

    Usage errors exit with 1, :class:`~pyva.core.exceptions.PyvaError`
    with its own exit code and any other ``OSError`` with 2; errors are
    reported as one ``pyva-error ...`` line on stderr.
    """
    try:
        rv = cli.main(
            args=list(sys.argv[1:] if argv is None else argv),
            prog_name="va",
            standalone_mode=False,
            auto_envvar_prefix="PYVA",
        )
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except PyvaError as e:
        logger.debug(f"{type(e).__name__}: {e}")
        click.echo(e.one_line(), err=True)
        return e.exit_code
    except OSError as e:
        click.echo(f"pyva-error code=io exit=2: {' '.join(str(e).split())}", err=True)
        return 2
    return rv if isinstance(rv, int) else 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
