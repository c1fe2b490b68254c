import pandas as pd
import pytest

from pyva.coders import CodingResult
from pyva.core.exceptions import ConfigurationError, ModelRequirementError
from pyva.model.io import read_symptom_csv
from pyva.std_lib import STEPS, run_step


def test_steps_are_registered():
    assert sorted(STEPS) == ["check", "code", "convert", "debias", "evaluate", "fetch", "plot"]


def test_convert_canonical_keeps_causes(tmp_path, toy_dir, context):
    output = run_step("convert", {"data": toy_dir / "test.csv"}, tmp_path / "data.csv", {"from": "canonical"}, context)
    data, extras = read_symptom_csv(output, extra_columns=["Cause"])
    assert data.n_records == 200
    assert list(extras.columns) == ["Cause"]


def test_convert_unknown_format(tmp_path, toy_dir, context):
    with pytest.raises(ConfigurationError, match="Unknown input format"):
        run_step("convert", {"data": toy_dir / "test.csv"}, tmp_path / "x.csv", {"from": "sas"}, context)


def test_check_writes_change_log(tmp_path, toy_dir, context):
    output = run_step(
        "check",
        {"data": toy_dir / "test.csv", "hierarchy": toy_dir / "hierarchy.csv"},
        tmp_path / "checked.csv",
        {"policy": "insilico"},
        context,
    )
    log = pd.read_csv(tmp_path / "checked.changes.csv")
    assert output.exists()
    assert {"ID", "symptom"} <= set(log.columns)


def test_code_and_evaluate_interva(tmp_path, toy_dir, context):
    result_dir = run_step(
        "code",
        {"data": toy_dir / "test.csv", "probbase": toy_dir / "probbase.csv", "prior": toy_dir / "prior.csv"},
        tmp_path / "interva",
        {"model": "InterVA"},
        context,
    )
    result = CodingResult.load(result_dir)
    assert result.model == "interva"
    assert (result_dir / "top_cod.csv").exists()
    output = run_step(
        "evaluate", {"results": [result_dir], "truth": toy_dir / "test.csv"}, tmp_path / "accuracy.csv", {}, context
    )
    accuracy = pd.read_csv(output)
    assert accuracy["model"].tolist() == ["interva"]
    assert 0.5 < accuracy["csmf_accuracy"].iloc[0] <= 1.0
    assert (tmp_path / "accuracy.causes.csv").exists()


def test_code_tariff_needs_training(tmp_path, toy_dir, context):
    with pytest.raises(ModelRequirementError):
        run_step("code", {"data": toy_dir / "test.csv"}, tmp_path / "tariff", {"model": "tariff", "seed": 2}, context)


def test_code_nested_options(tmp_path, toy_dir, context):
    result_dir = run_step(
        "code",
        {"data": toy_dir / "test.csv", "train": toy_dir / "train.csv"},
        tmp_path / "tariff",
        {"model": "tariff", "seed": 2, "tariff": {"bootstrap": 20}},
        context,
    )
    result = CodingResult.load(result_dir)
    assert result.options["bootstrap"] == 20
    assert result.options["seed"] == 2


def test_code_unknown_model(tmp_path, toy_dir, context):
    with pytest.raises(ConfigurationError):
        run_step("code", {"data": toy_dir / "test.csv"}, tmp_path / "x", {"model": "eava"}, context)


def test_debias_and_physician_prior(tmp_path, toy_dir, short_chain_context):
    debiased = run_step(
        "debias",
        {"codes": toy_dir / "physician.csv", "mapping": toy_dir / "categories.csv"},
        tmp_path / "debias.csv",
        {},
        short_chain_context,
    )
    frame = pd.read_csv(debiased)
    assert list(frame.columns) == ["ID", "Infectious", "NCD", "External", "Maternal"]
    result_dir = run_step(
        "code",
        {
            "data": toy_dir / "test.csv",
            "probbase": toy_dir / "probbase.csv",
            "phy_debias": debiased,
            "phy_cat": toy_dir / "categories.csv",
        },
        tmp_path / "insilico",
        {"model": "insilico", "keep_draws": False},
        short_chain_context,
    )
    result = CodingResult.load(result_dir)
    assert result.options["physician_prior"] is True
    assert result.draws is None


def test_plot_step(tmp_path, toy_dir, context):
    result_dir = run_step(
        "code",
        {"data": toy_dir / "test.csv", "train": toy_dir / "train.csv"},
        tmp_path / "nbc",
        {"model": "nbc"},
        context,
    )
    figs = run_step(
        "plot",
        {"results": [result_dir], "grouping": toy_dir / "grouping.csv"},
        tmp_path / "figs",
        {"kind": "bar", "top": 3},
        context,
    )
    data = pd.read_csv(figs / "bar.csv")
    assert len(data) == 3
    assert set(data["cause_or_group"]) <= {"Communicable", "Non-communicable", "Injury", "Maternal"}
