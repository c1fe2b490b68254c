"""
Downloads the first rows of the public PHMRC data.
"""

import os

import numpy as np
import pytest

from pyva.cli import run
from pyva.ingest.phmrc import convert_phmrc_with_report, diff_symptom_reports, fetch_phmrc
from pyva.model.io import read_symptom_csv

pytestmark = [
    pytest.mark.network,
    pytest.mark.skipif(
        not os.environ.get("PYVA_RUN_NETWORK_TESTS"), reason="set PYVA_RUN_NETWORK_TESTS=1 to download data"
    ),
]


def test_fetch_and_convert_child(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(["fetch", "phmrc", "--module", "child", "--rows", "50", "-o", "child.csv"]) == 0
    assert run(["convert", "child.csv", "--from", "phmrc-child", "-o", "child_va.csv"]) == 0
    data, extras = read_symptom_csv(tmp_path / "child_va.csv", extra_columns=["Cause"])
    assert data.n_records == 50
    assert extras["Cause"].str.len().gt(0).all()


@pytest.fixture(scope="module")
def adult_first_1000():
    return fetch_phmrc("adult", rows=1000)


@pytest.mark.parametrize("cutoff, yes, no", [("default", 21023, 124644), ("adapt", 21711, 123956)])
def test_adult_tallies(adult_first_1000, tmp_path, cutoff, yes, no):
    data, _, report = convert_phmrc_with_report(adult_first_1000, "adult", cutoff=cutoff)
    report.to_csv(tmp_path / f"adult_{cutoff}.symptoms.csv", index=False)
    tallies = data.tallies()
    assert data.n_symptoms == 168
    assert tallies["Missing"] == 22333
    np.testing.assert_allclose([tallies["Yes"], tallies["No"]], [yes, no], rtol=0.02)


def test_adult_missingness_ignores_cutoffs(adult_first_1000, tmp_path):
    _, _, default = convert_phmrc_with_report(adult_first_1000, "adult", cutoff="default")
    _, _, adapted = convert_phmrc_with_report(adult_first_1000, "adult", cutoff="adapt")
    diff = diff_symptom_reports(adapted, default)
    diff.to_csv(tmp_path / "adult_adapt_vs_default.csv", index=False)
    assert (diff["status"] == "both").all()
    assert (diff["Missing_diff"] == 0).all()
