import io

import pandas as pd
import pytest
import requests

from pyva.core.exceptions import ConfigurationError, FetchError, FormatError, SchemaError
from pyva.ingest.phmrc import (
    PhmrcCutoffTable,
    PhmrcSymptomTable,
    binary_columns,
    category_columns,
    convert_phmrc,
    convert_phmrc_with_report,
    diff_symptom_reports,
    dichotomize,
    fetch_phmrc,
    phmrc_url,
)
from pyva.std_lib import run_step


@pytest.fixture
def child_raw():
    return pd.DataFrame(
        {
            "site": ["AP", "Bohol", "Dar", "Mexico"],
            "module": ["Child"] * 4,
            "gs_text34": ["Pneumonia", "Diarrhea", "Pneumonia", "Malaria"],
            "va34": ["Pneumonia", "Diarrhea", "Pneumonia", "Malaria"],
            "c1_01": ["Yes", "No", "Don't Know", "Yes"],
            "c1_02": ["No", "Refused", "Yes", "No"],
            "c1_03": ["3", "2", "1", "4"],
            "c1_21": ["20", "3", "999", ""],
            "word_fever": ["1", "0", "0", "1"],
        }
    )


@pytest.fixture
def fever_cutoffs():
    return PhmrcCutoffTable(
        pd.DataFrame(
            {"symptom": ["c1_21"], "source_column": ["c1_21"], "comparator": [">="], "cutoff": [14.0]}
        )
    )


def test_binary_columns_skip_meta_and_numeric(child_raw):
    assert binary_columns(child_raw) == ["c1_01", "c1_02"]


def test_dichotomize_treats_missing_codes_as_missing():
    codes = dichotomize(pd.Series(["20", "3", "999", "", "abc"]), ">=", 14)
    assert codes.tolist() == [1, 0, -1, -1, -1]


def test_convert_child(child_raw, fever_cutoffs):
    data, causes = convert_phmrc(child_raw, module="child", cutoff_table=fever_cutoffs)
    assert data.ids == ("1", "2", "3", "4")
    assert data.symptoms == ("c1_01", "c1_02", "c1_21")
    assert data.values.tolist() == [[1, 0, 1], [0, -1, 0], [-1, 1, -1], [1, 0, -1]]
    assert causes.tolist() == ["Pneumonia", "Diarrhea", "Pneumonia", "Malaria"]
    assert causes.index.tolist() == ["1", "2", "3", "4"]


def test_convert_with_id_column(child_raw, fever_cutoffs):
    data, _ = convert_phmrc(child_raw, module="child", cutoff_table=fever_cutoffs, id_column="site")
    assert data.ids == ("AP", "Bohol", "Dar", "Mexico")


def test_adapted_cutoffs(child_raw, fever_cutoffs):
    data, _ = convert_phmrc(child_raw, module="child", cutoff="adapt", cutoff_table=fever_cutoffs)
    # Cause means of c1_21: Diarrhea 3, Pneumonia 20 (999 is a missing code); median 11.5
    assert data.column("c1_21").tolist() == [1, 0, -1, -1]


def test_adapted_cutoffs_need_causes(child_raw, fever_cutoffs):
    with pytest.raises(SchemaError):
        convert_phmrc(
            child_raw.drop(columns="va34"), module="child", cutoff="adapt", cutoff_table=fever_cutoffs
        )
    unlabeled = child_raw.assign(va34=["Pneumonia", "", "Pneumonia", "Malaria"])
    with pytest.raises(ConfigurationError):
        convert_phmrc(unlabeled, module="child", cutoff="adapt", cutoff_table=fever_cutoffs)


def test_missing_source_column(child_raw, fever_cutoffs):
    with pytest.raises(SchemaError):
        convert_phmrc(child_raw.drop(columns="c1_21"), module="child", cutoff_table=fever_cutoffs)


def test_adult_width_is_enforced(child_raw):
    with pytest.raises(SchemaError, match="946 columns"):
        convert_phmrc(child_raw, module="adult")


def test_unknown_module(child_raw):
    with pytest.raises(ConfigurationError):
        convert_phmrc(child_raw, module="elderly")


def test_bundled_cutoff_tables_load():
    for module in ("adult", "child", "neonate"):
        table = PhmrcCutoffTable.default(module)
        assert len(table.table)


def test_phmrc_url_default_and_override(context):
    assert phmrc_url("child").endswith("CHILD_Y2013M09D11_0.csv")
    assert phmrc_url("child", context.config) == phmrc_url("child")


def test_fetch_reads_limited_rows(mocker):
    response = mocker.MagicMock()
    response.raw = io.BytesIO(b"site,c1_01,va34\nAP,Yes,Malaria\nDar,No,Pneumonia\n")
    session = mocker.MagicMock()
    session.get.return_value = response
    raw = fetch_phmrc("child", rows=1, url="https://example.org/child.csv", session=session)
    session.get.assert_called_once_with("https://example.org/child.csv", stream=True, timeout=60)
    assert raw.to_dict("records") == [{"site": "AP", "c1_01": "Yes", "va34": "Malaria"}]


def test_fetch_failure(mocker):
    session = mocker.MagicMock()
    session.get.side_effect = requests.exceptions.ConnectionError("offline")
    with pytest.raises(FetchError) as excinfo:
        fetch_phmrc("child", url="https://example.org/child.csv", session=session)
    assert excinfo.value.url == "https://example.org/child.csv"
    assert excinfo.value.exit_code == 2


def test_fetch_negative_rows():
    with pytest.raises(ConfigurationError):
        fetch_phmrc("child", rows=-1)


@pytest.fixture
def adult_raw():
    """Two adult records with every item the shipped tables read, padded to the full width."""
    sources = [r.source_column for r in PhmrcSymptomTable.default("adult")]
    sources += [r.source_column for r in PhmrcCutoffTable.default("adult")]
    columns = {"site": ["AP", "Dar"], "module": ["Adult", "Adult"], "va34": ["Stroke", "TB"]}
    columns.update({source: ["", ""] for source in dict.fromkeys(sources)})
    columns.update(a1_01_1=["Yes", "No"], a2_04=["Severe", "Don't Know"], a2_01=["30", "3"])
    frame = pd.DataFrame(columns)
    filler = [f"word_{i}" for i in range(946 - frame.shape[1])]
    return pd.concat([frame, pd.DataFrame("", index=frame.index, columns=filler)], axis=1)


def test_adult_symptoms_come_from_the_shipped_tables(adult_raw):
    data, causes = convert_phmrc(adult_raw, module="adult")
    expected = {r.symptom for r in PhmrcSymptomTable.default("adult")}
    expected |= {r.symptom for r in PhmrcCutoffTable.default("adult")}
    assert data.n_symptoms == 168
    assert set(data.symptoms) == expected
    assert data.column("a1_01_1").tolist() == [1, 0]
    assert data.column("a2_04_severe").tolist() == [1, -1]
    assert data.column("a2_04_mild").tolist() == [0, -1]
    assert data.column("a2_01").tolist() == [1, 0]
    assert causes.tolist() == ["Stroke", "TB"]


def test_adult_items_missing_from_the_data(adult_raw):
    with pytest.raises(SchemaError, match="a2_04"):
        convert_phmrc(adult_raw.rename(columns={"a2_04": "word_x"}), module="adult")


def test_detected_category_items(child_raw, fever_cutoffs):
    raw = child_raw.assign(c2_05=["Mild", "Severe", "Don't Know", "Mild"])
    assert category_columns(raw) == ["c2_05"]
    data, _ = convert_phmrc(raw, module="child", cutoff_table=fever_cutoffs)
    assert data.symptoms == ("c1_01", "c1_02", "c2_05_mild", "c2_05_severe", "c1_21")
    assert data.column("c2_05_mild").tolist() == [1, 0, -1, 1]
    assert data.column("c2_05_severe").tolist() == [0, 1, -1, 0]


def test_symptom_table_validation():
    with pytest.raises(FormatError, match="kind"):
        PhmrcSymptomTable(pd.DataFrame({"symptom": ["s"], "source_column": ["s"], "kind": ["scale"], "value": [""]}))
    with pytest.raises(FormatError, match="without an answer"):
        PhmrcSymptomTable(pd.DataFrame({"symptom": ["s"], "source_column": ["s"], "kind": ["category"], "value": [""]}))


def test_symptom_report_counts_every_symptom(adult_raw):
    data, _, report = convert_phmrc_with_report(adult_raw, module="adult")
    assert report["symptom"].tolist() == list(data.symptoms)
    assert (report[["Yes", "No", "Missing"]].sum(axis=1) == data.n_records).all()
    severe = report.set_index("symptom").loc["a2_04_severe"]
    assert (severe.kind, severe.rule, severe.Yes, severe.Missing) == ("category", "Severe", 1, 1)
    assert report.set_index("symptom").loc["a2_01", "rule"] == ">= 21"


def test_diff_against_reference_report(adult_raw):
    _, _, report = convert_phmrc_with_report(adult_raw, module="adult")
    reference = report[["symptom", "Yes", "No", "Missing"]].astype(str)
    reference.loc[reference["symptom"] == "a1_01_1", "Yes"] = "0"
    reference.loc[len(reference)] = ["a9_99", "1", "1", "0"]
    diff = diff_symptom_reports(report, reference).set_index("symptom")
    assert diff.loc["a1_01_1", "Yes_diff"] == 1
    assert diff.loc["a1_01_1", "status"] == "both"
    assert diff.loc["a9_99", "status"] == "only_reference"
    assert (diff.drop(index=["a1_01_1", "a9_99"])[["Yes_diff", "No_diff", "Missing_diff"]] == 0).all().all()


def test_convert_step_writes_symptom_report(tmp_path, child_raw, fever_cutoffs, context):
    child_raw.to_csv(tmp_path / "child.csv", index=False)
    fever_cutoffs.table.to_csv(tmp_path / "cutoffs.csv", index=False)
    run_step(
        "convert",
        {"data": tmp_path / "child.csv", "cutoffs": tmp_path / "cutoffs.csv"},
        tmp_path / "child_va.csv",
        {"from": "phmrc-child"},
        context,
    )
    report = pd.read_csv(tmp_path / "child_va.symptoms.csv")
    assert report["symptom"].tolist() == ["c1_01", "c1_02", "c1_21"]
    assert report["kind"].tolist() == ["yesno", "yesno", "cutoff"]
