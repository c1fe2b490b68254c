import numpy as np
import pandas as pd
import pytest

from pyva.coders.base import CodingResult
from pyva.core.exceptions import MissingInputError, UnsupportedOperationError
from pyva.metrics import get_csmf, get_indiv_prob, get_top_cod, summary_lines
from pyva.model.types import CSMFEstimate, IndivProbResult


@pytest.fixture
def interva_result():
    causes = ("malaria", "pneumonia", "Undetermined")
    indiv = IndivProbResult(("d1", "d2"), causes, [[0.7, 0.0, 0.3], [0.0, 0.6, 0.4]])
    raw = IndivProbResult(("d1", "d2"), causes[:2], [[0.8, 0.2], [0.3, 0.7]])
    return CodingResult(
        model="interva",
        ids=("d1", "d2"),
        causes=causes,
        csmf=CSMFEstimate(causes, {"All": [0.35, 0.3, 0.35]}),
        indiv=indiv,
        raw=raw,
        undetermined="Undetermined",
    )


@pytest.fixture
def tariff_result():
    return CodingResult(
        model="tariff",
        ids=("d1", "d2"),
        causes=("a", "b"),
        csmf=CSMFEstimate(("a", "b"), {"All": [0.5, 0.5]}),
        ranks=np.array([[0.2, 0.5], [0.9, 0.1]]),
    )


def test_get_csmf(interva_result):
    assert get_csmf(interva_result).causes[-1] == "Undetermined"
    without = get_csmf(interva_result, include_undetermined=False)
    assert without.causes == ("malaria", "pneumonia")
    np.testing.assert_allclose(without["All"], [0.55, 0.45])


def test_top_cod(interva_result, tariff_result):
    top = get_top_cod(interva_result)
    assert top["cause"].tolist() == ["malaria", "pneumonia"]
    assert top["score"].tolist() == pytest.approx([0.7, 0.6])
    ranked = get_top_cod(tariff_result)
    assert ranked["cause"].tolist() == ["a", "b"]
    assert ranked["score"].tolist() == pytest.approx([0.2, 0.1])


def test_indiv_prob(interva_result, tariff_result):
    frame = get_indiv_prob(interva_result)
    assert frame.loc["d2", "pneumonia"] == pytest.approx(0.6)
    with pytest.raises(UnsupportedOperationError):
        get_indiv_prob(tariff_result)


def test_summary_lines(interva_result, tariff_result):
    lines = summary_lines(interva_result, top=2)
    assert lines[0] == "interva fit on 2 death(s)"
    assert "Top 2 CSMFs (All):" in lines
    death = summary_lines(interva_result, top=1, death="d1")
    assert death[-1].split() == ["malaria", "0.7000"]
    with pytest.raises(UnsupportedOperationError):
        summary_lines(tariff_result, death="d1")


def test_result_round_trip(tmp_path, interva_result):
    interva_result.save(tmp_path / "out")
    assert (tmp_path / "out" / "indiv_prob_raw.csv").exists()
    again = CodingResult.load(tmp_path / "out")
    assert again.model == "interva"
    assert again.undetermined == "Undetermined"
    np.testing.assert_allclose(again.csmf["All"], [0.35, 0.3, 0.35])
    np.testing.assert_allclose(again.indiv.point, interva_result.indiv.point)
    pd.testing.assert_frame_equal(get_top_cod(again), get_top_cod(interva_result))


def test_load_needs_result_file(tmp_path):
    with pytest.raises(MissingInputError):
        CodingResult.load(tmp_path)
