import numpy as np
import pytest

from pyva.core.exceptions import FormatError, TokenError
from pyva.model.types import (
    CauseList,
    CondProbMatrix,
    CSMFEstimate,
    IndivProbResult,
    PriorCSMF,
    SymptomMatrix,
    SymptomValue,
)


def test_from_tokens_maps_canonical_values():
    data = SymptomMatrix.from_tokens(("a", "b"), ("s1", "s2"), [["Y", ""], [".", "Y"]])
    assert data.values.tolist() == [[1, 0], [-1, 1]]
    assert data.to_tokens().tolist() == [["Y", ""], [".", "Y"]]


def test_from_tokens_rejects_other_tokens():
    with pytest.raises(TokenError) as excinfo:
        SymptomMatrix.from_tokens(("a",), ("s1", "s2"), [["yes", "N"]])
    assert excinfo.value.tokens == ["N", "yes"]


def test_symptom_value_token():
    assert SymptomValue.YES.token == "Y"
    assert SymptomValue.from_token("") is SymptomValue.NO
    with pytest.raises(TokenError):
        SymptomValue.from_token("n")


def test_values_are_read_only(small_matrix):
    with pytest.raises(ValueError):
        small_matrix.values[0, 0] = 0


def test_shape_mismatch():
    with pytest.raises(FormatError):
        SymptomMatrix(("a", "b"), ("s1",), np.zeros((1, 1)))


def test_out_of_range_values():
    with pytest.raises(FormatError):
        SymptomMatrix(("a",), ("s1",), np.array([[2]]))


def test_empty_id():
    with pytest.raises(FormatError):
        SymptomMatrix(("",), ("s1",), np.array([[1]]))


def test_tallies_cover_every_cell(small_matrix):
    tallies = small_matrix.tallies()
    assert tallies == {"Yes": 3, "No": 3, "Missing": 3}
    assert sum(tallies.values()) == small_matrix.n_records * small_matrix.n_symptoms


def test_select_and_take(small_matrix):
    sub = small_matrix.select(["rash", "fever"]).take([1])
    assert sub.ids == ("d2",)
    assert sub.symptoms == ("rash", "fever")
    assert sub.values.tolist() == [[1, 0]]


def test_to_frame_puts_id_first(small_matrix):
    frame = small_matrix.to_frame()
    assert list(frame.columns) == ["ID", "fever", "cough", "rash"]


def test_unknown_symptom(small_matrix):
    with pytest.raises(KeyError):
        small_matrix.column("headache")


def test_cause_list_rules():
    assert list(CauseList(("a", "b"), "Undetermined").with_undetermined) == ["a", "b", "Undetermined"]
    with pytest.raises(FormatError):
        CauseList(("a", "a"))
    with pytest.raises(FormatError):
        CauseList(("a",))
    with pytest.raises(FormatError):
        CauseList(("a", "Undetermined"), "Undetermined")


def test_condprob_range():
    with pytest.raises(FormatError):
        CondProbMatrix(("s",), ("a", "b"), [[0.5, 1.5]])


def test_condprob_select(two_cause_probs):
    sub = two_cause_probs.select_symptoms(["rash"]).select_causes(["pneumonia"])
    assert sub.values.tolist() == [[0.05]]


def test_prior_is_normalized():
    prior = PriorCSMF(("a", "b", "c"), [2.0, 1.0, 1.0])
    np.testing.assert_allclose(prior.weights, [0.5, 0.25, 0.25])
    with pytest.raises(FormatError):
        PriorCSMF(("a", "b"), [0.0, 0.0])
    with pytest.raises(FormatError):
        PriorCSMF(("a", "b"), [1.0, -1.0])


def test_indiv_rows_sum_to_one():
    IndivProbResult(("d1",), ("a", "b"), [[0.25, 0.75]])
    with pytest.raises(FormatError):
        IndivProbResult(("d1",), ("a", "b"), [[0.25, 0.5]])


def test_indiv_quantile_order():
    point = np.array([[0.5, 0.5]])
    quantiles = {"mean": point, "median": point, "lower": point + 0.1, "upper": point + 0.2}
    with pytest.raises(FormatError):
        IndivProbResult(("d1",), ("a", "b"), point, quantiles, 0.95)


def test_indiv_ranking_keeps_order_on_ties():
    indiv = IndivProbResult(("d1",), ("a", "b", "c"), [[0.25, 0.5, 0.25]])
    assert indiv.ranking().tolist() == [[1, 0, 2]]


def test_indiv_to_xarray():
    indiv = IndivProbResult(("d1", "d2"), ("a", "b"), [[0.25, 0.75], [1.0, 0.0]])
    array = indiv.to_xarray()
    assert array.dims == ("id", "cause", "statistic")
    assert float(array.sel(id="d1", cause="b", statistic="point")) == 0.75


def test_csmf_must_sum_to_one():
    with pytest.raises(FormatError):
        CSMFEstimate(("a", "b"), {"All": [0.5, 0.6]})


def test_csmf_frame():
    csmf = CSMFEstimate(("a", "b"), {"All": [0.25, 0.75]})
    frame = csmf.to_frame()
    assert list(frame.columns) == ["group", "cause", "CSMF"]
    assert csmf.series().to_dict() == {"a": 0.25, "b": 0.75}
