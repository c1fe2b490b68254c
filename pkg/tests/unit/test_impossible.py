import numpy as np
import pytest

from pyva.coders import CoderFactory
from pyva.consistency.impossible import remove_impossible_causes
from pyva.core.exceptions import InconsistencyError
from pyva.model.types import CondProbMatrix, SymptomMatrix


@pytest.fixture
def sex_probs():
    return CondProbMatrix(
        ("male", "female", "fever"),
        ("a", "b", "maternal"),
        np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 1.0], [0.3, 0.3, 0.3]]),
    )


def test_maternal_cause_impossible_for_men(sex_probs):
    data = SymptomMatrix(("m", "f"), ("male", "female", "fever"), np.array([[1, 0, 1], [0, 1, -1]]))
    result = remove_impossible_causes(data, sex_probs)
    assert result.possible.tolist() == [[True, True, False], [True, True, True]]
    assert result.removed == ()
    assert result.kept == ("a", "b", "maternal")


def test_cause_removed_when_impossible_for_everyone(sex_probs):
    data = SymptomMatrix(("m1", "m2"), ("male", "female", "fever"), np.array([[1, 0, 1], [1, -1, 0]]))
    result = remove_impossible_causes(data, sex_probs)
    assert result.removed == ("maternal",)
    assert result.kept_mask().shape == (2, 2)


def test_missing_demographics_rule_nothing_out(sex_probs):
    data = SymptomMatrix(("x",), ("male", "female", "fever"), np.array([[-1, -1, 1]]))
    assert remove_impossible_causes(data, sex_probs).possible.all()


def test_contradictory_record_keeps_every_cause():
    probs = CondProbMatrix(("male", "female"), ("a", "b"), np.array([[0.5, 0.0], [0.0, 0.5]]))
    data = SymptomMatrix(
        ("m", "both", "f"), ("male", "female"), np.array([[1, 0], [1, 1], [0, 1]])
    )
    result = remove_impossible_causes(data, probs)
    assert result.possible.tolist() == [[True, False], [True, True], [False, True]]


def test_every_cause_impossible():
    probs = CondProbMatrix(("male",), ("a", "b"), np.array([[0.0, 0.0]]))
    data = SymptomMatrix(("m",), ("male",), np.array([[1]]))
    with pytest.raises(InconsistencyError):
        remove_impossible_causes(data, probs)


@pytest.fixture
def men_only(toy_test):
    return toy_test.take(np.flatnonzero(toy_test.column("male") == 1))


@pytest.mark.parametrize(
    "model, options",
    [
        pytest.param("interva", {"interva_rule": False}, id="interva"),
        pytest.param("nbc", {}, id="nbc"),
        pytest.param("tariff", {"bootstrap": 20}, id="tariff"),
    ],
)
def test_every_coder_rules_out_maternal_deaths_of_men(
    context, toy_dir, toy_train, toy_train_labels, men_only, model, options
):
    coder = CoderFactory.get(model)(context=context, remove_impossible=True, **options)
    result = coder.code(
        men_only, train=toy_train, train_labels=toy_train_labels, probbase=toy_dir / "probbase.csv"
    )
    c5 = list(result.causes).index("c5")
    assert result.csmf["All"][c5] == 0
    if result.indiv is not None:
        np.testing.assert_array_equal(result.indiv.point[:, c5], 0.0)
    else:
        assert np.isinf(result.ranks[:, c5]).all()


def test_insilico_draws_skip_maternal_deaths_of_men(short_chain_context, toy_dir, men_only):
    coder = CoderFactory.get("insilico")(context=short_chain_context)
    result = coder.code(men_only, probbase=toy_dir / "probbase.csv")
    assert (result.draws["c5"] == 0).all()
    assert all("c5" not in rates for rates in result.diagnostics["acceptance"].values())
