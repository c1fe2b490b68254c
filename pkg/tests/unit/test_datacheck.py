import numpy as np
import pandas as pd
import pytest

from pyva.consistency import CheckPolicy, SymptomHierarchy, data_check
from pyva.core.exceptions import ConfigurationError
from pyva.model.types import SymptomMatrix


@pytest.fixture
def pregnancy_hierarchy(pregnancy_data):
    return SymptomHierarchy.example().restricted_to(pregnancy_data.symptoms)


def hierarchy_of(rows):
    return SymptomHierarchy.from_frame(
        pd.DataFrame(
            rows,
            columns=["symptom", "relation", "higher_symptom", "trigger_value", "implied_value", "neonate_only"],
        )
    )


@pytest.mark.parametrize(
    "variant, child",
    [
        pytest.param("interva4", 0, id="interva4"),
        pytest.param("interva5", -1, id="interva5"),
        pytest.param("insilico", -1, id="insilico"),
    ],
)
def test_pregnant_record(pregnancy_data, pregnancy_hierarchy, variant, child):
    checked, log = data_check(pregnancy_data, pregnancy_hierarchy, CheckPolicy(variant))
    # female is implied by pregnant; child is not asked of a pregnant woman
    assert checked.values.tolist() == [[1, 1, child], [1, 0, 1]]
    assert log["ID"].tolist() == ["p1", "p1"]
    assert log["symptom"].tolist() == ["female", "child"]
    assert log["before"].tolist() == ["", "Y"]


def test_interva5_only_resets_substantive_answers():
    hierarchy = hierarchy_of([("s2", "notask", "s1", "N", "Y", "0")])
    data = SymptomMatrix(("a", "b"), ("s1", "s2"), np.array([[0, 1], [0, 0]]))
    interva5, _ = data_check(data, hierarchy, CheckPolicy("interva5"))
    insilico, _ = data_check(data, hierarchy, CheckPolicy("insilico"))
    assert interva5.values.tolist() == [[0, -1], [0, 0]]
    assert insilico.values.tolist() == [[0, -1], [0, -1]]


def test_check_reaches_a_fixpoint(toy_test, toy_dir):
    hierarchy = SymptomHierarchy.read(toy_dir / "hierarchy.csv")
    once, _ = data_check(toy_test, hierarchy, CheckPolicy("insilico"))
    twice, log = data_check(once, hierarchy, CheckPolicy("insilico"))
    assert len(log) == 0
    np.testing.assert_array_equal(once.values, twice.values)


def test_depth_two_chain_settles_in_two_passes():
    hierarchy = hierarchy_of(
        [("s3", "anc", "s2", "Y", "Y", "0"), ("s2", "anc", "s1", "Y", "Y", "0")]
    )
    data = SymptomMatrix(("a",), ("s1", "s2", "s3"), np.array([[0, 0, 1]]))
    checked, log = data_check(data, hierarchy)
    assert checked.values.tolist() == [[1, 1, 1]]
    assert len(log) == 2


@pytest.mark.parametrize("variant, x", [("interva4", 0), ("interva5", -1), ("insilico", -1)])
def test_mixed_relations_settle(variant, x):
    hierarchy = hierarchy_of(
        [
            ("x", "notask", "a", "Y", "Y", "0"),
            ("c", "anc", "b", "Y", "Y", "0"),
            ("b", "anc", "a", "Y", "Y", "0"),
        ]
    )
    data = SymptomMatrix(("r",), ("x", "a", "b", "c"), np.array([[1, 0, 0, 1]]))
    checked, log = data_check(data, hierarchy, CheckPolicy(variant))
    assert checked.values.tolist() == [[x, 1, 1, 1]]
    assert sorted(log["symptom"]) == ["a", "b", "x"]
    _, again = data_check(checked, hierarchy, CheckPolicy(variant), passes=1)
    assert len(again) == 0


def test_neonate_only_symptoms_are_cleared():
    hierarchy = hierarchy_of([("cried_late", "notask", "cried", "N", "Y", "1")])
    data = SymptomMatrix(
        ("baby", "adult"), ("neonate", "cried", "cried_late"), np.array([[1, 1, 1], [0, 1, 1]])
    )
    checked, _ = data_check(data, hierarchy, CheckPolicy("interva5"))
    kept, _ = data_check(data, hierarchy, CheckPolicy("interva4"))
    assert checked.column("cried_late").tolist() == [1, -1]
    assert kept.column("cried_late").tolist() == [1, 1]


def test_unknown_policy():
    with pytest.raises(ConfigurationError):
        CheckPolicy("interva3")


def test_hierarchy_symptoms_must_exist(small_matrix):
    with pytest.raises(ConfigurationError, match="not in the data"):
        data_check(small_matrix, SymptomHierarchy.example())


def test_hierarchy_too_deep():
    with pytest.raises(ConfigurationError, match="levels deep"):
        hierarchy_of(
            [
                ("s4", "anc", "s3", "Y", "Y", "0"),
                ("s3", "anc", "s2", "Y", "Y", "0"),
                ("s2", "anc", "s1", "Y", "Y", "0"),
            ]
        )


def test_hierarchy_cycle():
    with pytest.raises(ConfigurationError, match="Cyclic"):
        hierarchy_of([("s1", "anc", "s2", "Y", "Y", "0"), ("s2", "notask", "s1", "Y", "Y", "0")])


def test_hierarchy_unknown_relation():
    with pytest.raises(ConfigurationError):
        hierarchy_of([("s1", "child-of", "s2", "Y", "Y", "0")])


def test_example_hierarchy_loads():
    hierarchy = SymptomHierarchy.example()
    assert "pregnant" in hierarchy.symptoms
    assert "cried_immediately" in hierarchy.neonate_only
