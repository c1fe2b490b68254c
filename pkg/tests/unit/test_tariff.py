import numpy as np
import pytest

from pyva.coders import TariffCoder
from pyva.coders.tariff import (
    TariffModel,
    tariff_assign,
    tariff_csmf,
    tariff_matrix,
    tariff_rank,
    tariff_score,
    tariff_train,
)
from pyva.core.exceptions import ConfigurationError, ModelRequirementError, UnsupportedOperationError
from pyva.metrics.summaries import get_indiv_prob, get_top_cod


def test_tariff_matrix():
    counts = np.array([[10, 0], [2, 0], [4, 0]])
    tariffs = tariff_matrix(counts)
    # median 4, quartiles 3 and 7; a constant symptom scores 0
    np.testing.assert_allclose(tariffs[:, 0], [1.5, -0.5, 0.0])
    np.testing.assert_allclose(tariffs[:, 1], 0.0)


def test_rank_against_pool():
    model = TariffModel(
        ("a", "b"),
        ("s1",),
        np.zeros((2, 1)),
        np.zeros((2, 1)),
        (np.array([1.0, 2.0, 3.0, 4.0]), np.array([0.0, 0.0])),
    )
    ranks = tariff_rank([[3.0, 5.0]], model)
    np.testing.assert_allclose(ranks, [[0.5, 0.5]])
    assert tariff_assign(np.array([[0.5, 0.5], [0.75, 0.25]])).tolist() == [0, 1]


def test_csmf_from_assignments():
    csmf = tariff_csmf(np.array([0, 0, 1, 2]), ("a", "b", "c"))
    np.testing.assert_allclose(csmf["All"], [0.5, 0.25, 0.25])


def test_training_is_reproducible(toy_train, toy_train_labels):
    labels = toy_train_labels.reindex(list(toy_train.ids)).to_numpy()
    one = tariff_train(toy_train, labels, bootstrap=40, seed=3, threads=1)
    two = tariff_train(toy_train, labels, bootstrap=40, seed=3, threads=2)
    other = tariff_train(toy_train, labels, bootstrap=40, seed=4, threads=1)
    for a, b in zip(one.pools, two.pools):
        np.testing.assert_array_equal(a, b)
    assert any(not np.array_equal(a, b) for a, b in zip(one.pools, other.pools))


def test_pooled_reference(toy_train, toy_train_labels):
    labels = toy_train_labels.reindex(list(toy_train.ids)).to_numpy()
    model = tariff_train(toy_train, labels, bootstrap=10, reference="pooled")
    assert all(pool.size == 10 * len(model.causes) for pool in model.pools)


def test_bad_options(toy_train, toy_train_labels):
    labels = toy_train_labels.reindex(list(toy_train.ids)).to_numpy()
    with pytest.raises(ConfigurationError):
        tariff_train(toy_train, labels, bootstrap=0)
    with pytest.raises(ConfigurationError):
        tariff_train(toy_train, labels, reference="global")


def test_coder_needs_training_data(context, toy_test):
    with pytest.raises(ModelRequirementError, match="Tariff requires training data"):
        TariffCoder(context=context).code(toy_test)


def test_coder_on_toy_data(context, toy_test, toy_train, toy_train_labels):
    result = TariffCoder(context=context, bootstrap=50).code(
        toy_test, train=toy_train, train_labels=toy_train_labels
    )
    assert result.indiv is None
    assert result.ranks.shape == (200, 5)
    assert result.options == {"bootstrap": 50, "reference": "cause", "seed": 1}
    assert len(get_top_cod(result)) == 200
    with pytest.raises(UnsupportedOperationError):
        get_indiv_prob(result)


def test_coder_is_deterministic(context, toy_test, toy_train, toy_train_labels):
    coder = TariffCoder(context=context, bootstrap=30)
    one = coder.code(toy_test, train=toy_train, train_labels=toy_train_labels)
    two = coder.code(toy_test, train=toy_train, train_labels=toy_train_labels)
    np.testing.assert_array_equal(one.ranks, two.ranks)


def test_score_sums_tariffs_of_yes_symptoms():
    model = TariffModel(
        ("a", "b"),
        ("s1", "s2", "s3"),
        np.zeros((2, 3)),
        np.array([[1.5, -0.5, 2.0], [0.0, 1.0, -1.0]]),
        (np.array([0.0]), np.array([0.0])),
    )
    # No and Missing contribute nothing
    np.testing.assert_allclose(tariff_score([1, 0, 1], model), [3.5, -1.0])
    np.testing.assert_allclose(tariff_score([-1, 1, 0], model), [-0.5, 1.0])
