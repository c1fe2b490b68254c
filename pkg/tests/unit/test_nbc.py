import numpy as np
import pandas as pd
import pytest

from pyva.coders import NBCCoder
from pyva.coders.nbc import NbcModel, nbc_csmf, nbc_posterior, nbc_train
from pyva.core.exceptions import ConfigurationError, ModelRequirementError
from pyva.metrics import csmf_accuracy, truth_csmf
from pyva.model.types import CondProbMatrix, IndivProbResult, PriorCSMF, SymptomMatrix


@pytest.fixture
def model():
    probs = CondProbMatrix(("s1", "s2"), ("a", "b"), np.array([[0.75, 0.25], [0.5, 0.2]]))
    return NbcModel(probs, PriorCSMF(("a", "b"), [0.5, 0.5]))


def test_laplace_smoothing():
    data = SymptomMatrix(("r1", "r2", "r3"), ("s1",), np.array([[1], [1], [-1]]))
    trained = nbc_train(data, np.array(["a", "a", "b"]), alpha=1.0)
    # a: (2 + 1) / (2 + 2); b never observed: (0 + 1) / (0 + 2)
    np.testing.assert_allclose(trained.probs.values, [[0.75, 0.5]])
    np.testing.assert_allclose(trained.prior.weights, [3 / 5, 2 / 5])
    uniform = nbc_train(data, np.array(["a", "a", "b"]), uniform_prior=True)
    np.testing.assert_allclose(uniform.prior.weights, [0.5, 0.5])


def test_absence_counts(model):
    post = nbc_posterior([1, 0], model)
    a, b = 0.75 * 0.5, 0.25 * 0.8
    np.testing.assert_allclose(post, [a / (a + b), b / (a + b)])


def test_missing_is_absent_unless_skipped(model):
    np.testing.assert_allclose(nbc_posterior([1, -1], model), nbc_posterior([1, 0], model))
    skipped = nbc_posterior([1, -1], model, skip_missing=True)
    np.testing.assert_allclose(skipped, [0.75, 0.25])


def test_smoothing_must_be_positive(model):
    with pytest.raises(ConfigurationError):
        NbcModel(model.probs, model.prior, alpha=0)
    with pytest.raises(ConfigurationError):
        NbcModel(CondProbMatrix(("s",), ("a", "b"), [[1.0, 0.5]]), model.prior)


def test_coder_needs_training_data(context, toy_test):
    with pytest.raises(ModelRequirementError, match="--train"):
        NBCCoder(context=context).code(toy_test)


def test_coder_on_toy_data(context, toy_test, toy_test_labels, toy_train, toy_train_labels):
    result = NBCCoder(context=context).code(toy_test, train=toy_train, train_labels=toy_train_labels)
    assert result.model == "nbc"
    assert result.options["alpha"] == 1.0
    est = result.csmf.series("All")
    truth = truth_csmf(toy_test_labels, list(est.index))
    assert csmf_accuracy(est, truth) > 0.6


def test_coder_per_group(context, toy_test, toy_train, toy_train_labels):
    groups = pd.Series(
        np.where(toy_test.column("male") == 1, "men", "women"), index=list(toy_test.ids)
    )
    result = NBCCoder(context=context).code(
        toy_test, train=toy_train, train_labels=toy_train_labels, groups=groups
    )
    assert set(result.csmf.groups) == {"men", "women"}


def test_csmf_is_mean_of_posteriors():
    indiv = IndivProbResult(("d1", "d2", "d3"), ("a", "b"), np.array([[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]]))
    np.testing.assert_allclose(nbc_csmf(indiv)["All"], [0.5, 0.5])
    groups = pd.Series(["x", "x", "y"], index=["d1", "d2", "d3"])
    csmf = nbc_csmf(indiv, groups)
    np.testing.assert_allclose(csmf["x"], [0.75, 0.25])
    np.testing.assert_allclose(csmf["y"], [0.0, 1.0])
