"""
Randomized checks over many small instances, seeded so failures reproduce.
"""

import itertools

import numpy as np
import pandas as pd
import pytest

from pyva.coders.interva import IntervaConfig, interva_posterior, interva_postprocess
from pyva.coders.nbc import NbcModel, nbc_posterior
from pyva.coders.physician import PhysicianCodes, physician_debias
from pyva.coders.tariff import tariff_matrix
from pyva.consistency import CheckPolicy, SymptomHierarchy, data_check
from pyva.consistency.hierarchy import Relation
from pyva.metrics import csmf_accuracy
from pyva.model.types import CondProbMatrix, PriorCSMF, SymptomMatrix, SymptomValue


def random_instance(rng, max_causes=6, max_symptoms=10, missing=0.2):
    c = int(rng.integers(2, max_causes + 1))
    s = int(rng.integers(1, max_symptoms + 1))
    symptoms = tuple(f"s{j}" for j in range(s))
    causes = tuple(f"c{k}" for k in range(c))
    probs = CondProbMatrix(symptoms, causes, rng.uniform(0.01, 0.99, size=(s, c)))
    prior = PriorCSMF(causes, rng.dirichlet(np.ones(c)))
    record = rng.choice([1, 0], size=s)
    record[rng.random(s) < missing] = -1
    return probs, prior, record


def brute_force(record, probs, prior, absence):
    weights = []
    for k in range(len(prior.causes)):
        w = prior.weights[k]
        for j, value in enumerate(record):
            p = probs.values[j, k]
            if value == 1:
                w *= p
            elif absence and value in (0, -1):
                w *= 1 - p
        weights.append(w)
    weights = np.array(weights)
    return weights / weights.sum()


def test_interva_matches_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(200):
        probs, prior, record = random_instance(rng)
        post, degenerate = interva_posterior(record, probs, prior)
        assert not degenerate
        np.testing.assert_allclose(post, brute_force(record, probs, prior, False), rtol=0, atol=1e-12)


def test_nbc_matches_enumeration():
    rng = np.random.default_rng(12)
    for _ in range(200):
        probs, prior, record = random_instance(rng)
        post = nbc_posterior(record, NbcModel(probs, prior))
        np.testing.assert_allclose(post, brute_force(record, probs, prior, True), rtol=0, atol=1e-12)


def test_distributions_are_normalized():
    rng = np.random.default_rng(13)
    for _ in range(1000):
        probs, prior, record = random_instance(rng, max_symptoms=20)
        post, _ = interva_posterior(record, probs, prior)
        assert abs(post.sum() - 1) < 1e-9
        assert abs(interva_postprocess(post).sum() - 1) < 1e-9
        assert abs(nbc_posterior(record, NbcModel(probs, prior)).sum() - 1) < 1e-9


def test_tariff_invariances():
    rng = np.random.default_rng(14)
    for _ in range(500):
        counts = rng.integers(0, 50, size=(int(rng.integers(3, 8)), int(rng.integers(1, 6))))
        tariffs = tariff_matrix(counts)
        np.testing.assert_array_equal(tariff_matrix(counts + int(rng.integers(1, 100))), tariffs)
        np.testing.assert_allclose(tariff_matrix(counts * rng.uniform(0.1, 10)), tariffs, rtol=0, atol=1e-12)
        # more Yes answers never lower a tariff
        for j in range(counts.shape[1]):
            order = np.argsort(counts[:, j], kind="stable")
            assert np.all(np.diff(tariffs[order, j]) >= -1e-12)


def test_constant_symptom_has_zero_tariff():
    np.testing.assert_array_equal(tariff_matrix(np.full((4, 2), 7)), 0.0)


def test_accuracy_range():
    rng = np.random.default_rng(15)
    for _ in range(1000):
        c = int(rng.integers(2, 8))
        causes = [f"c{k}" for k in range(c)]
        est = pd.Series(rng.dirichlet(np.ones(c)), index=causes)
        truth = pd.Series(rng.dirichlet(np.ones(c)), index=causes)
        assert 0.0 <= csmf_accuracy(est, truth) <= 1.0


@pytest.mark.parametrize("top", [1, 2, 3])
def test_postprocess_keeps_at_most_top(top):
    rng = np.random.default_rng(16)
    for dist in rng.dirichlet(np.ones(5), size=200):
        out = interva_postprocess(dist, IntervaConfig(top=top))
        assert (out[:-1] > 0).sum() <= top


def test_enumeration_helper_agrees_on_all_records():
    probs = CondProbMatrix(("a", "b"), ("x", "y"), np.array([[0.9, 0.2], [0.3, 0.6]]))
    prior = PriorCSMF(("x", "y"), [0.5, 0.5])
    for record in itertools.product([1, 0, -1], repeat=2):
        post, _ = interva_posterior(record, probs, prior)
        np.testing.assert_allclose(post, brute_force(record, probs, prior, False), atol=1e-12)


LAYERS = (("t0", "t1"), ("m0", "m1", "m2"), ("b0", "b1", "b2"))


def random_hierarchy(rng, kinds):
    """Depth <= 2: middle symptoms hang below the top layer, bottom ones below the middle."""
    relations = {"notask": [], "anc": []}
    for upper, lower in zip(LAYERS, LAYERS[1:]):
        for symptom in lower:
            for kind in kinds:
                if rng.random() >= 0.7:
                    continue
                higher = str(rng.choice(upper))
                if kind == "anc":
                    relations["anc"].append(Relation(symptom, higher))
                else:
                    trigger, implied = (SymptomValue(int(v)) for v in rng.choice([1, 0], size=2))
                    relations["notask"].append(Relation(symptom, higher, trigger, implied))
    return SymptomHierarchy(**relations)


@pytest.mark.parametrize("kinds", [("notask",), ("anc",), ("notask", "anc")])
@pytest.mark.parametrize("variant", ["interva4", "interva5", "insilico"])
def test_checking_again_changes_nothing(kinds, variant):
    rng = np.random.default_rng(17)
    symptoms = [s for layer in LAYERS for s in layer]
    for _ in range(50):
        order = list(rng.permutation(symptoms))
        data = SymptomMatrix(
            tuple(f"r{i}" for i in range(1000)), tuple(order), rng.choice([1, 0, -1], size=(1000, len(order)))
        )
        hierarchy = random_hierarchy(rng, kinds)
        checked, _ = data_check(data, hierarchy, CheckPolicy(variant))
        again, log = data_check(checked, hierarchy, CheckPolicy(variant), passes=1)
        assert len(log) == 0
        np.testing.assert_array_equal(again.values, checked.values)


def test_unanimous_physicians_give_point_masses():
    categories = ("Infectious", "NCD", "External")
    truth = [categories[i % 3] for i in range(30)]
    codes = PhysicianCodes(
        ids=tuple(f"d{i}" for i in range(30)),
        codes=tuple(tuple((doc, cat) for doc in ("doc1", "doc2", "doc3")) for cat in truth),
        categories=categories,
    )
    result = physician_debias(codes, tol=1e-4, max_itr=100)
    assert result.converged
    assert result.iterations <= 100
    expected = np.array([[cat == c for c in categories] for cat in truth], dtype=float)
    assert np.abs(result.probs - expected).max() < 1e-4
