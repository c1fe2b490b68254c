import numpy as np
import pytest

from pyva.model.types import CondProbMatrix, PriorCSMF, SymptomMatrix

Y, N, M = 1, 0, -1


@pytest.fixture
def small_matrix():
    return SymptomMatrix(
        ("d1", "d2", "d3"),
        ("fever", "cough", "rash"),
        np.array([[Y, N, M], [N, Y, Y], [M, M, N]]),
    )


@pytest.fixture
def pregnancy_data():
    """One record asked about a child although pregnant, and not flagged female."""
    return SymptomMatrix(
        ("p1", "p2"),
        ("female", "pregnant", "child"),
        np.array([[N, Y, Y], [Y, N, Y]]),
    )


@pytest.fixture
def two_cause_probs():
    return CondProbMatrix(
        ("fever", "cough", "rash"),
        ("malaria", "pneumonia"),
        np.array([[0.8, 0.3], [0.1, 0.9], [0.2, 0.05]]),
    )


@pytest.fixture
def two_cause_prior():
    return PriorCSMF(("malaria", "pneumonia"), np.array([1.0, 1.0]))
