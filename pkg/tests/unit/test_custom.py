import pandas as pd
import pytest

from pyva.core.exceptions import ConfigurationError, TokenError
from pyva.ingest.custom import LabelMap, convert_custom


@pytest.fixture
def survey():
    return pd.DataFrame(
        {
            "ID": ["d1", "d2", "d3"],
            "Cause": ["A", "B", "A"],
            "fever": ["Yes", "No", "Refused"],
            "cough": ["No", "Yes", "Yes"],
        }
    )


def test_convert_with_causes(survey):
    data, causes = convert_custom(survey, LabelMap.of("Yes", "No", ["Refused"]))
    assert data.symptoms == ("fever", "cough")
    assert data.values.tolist() == [[1, 0], [0, 1], [-1, 1]]
    assert causes.to_dict() == {"d1": "A", "d2": "B", "d3": "A"}


def test_strict_rejects_unlisted_values(survey):
    with pytest.raises(TokenError) as excinfo:
        convert_custom(survey, LabelMap.of("Yes", "No", ["Don't know"]))
    assert excinfo.value.tokens == ["Refused"]


def test_lenient_maps_unlisted_values_to_missing(survey):
    data, _ = convert_custom(survey, LabelMap.of("Yes", "No", ["Don't know"]), lenient=True)
    assert data.values[2, 0] == -1


def test_without_cause_column(survey):
    data, causes = convert_custom(survey.drop(columns="Cause"), LabelMap.of("Yes", "No", ["Refused"]))
    assert causes is None
    assert data.n_symptoms == 2


def test_label_sets_must_be_disjoint():
    with pytest.raises(ConfigurationError):
        LabelMap.of(["Yes", "Y"], ["No", "Y"], ["DK"])
    with pytest.raises(ConfigurationError):
        LabelMap.of("Yes", "No", [])
