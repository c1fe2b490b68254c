import pytest

from pyva.coders import CoderFactory, InSilicoCoder, InterVACoder, NBCCoder, TariffCoder
from pyva.core.factory import MetaFactory, create_factory


@pytest.mark.parametrize(
    ("name", "output_class"),
    [
        ("InterVA", InterVACoder),
        ("insilico", InSilicoCoder),
        ("NBC", NBCCoder),
        ("tariff", TariffCoder),
    ],
)
def test_factory(name, output_class):
    assert CoderFactory.get(name) == output_class


def test_factory_raises():
    with pytest.raises(ValueError, match="choose from"):
        CoderFactory.get("EAVA")


def test_names():
    assert sorted(CoderFactory.names()) == ["insilico", "interva", "nbc", "tariff"]


def test_abstract_classes_are_not_registered():
    class Reader(metaclass=MetaFactory):
        abstract = True

    class CsvReader(Reader):
        pass

    class Helper(Reader):
        abstract = True

    Factory = create_factory(Reader)
    assert Factory.names() == ["csv"]
    assert isinstance(Factory.create("Csv"), CsvReader)
