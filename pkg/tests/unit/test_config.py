import pytest
from everett import InvalidValueError

from pyva.core.config import PHMRC_URLS, PyvaConfigManager
from pyva.core.context import RunContext


def test_defaults():
    config = PyvaConfigManager.from_pyva_cfg()
    assert config("seed") == 1
    assert config("nbc_alpha") == 1.0
    assert config("insilico_nsim") == 10000
    assert config("tariff_reference") == "cause"
    assert config("phmrc_url_child") == PHMRC_URLS["child"]
    assert "male" in config("demographic_symptoms")


def test_run_specific_overrides(monkeypatch):
    monkeypatch.setenv("PYVA_INSILICO_NSIM", "4000")
    assert PyvaConfigManager.from_pyva_cfg()("insilico_nsim") == 4000
    config = PyvaConfigManager.from_pyva_cfg({"insilico_nsim": 2000, "seed": None})
    assert config("insilico_nsim") == 2000
    assert config("seed") == 1


def test_user_file(tmp_path, monkeypatch):
    user_file = tmp_path / "pyva.yaml"
    user_file.write_text("pyva:\n  interva_top: \"2\"\n")
    monkeypatch.setattr(PyvaConfigManager, "_CONFIG_FILES", [str(user_file)])
    assert PyvaConfigManager.from_pyva_cfg()("interva_top") == 2


def test_invalid_choice():
    config = PyvaConfigManager.from_pyva_cfg({"tariff_reference": "global"})
    with pytest.raises(InvalidValueError):
        config("tariff_reference")


def test_get_with_default():
    config = PyvaConfigManager.from_pyva_cfg()
    assert config.get("no_such_option", default="fallback") == "fallback"


def test_context(tmp_path):
    context = RunContext.from_options(seed=3, threads=0, base_dir=tmp_path, interva_top=1)
    assert context.seed == 3
    assert context.threads == 1
    assert context.option("interva_top") == 1
    assert context.option("interva_top", 5) == 5
    assert context.resolve("data.csv") == tmp_path / "data.csv"
    assert context.rng().integers(1000) == context.rng().integers(1000)
