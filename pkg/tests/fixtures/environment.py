import os

import pytest

from pyva.core.config import PyvaConfigManager


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch):
    """Keep user configuration files and PYVA_* variables out of the tests."""
    monkeypatch.setattr(PyvaConfigManager, "_CONFIG_FILES", [])
    for key in list(os.environ):
        if key.startswith("PYVA_"):
            monkeypatch.delenv(key)
