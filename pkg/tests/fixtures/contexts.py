import pytest

from pyva.core.context import RunContext


@pytest.fixture
def context(tmp_path):
    return RunContext.from_options(seed=1, base_dir=tmp_path)


@pytest.fixture
def short_chain_context(tmp_path):
    """A context whose InSilicoVA chains are short enough for unit tests."""
    return RunContext.from_options(
        seed=7,
        base_dir=tmp_path,
        insilico_nsim=1000,
        insilico_thin=10,
    )
