from tests.utils.constants import TEST_ROOT  # noqa: F401

pytest_plugins = [
    "tests.fixtures.config_files",
    "tests.fixtures.contexts",
    "tests.fixtures.environment",
    "tests.fixtures.symptom_data",
    "tests.fixtures.toy_data",
]
