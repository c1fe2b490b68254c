import os

import pytest

from pyva.core.exceptions import MissingInputError
from pyva.core.utils import atomic_write, file_digest, get_callable_by_name, require_file, write_frame_atomic


def test_get_callable_by_name_with_function():
    assert get_callable_by_name("os.path.join") == os.path.join


def test_get_callable_with_from_import():
    assert get_callable_by_name("pyva.core.utils.get_callable_by_name") == get_callable_by_name


def test_get_callable_with_mini_from_import():
    with pytest.raises(ValueError):
        get_callable_by_name("get_callable_by_name")


def test_get_callable_by_name_with_non_existent_callable():
    with pytest.raises(AttributeError):
        get_callable_by_name("os.path.non_existent")


def test_get_callable_by_name_with_non_existent_module():
    with pytest.raises(ImportError):
        get_callable_by_name("non_existent_module.function")


def test_require_file(tmp_path):
    with pytest.raises(MissingInputError, match="probbase file not found"):
        require_file(tmp_path / "nope.csv", "probbase")
    (tmp_path / "yes.csv").write_text("")
    assert require_file(str(tmp_path / "yes.csv")) == tmp_path / "yes.csv"


def test_atomic_write(tmp_path):
    target = tmp_path / "sub" / "out.txt"
    with atomic_write(target) as f:
        f.write("done")
    assert target.read_text() == "done"


def test_atomic_write_cleans_up(tmp_path):
    target = tmp_path / "out.txt"
    target.write_text("old")
    with pytest.raises(RuntimeError):
        with atomic_write(target) as f:
            f.write("half")
            raise RuntimeError("interrupted")
    assert target.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_write_frame_atomic(tmp_path):
    import pandas as pd

    path = tmp_path / "frame.csv"
    write_frame_atomic(pd.DataFrame({"cause": ["a"], "CSMF": [1 / 3]}), path)
    assert path.read_bytes() == b"cause,CSMF\na,0.333333333333\n"


def test_file_digest(tmp_path):
    (tmp_path / "a.txt").write_text("x")
    one = file_digest(tmp_path / "a.txt")
    assert len(one) == 64
    before = file_digest(tmp_path)
    (tmp_path / "b.txt").write_text("y")
    assert file_digest(tmp_path) != before
