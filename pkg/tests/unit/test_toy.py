import pandas as pd

from pyva.dev import toy


def test_toy_data_is_deterministic(tmp_path):
    first = toy.write_toy_data(tmp_path / "a")
    second = toy.write_toy_data(tmp_path / "b")
    assert [p.name for p in first] == [p.name for p in second]
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()


def test_toy_data_contents(toy_dir):
    train = pd.read_csv(toy_dir / "train.csv", dtype=str, keep_default_na=False)
    assert len(train) == toy.N_TRAIN
    assert set(train["Cause"]) <= set(toy.CAUSES)
    # maternal deaths are women
    assert (train.loc[train["Cause"] == "c5", "male"] == "").all()
    probbase = pd.read_csv(toy_dir / "probbase.csv", dtype=str)
    assert list(probbase.columns) == ["symptom", *toy.CAUSES]


def test_other_seed_differs(tmp_path):
    one = toy.write_toy_data(tmp_path / "a", seed=1)[0].read_bytes()
    two = toy.write_toy_data(tmp_path / "b", seed=2)[0].read_bytes()
    assert one != two
