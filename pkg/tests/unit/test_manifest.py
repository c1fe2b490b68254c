import pendulum

from pyva.core.manifest import MANIFEST_NAME, RunManifest


def test_write_and_read(tmp_path):
    data = tmp_path / "data.csv"
    data.write_text("ID,fever\nd1,Y\n")
    manifest = RunManifest.start("0.1.0", "code", {"model": "interva", "probbase": tmp_path / "p.csv"}, seed=4)
    manifest.add_input("data", data)
    path = manifest.write(tmp_path)
    assert path.name == MANIFEST_NAME
    again = RunManifest.read(tmp_path)
    assert again.subcommand == "code"
    assert again.seed == 4
    assert again.options["probbase"] == str(tmp_path / "p.csv")
    assert len(again.inputs["data"]["sha256"]) == 64
    assert again.finished is not None


def test_duration():
    manifest = RunManifest.start("0.1.0", "check")
    assert manifest.duration is None
    manifest.finish()
    assert manifest.duration >= pendulum.duration(seconds=0)
