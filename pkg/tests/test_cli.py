from pathlib import Path

from ricsim.cli import main

CONFIG = str(Path(__file__).resolve().parents[1] / "configs" / "two_slice.ini")


def test_validate(capsys):
    assert main(["validate", "--config", CONFIG]) == 0
    assert capsys.readouterr().out.startswith("ok:")


def test_run_writes_csv(tmp_path, capsys):
    assert main(["run", "--config", CONFIG, "--cm", "off", "--seed", "4", "--out", str(tmp_path)]) == 0
    assert "No CM seed=4" in capsys.readouterr().out
    assert sorted(p.name for p in tmp_path.iterdir()) == ["dispositions.csv", "samples.csv",
                                                          "summary.csv"]


def test_compare(tmp_path, capsys):
    assert main(["compare", "--config", CONFIG, "--runs", "2", "--out", str(tmp_path)]) == 0
    assert "sd reduction:" in capsys.readouterr().out


def test_scenario_error_exit_code(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text(Path(CONFIG).read_text().replace("total_prbs = 100", "total_prbs = 0"))
    assert main(["validate", "--config", str(bad)]) == 1


def test_io_error_exit_code(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "missing.ini")]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "--config", CONFIG, "--out", str(blocker / "sub")]) == 2
