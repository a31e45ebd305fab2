import json
import subprocess
import sys

import pytest

from oracles import DATA
from wavevol import __version__
from wavevol.chaosdetect import Grade
from wavevol.cli import ARTIFACTS, main, run_analyze, run_compare
from wavevol.config import Config
from wavevol.errors import BadConfig

SINE = "synth:kind=sine,length=4096,seed=4"
LOGISTIC = "synth:kind=logistic_map,length=4096,seed=4"
SMALL = Config(scale_max=32.0)


def _read_all(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_analyze_sine_is_regular(tmp_path, capsys):
    out = tmp_path / "sine"
    assert main(["analyze", SINE, "--out", str(out)]) == 0
    assert "grade=regular" in capsys.readouterr().out
    report = json.loads((out / "report.json").read_text())
    assert report["dynamics"]["grade"] == "regular"
    assert report["dynamics"]["shift_regions"] == []
    assert report["version"] == __version__
    assert sorted(report["artifacts"]) == sorted(ARTIFACTS)
    for name in report["artifacts"]:
        assert (out / name).is_file()
    assert (out / "scalogram.svg").read_text().startswith("<svg")


def test_us_eur_defaults():
    report = run_analyze(str(DATA / "us_eur.csv"))
    assert 65 <= report.crossover_scale <= 105
    assert report.grade >= Grade.MODERATE_CHAOS


def test_us_inr_defaults_at_most_regular():
    report = run_analyze(str(DATA / "us_inr.csv"))
    assert report.grade <= Grade.REGULAR, report.dynamics.to_dict()


def test_deterministic(tmp_path):
    for name in ("a", "b"):
        assert main(["analyze", LOGISTIC, "--out", str(tmp_path / name), "--set", "scale_max=32"]) == 0
    assert _read_all(tmp_path / "a") == _read_all(tmp_path / "b")


def test_config_snapshot_reproduces_report(tmp_path):
    first = tmp_path / "first"
    assert main(["analyze", LOGISTIC, "--out", str(first), "--set", "scale_max=48",
                 "--set", "prominence=0.05"]) == 0
    again = tmp_path / "again"
    assert main(["analyze", LOGISTIC, "--out", str(again), "--config", str(first / "config.used")]) == 0
    assert _read_all(first) == _read_all(again)


def test_synth_file_matches_synth_source(tmp_path):
    csv = tmp_path / "sine.csv"
    assert main(["synth", "--spec", SINE[len("synth:"):], "--out", str(csv)]) == 0
    from_file = run_analyze(str(csv), SMALL)
    direct = run_analyze(SINE, SMALL)
    assert from_file.dynamics.to_dict() == direct.dynamics.to_dict()
    assert from_file.crossover_scale == direct.crossover_scale


def test_spectrum(tmp_path, capsys):
    out = tmp_path / "pg.csv"
    assert main(["spectrum", "synth:kind=gaussian_noise,length=1024,seed=3", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "frequency,power"
    assert "spectral_flatness=" in capsys.readouterr().out


def test_version(capsys):
    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip() == __version__


class TestCompare:
    def test_logistic_ranked_first(self, tmp_path):
        reports, table = run_compare([SINE, LOGISTIC], SMALL, tmp_path / "cmp")
        rows = table.splitlines()
        assert rows[0] == "label,flatness,crossover,F,grade"
        assert rows[1].startswith("logistic_map")
        assert (tmp_path / "cmp" / "comparison.csv").read_text() == table
        assert len(list((tmp_path / "cmp").glob("*/report.json"))) == 2

    def test_single_input_api(self):
        with pytest.raises(BadConfig):
            run_compare([SINE], SMALL)

    def test_single_input_cli(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["compare", SINE, "--out", str(tmp_path / "x")])
        assert exc.value.code == 2
        assert not (tmp_path / "x").exists()

    def test_failure_names_input(self, tmp_path, capsys):
        missing = tmp_path / "missing.csv"
        assert main(["compare", SINE, str(missing), "--out", str(tmp_path / "cmp")]) == 3
        assert str(missing) in capsys.readouterr().err
        assert not (tmp_path / "cmp").exists()


class TestExitCodes:
    def test_missing_file(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["analyze", str(tmp_path / "absent.csv"), "--out", str(out)]) == 3
        assert capsys.readouterr().err.startswith("DataError")
        assert not out.exists()

    def test_malformed_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("DATE,PRICE\n2001-01-02,1.0\n2001-01-03,-4\n")
        assert main(["analyze", str(bad), "--out", str(tmp_path / "out")]) == 3
        assert "line 3" in capsys.readouterr().err

    def test_numeric_error_leaves_no_output(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["analyze", "synth:kind=sine,length=200,seed=0", "--out", str(out)]) == 4
        assert capsys.readouterr().err.startswith("SignalTooShort")
        assert not out.exists()
        assert list(tmp_path.iterdir()) == []

    def test_failed_rerun_keeps_previous_outputs(self, tmp_path):
        out = tmp_path / "out"
        assert main(["analyze", SINE, "--out", str(out), "--set", "scale_max=32"]) == 0
        before = _read_all(out)
        assert main(["analyze", "synth:kind=sine,length=100,seed=0", "--out", str(out)]) == 4
        assert _read_all(out) == before

    @pytest.mark.parametrize("argv", [
        ["analyze", SINE, "--out", "x", "--set", "colour=red"],
        ["analyze", SINE, "--out", "x", "--set", "noequals"],
        ["analyze", SINE, "--out", "x", "--set", "wavelet_order=40"],
        ["synth", "--spec", "kind=brownian,length=100", "--out", "x.csv"],
    ])
    def test_bad_configuration(self, argv, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert main(argv) == 2
        assert list(tmp_path.iterdir()) == []

    def test_usage(self):
        with pytest.raises(SystemExit) as exc:
            main(["analyze"])
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            main(["analyse", SINE, "--out", "x"])
        assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "wavevol", "version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == __version__
    proc = subprocess.run([sys.executable, "-m", "wavevol", "analyze", str(tmp_path / "nope.csv"),
                           "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 3
