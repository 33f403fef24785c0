import json

import pytest

from barrierlab.cli import EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION, main


def test_summary_to_stdout(capsys):
    assert main(["univariate-roots", "--d", "4", "--trials", "20"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["experiment"] == "univariate-roots" and doc["config"]["trials"] == 20


def test_outputs_written(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["large-components", "--d", "20", "--trials", "10", "--out", str(out)]) == EXIT_OK
    assert (out / "trials.csv").exists() and (out / "summary.json").exists() and (out / "report.md").exists()
    assert json.loads(capsys.readouterr().out)["violations"] == 0


@pytest.mark.parametrize("argv", [
    ["nests"],                                   # no degree
    ["nests", "--d", "ten"],                     # unparsable
    ["nests", "--d", "10", "--alpha", "1.5"],    # out of range
    ["warp-drive", "--d", "10"],                 # unknown experiment
    ["nests", "--config", "/nonexistent/file.ini"],
])
def test_configuration_errors(argv, capsys):
    assert main(argv) == EXIT_CONFIG


def test_config_file_with_override(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[experiment]\nd = 4\ntrials = 5\n")
    assert main(["univariate-roots", "--config", str(cfg), "--trials", "7"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["config"]["trials"] == 7


def test_violation_exit_code(monkeypatch, capsys):
    import barrierlab.cli as cli

    real = cli.run_experiment

    def broken(cfg):
        rep = real(cfg)
        rep.violations = 1
        return rep

    monkeypatch.setattr(cli, "run_experiment", broken)
    assert main(["univariate-roots", "--d", "4", "--trials", "5"]) == EXIT_VIOLATION
    assert "invariant violations" in capsys.readouterr().err
