import json
import subprocess
import sys

import pytest

from spinxfer.cli import main


def test_compensation_scan(tmp_path, capsys):
    out = tmp_path / "cs"
    code = main(["compensation-scan", "--n", "6", "--sigma-j2", "0.1", "--sigma-b2", "0.5",
                 "--realizations", "3", "--deviations", "0,1e-4,1e-3,1e-2", "--out", str(out)])
    assert code == 0
    assert "3 task(s)" in capsys.readouterr().out
    assert json.loads((out / "manifest.json").read_text())["config"]["deviations"] == \
        [0.0, 1e-4, 1e-3, 1e-2]


def test_adiabatic_run_flags(tmp_path):
    out = tmp_path / "ad"
    code = main(["adiabatic-run", "--n", "4", "--beta", "20", "--f-target", "0.95",
                 "--alpha-scale", "0.25", "--out", str(out)])
    assert code == 0
    assert (out / "trajectory_n4_b5_r0000.csv").exists()


def test_missing_config(tmp_path, capsys):
    assert main(["free-sweep-n", "--config", str(tmp_path / "missing.toml")]) == 1
    assert "file not found" in capsys.readouterr().err


def test_bad_value_names_key(capsys):
    assert main(["free-sweep-n", "--n", "1"]) == 1
    assert "n: chain length" in capsys.readouterr().err


def test_unknown_flag_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["free-sweep-n", "--bogus"])
    assert exc.value.code == 1


def test_flag_not_valid_for_kind():
    with pytest.raises(SystemExit) as exc:
        main(["free-sweep-n", "--beta", "3"])
    assert exc.value.code == 1


def test_config_file_and_seed_env(tmp_path, monkeypatch):
    cfg = tmp_path / "run.toml"
    cfg.write_text('n = 5\nrealizations = 2\nseed = 4\nsigma_b2 = 0.01\n')
    monkeypatch.setenv("SPINXFER_SEED", "8")
    out = tmp_path / "lv"
    assert main(["leakage-vs-field", "--config", str(cfg), "--out", str(out)]) == 0
    assert json.loads((out / "manifest.json").read_text())["master_seed"] == 8


def test_runtime_failure_exit_code(tmp_path, monkeypatch, capsys):
    from spinxfer import experiments
    from spinxfer.errors import VanishingCoupling

    def boom(cfg, task):
        raise VanishingCoupling("synthetic")
    monkeypatch.setitem(experiments.HANDLERS, "free-sweep-n", boom)
    assert main(["free-sweep-n", "--n", "5", "--realizations", "2",
                 "--out", str(tmp_path / "x")]) == 2
    assert "run failed" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "spinxfer", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "spinxfer" in proc.stdout
