import json

import numpy as np
import pytest

from spinxfer.config import SEED_ENV, ExperimentConfig, build_config, coerce, parse_int_list, read_config_file
from spinxfer.errors import ConfigError
from spinxfer.io import dumps, fmt, read_csv, write_csv, write_trajectory
from spinxfer.free import Trajectory


@pytest.mark.parametrize("value, expected", [
    (10, [10]), ("5:8", [5, 6, 7, 8]), ("5,7", [5, 7]), ([4, "6:7"], [4, 6, 7]),
])
def test_parse_int_list(value, expected):
    assert parse_int_list("n", value) == expected


@pytest.mark.parametrize("value", [True, "a:b", 1.5, None])
def test_parse_int_list_rejects(value):
    with pytest.raises(ConfigError) as exc:
        parse_int_list("n", value)
    assert exc.value.key == "n"


def test_defaults_per_kind():
    assert ExperimentConfig("adiabatic-run").realizations == 1
    cfg = ExperimentConfig("compensation-scan")
    assert cfg.realizations == 100 and cfg.out == "runs/compensation-scan"


@pytest.mark.parametrize("overrides, key", [
    ({"n": 1}, "n"), ({"n": 21}, "n"), ({"b_field": 1.0}, "b_field"),
    ({"sigma_j2": -0.1}, "sigma_j2"), ({"realizations": 0}, "realizations"),
    ({"f_target": 1.0}, "f_target"), ({"sweep_site": "middle"}, "sweep_site"),
    ({"bogus": 1}, "bogus"), ({"beta": "x"}, "beta"), ({"deviations": []}, "deviations"),
])
def test_invalid_values_name_the_key(overrides, key):
    with pytest.raises(ConfigError) as exc:
        build_config("free-sweep-n", {}, overrides, env={})
    assert exc.value.key == key
    assert str(exc.value).startswith(key)


def test_precedence(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('kind = "monte-carlo-fidelity"\nn = "5:6"\nseed = 3\nrealizations = 7\n')
    values = read_config_file(path)
    assert build_config("monte-carlo-fidelity", values, {}, env={}).seed == 3
    assert build_config(None, values, {}, env={SEED_ENV: "9"}).seed == 9
    cfg = build_config(None, values, {"seed": "11"}, env={SEED_ENV: "9"})
    assert cfg.seed == 11 and cfg.n == [5, 6] and cfg.realizations == 7
    with pytest.raises(ConfigError):
        build_config("adiabatic-run", values, {}, env={})


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="file not found"):
        read_config_file(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("n = [1,\n")
    with pytest.raises(ConfigError):
        read_config_file(bad)
    nested = tmp_path / "nested.toml"
    nested.write_text("[run]\nn = 5\n")
    with pytest.raises(ConfigError) as exc:
        read_config_file(nested)
    assert exc.value.key == "run"


def test_coerce_types():
    out = coerce({"emit_plot_data": "true", "b_field": "3,4.5", "tol": 1e-9})
    assert out == {"emit_plot_data": True, "b_field": [3.0, 4.5], "tol": 1e-9}


def test_fmt_round_trips():
    x = 0.1 + 0.2
    assert float(fmt(x)) == x
    assert fmt(np.int64(3)) == "3" and fmt(True) == "true" and fmt(float("nan")) == "nan"


def test_csv_and_json(tmp_path):
    path = write_csv(tmp_path / "t.csv", ["a", "b"], [[1, 0.5], [2, 1 / 3]])
    raw = path.read_bytes()
    assert b"\r" not in raw
    header, rows = read_csv(path)
    assert header == ["a", "b"] and float(rows[1][1]) == 1 / 3
    assert json.loads(dumps({"b": np.float64(1.5), "a": np.arange(2)})) == {"a": [0, 1], "b": 1.5}
    assert dumps({"b": 1, "a": 2}) == '{"a": 2, "b": 1}'


def test_trajectory_csv(tmp_path):
    t = np.array([0.0, 1.0])
    c = np.array([[1.0, 0, 0], [0.6, 0.0, 0.8j]])
    header, rows = read_csv(write_trajectory(tmp_path / "tr.csv", Trajectory(t, c)))
    assert header == ["time", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3",
                      "occ_first", "occ_last", "eps"]
    assert float(rows[1][6]) == 0.8
    assert float(rows[1][-1]) == pytest.approx(0.0, abs=1e-15)
