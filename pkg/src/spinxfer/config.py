"""Experiment configuration: a flat TOML document of typed keys.

Example::

    kind = "compensation-scan"
    n = 10
    sigma_j2 = 0.1
    sigma_b2 = 0.5
    deviations = [0.0, 1e-4, 1e-3, 1e-2]
    realizations = 100
    seed = 7

``n`` accepts an integer, a list, or a range string such as ``"5:15"``
(inclusive). The master seed may be overridden by the SPINXFER_SEED
environment variable; command-line flags override both.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

import tomli

from .errors import ConfigError

KINDS = (
    "free-sweep-n",
    "compensation-scan",
    "adiabatic-run",
    "leakage-vs-field",
    "monte-carlo-fidelity",
)
SEED_ENV = "SPINXFER_SEED"


@dataclass
class ExperimentConfig:
    kind: str
    n: list = field(default_factory=lambda: [10])
    sigma_j2: float = 0.0
    sigma_b2: float = 0.0
    b_field: list = field(default_factory=lambda: [5.0])
    deviations: list = field(default_factory=lambda: [0.0])
    beta: float = 20.0
    f_target: float = 0.66
    alpha_scale: float = 1.0
    settle: float = 0.0  # in units of the free transfer time
    sweep_site: str = "first"
    tol: float = 1e-8
    realizations: int | None = None
    seed: int = 0
    out: str | None = None
    workers: int = 1
    emit_plot_data: bool = False
    samples_per_transfer: int = 500
    horizon_factor: float = 1.5

    def __post_init__(self):
        if self.realizations is None:
            self.realizations = 1 if self.kind == "adiabatic-run" else 100
        if self.out is None:
            self.out = f"runs/{self.kind}"
        validate(self)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def parse_int_list(key, value) -> list[int]:
    if isinstance(value, bool):
        raise ConfigError(key, f"expected integer(s), got {value!r}")
    if isinstance(value, int):
        return [value]
    if isinstance(value, (list, tuple)):
        out = []
        for v in value:
            out += parse_int_list(key, v)
        return out
    if isinstance(value, str):
        text = value.strip()
        try:
            if ":" in text:
                lo, hi = (int(x) for x in text.split(":"))
                return list(range(lo, hi + 1))
            return [int(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(key, f"cannot parse integer list from {value!r}") from None
    raise ConfigError(key, f"expected integer(s), got {value!r}")


def parse_float_list(key, value) -> list[float]:
    if isinstance(value, bool):
        raise ConfigError(key, f"expected number(s), got {value!r}")
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, (list, tuple)):
        out = []
        for v in value:
            out += parse_float_list(key, v)
        return out
    if isinstance(value, str):
        try:
            return [float(x) for x in value.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(key, f"cannot parse number list from {value!r}") from None
    raise ConfigError(key, f"expected number(s), got {value!r}")


def _scalar(key, value, kind):
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise ConfigError(key, f"expected a number, got {value!r}")
        try:
            return float(value)
        except ValueError:
            raise ConfigError(key, f"expected a number, got {value!r}") from None
    if kind == "int":
        if isinstance(value, bool):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(key, f"expected an integer, got {value!r}") from None
    if kind == "bool":
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false"):
            return value.lower() == "true"
        raise ConfigError(key, f"expected true/false, got {value!r}")
    if not isinstance(value, str):
        raise ConfigError(key, f"expected a string, got {value!r}")
    return value


COERCE = {
    "kind": "str", "sigma_j2": "float", "sigma_b2": "float", "beta": "float",
    "f_target": "float", "alpha_scale": "float", "settle": "float", "sweep_site": "str",
    "tol": "float", "realizations": "int", "seed": "int", "out": "str", "workers": "int",
    "emit_plot_data": "bool", "samples_per_transfer": "int", "horizon_factor": "float",
}


def coerce(mapping: dict) -> dict:
    """Type-check and normalize raw key/value pairs; unknown keys are errors."""
    out = {}
    for key, value in mapping.items():
        if key not in FIELD_TYPES:
            raise ConfigError(key, f"unknown key (expected one of: {', '.join(FIELD_TYPES)})")
        if key == "n":
            out[key] = parse_int_list(key, value)
        elif key in ("b_field", "deviations"):
            out[key] = parse_float_list(key, value)
        else:
            out[key] = _scalar(key, value, COERCE[key])
    return out


def validate(cfg: ExperimentConfig):
    if cfg.kind not in KINDS:
        raise ConfigError("kind", f"unknown experiment kind {cfg.kind!r} "
                                  f"(expected one of: {', '.join(KINDS)})")
    for key in ("n", "b_field", "deviations"):
        if not getattr(cfg, key):
            raise ConfigError(key, "grid must be nonempty")
    if any(n < 2 for n in cfg.n):
        raise ConfigError("n", "chain length must be >= 2")
    if any(n > 20 for n in cfg.n):
        # beyond N ~ 20 the effective coupling drops below double-precision resolution
        raise ConfigError("n", "chain length must be <= 20")
    if any(b < 2.0 for b in cfg.b_field):
        raise ConfigError("b_field", "terminal field must be >= 2 (isolation condition); "
                                     "negative fields are not supported")
    if cfg.sigma_j2 < 0:
        raise ConfigError("sigma_j2", "variance must be non-negative")
    if cfg.sigma_b2 < 0:
        raise ConfigError("sigma_b2", "variance must be non-negative")
    if cfg.realizations < 1:
        raise ConfigError("realizations", "need at least one realization")
    if cfg.workers < 1:
        raise ConfigError("workers", "need at least one worker")
    if not cfg.beta > 0:
        raise ConfigError("beta", "must be positive")
    if not 0 < cfg.f_target < 1:
        raise ConfigError("f_target", "must lie in (0, 1)")
    if not cfg.alpha_scale > 0:
        raise ConfigError("alpha_scale", "must be positive")
    if cfg.settle < 0:
        raise ConfigError("settle", "must be non-negative")
    if cfg.sweep_site not in ("first", "last"):
        raise ConfigError("sweep_site", "must be 'first' or 'last'")
    if not 0 < cfg.tol < 1:
        raise ConfigError("tol", "must lie in (0, 1)")
    if cfg.samples_per_transfer < 10:
        raise ConfigError("samples_per_transfer", "must be >= 10")
    if not cfg.horizon_factor >= 1.0:
        raise ConfigError("horizon_factor", "must be >= 1 so the first peak is covered")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed", "must be a 64-bit unsigned integer")


def read_config_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"file not found: {path}")
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError("config", f"{path}: {exc}") from None
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ConfigError(nested[0], "tables are not allowed; the config is a flat document")
    return data


def build_config(kind: str | None = None, file_values: dict | None = None,
                 overrides: dict | None = None, env=None) -> ExperimentConfig:
    """Merge file values, the seed environment variable and overrides, in that order."""
    env = os.environ if env is None else env
    values = coerce(dict(file_values or {}))
    if env.get(SEED_ENV):
        values.update(coerce({"seed": env[SEED_ENV]}))
    values.update(coerce(dict(overrides or {})))
    if kind is not None:
        if "kind" in values and values["kind"] != kind:
            raise ConfigError("kind", f"config says {values['kind']!r} but command is {kind!r}")
        values["kind"] = kind
    if "kind" not in values:
        raise ConfigError("kind", "experiment kind not given")
    return ExperimentConfig(**values)
