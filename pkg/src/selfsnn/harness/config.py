"""Experiment configuration: typed overrides, YAML files and a canonical hash."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..rng import check_seed
from .registry import get_experiment

_TRUE = {"true", "1", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}


class ConfigError(ValueError):
    pass


def coerce(key: str, raw, default):
    """Convert ``raw`` (string or YAML scalar) to the type of ``default``."""
    try:
        if isinstance(default, bool):
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in _TRUE:
                return True
            if text in _FALSE:
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            if isinstance(raw, bool) or (isinstance(raw, float) and not raw.is_integer()):
                raise ValueError(raw)
            return int(raw)
        if isinstance(default, float):
            if isinstance(raw, bool):
                raise ValueError(raw)
            value = float(raw)
            if value != value or value in (float("inf"), float("-inf")):
                raise ValueError(raw)
            return value
        if isinstance(default, str):
            if not isinstance(raw, (str, int, float)) or isinstance(raw, bool):
                raise ValueError(raw)
            return str(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value {raw!r} for parameter {key!r} "
                          f"(expected {type(default).__name__})") from None
    raise ConfigError(f"parameter {key!r} has an unsupported type")


def parse_set(items) -> dict:
    """``["a=1", "b=x"]`` -> ``{"a": "1", "b": "x"}``."""
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"override {item!r} has an empty key")
        out[key] = value
    return out


def load_yaml(path) -> dict:
    """Read a config file: a mapping with optional ``seed`` and ``params`` keys."""
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    unknown = set(data) - {"experiment", "seed", "params", "out"}
    if unknown:
        raise ConfigError(f"{path}: unknown top-level keys {sorted(unknown)}")
    params = data.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigError(f"{path}: params must be a mapping")
    return data


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 0
    overrides: dict = field(default_factory=dict)
    out: str = "out"

    def __post_init__(self):
        exp = get_experiment(self.experiment)
        try:
            object.__setattr__(self, "seed", check_seed(int(self.seed)))
        except (TypeError, ValueError) as err:
            raise ConfigError(f"invalid seed: {err}") from None
        typed = {}
        for key, raw in self.overrides.items():
            if key not in exp.defaults:
                valid = ", ".join(sorted(exp.defaults)) or "none"
                raise ConfigError(f"unknown parameter {key!r} for {self.experiment} (valid: {valid})")
            typed[key] = coerce(key, raw, exp.defaults[key])
        object.__setattr__(self, "overrides", typed)

    @property
    def params(self) -> dict:
        return {**get_experiment(self.experiment).defaults, **self.overrides}

    def canonical(self) -> dict:
        """Everything that determines the outputs (the output directory does not)."""
        return {"experiment": self.experiment, "seed": self.seed,
                "params": dict(sorted(self.params.items()))}

    def config_hash(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    @property
    def run_dir(self) -> Path:
        return Path(self.out) / f"{self.experiment}-{self.seed}"

    @classmethod
    def build(cls, experiment: str, seed=None, sets=None, config_file=None, out=None) -> "ExperimentConfig":
        """Merge a YAML file and CLI overrides; the CLI wins."""
        data = load_yaml(config_file) if config_file else {}
        if data.get("experiment") not in (None, experiment):
            raise ConfigError(f"config file is for {data['experiment']!r}, not {experiment!r}")
        overrides = {**(data.get("params") or {}), **parse_set(sets)}
        return cls(experiment, data.get("seed", 0) if seed is None else seed, overrides,
                   out if out is not None else data.get("out", "out"))
