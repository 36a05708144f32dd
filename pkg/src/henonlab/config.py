"""Run configuration: defaults, config file, environment, flags.

Precedence, lowest to highest: built-in defaults, config file (TOML or
JSON), environment, command-line flags.  Environment participates for
the cache path and the parallelism degree only; everything else must be
stated in the file or on the command line so runs stay reproducible
from their recorded config alone.
"""

from __future__ import annotations

import dataclasses
import json
import os
import sys
from dataclasses import dataclass

import sympy

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

__all__ = ["RunConfig", "ConfigError", "load_config_file", "resolve_config"]

ENV_CACHE = "HENONLAB_CACHE"
ENV_JOBS = "HENONLAB_JOBS"


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-8
    eps: float = 1e-6
    n_max: int = 2048
    primes: tuple[int, ...] = (101, 103)
    seed: int = 0
    cache_path: str | None = None
    out_format: str = "json"
    jobs: int = 1

    def __post_init__(self):
        if self.tol <= 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.eps <= 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if self.n_max < 1:
            raise ConfigError(f"n_max must be >= 1, got {self.n_max}")
        if not self.primes:
            raise ConfigError("primes must be nonempty")
        for p in self.primes:
            if p < 2 or not sympy.isprime(p):
                raise ConfigError(f"primes must be prime numbers, got {p}")
        if self.out_format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.out_format}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["primes"] = list(self.primes)
        d["format"] = d.pop("out_format")
        return d


_FILE_KEYS = {
    "tol": float,
    "eps": float,
    "n_max": int,
    "primes": tuple,
    "seed": int,
    "cache": str,  # alias, matches the --cache flag
    "cache_path": str,
    "format": str,
    "jobs": int,
}


def load_config_file(path: str) -> dict:
    """Read a TOML or JSON config file into a field dict.

    Unknown keys are rejected by name so a typo cannot silently fall
    back to a default.
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"config file {path}: {exc}") from None
    doc = None
    if path.endswith(".json"):
        try:
            doc = json.loads(raw)
        except ValueError as exc:
            raise ConfigError(f"config file {path}: {exc}") from None
    else:
        try:
            doc = _toml.loads(raw.decode("utf-8"))
        except (_toml.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"config file {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path}: top level must be a table")
    out = {}
    for key, value in doc.items():
        if key not in _FILE_KEYS:
            raise ConfigError(f"config file {path}: unknown field {key!r}")
        if key == "primes":
            if not isinstance(value, list) or not all(
                isinstance(v, int) for v in value
            ):
                raise ConfigError("primes must be a list of integers")
            out["primes"] = tuple(value)
        elif key == "format":
            out["out_format"] = str(value)
        elif key in ("cache", "cache_path"):
            out["cache_path"] = str(value)
        else:
            out[key] = _FILE_KEYS[key](value)
    return out


def resolve_config(
    config_path: str | None = None,
    overrides: dict | None = None,
    env: dict | None = None,
) -> RunConfig:
    """Merge defaults, file, environment, and explicit flag overrides."""
    env = os.environ if env is None else env
    fields: dict = {}
    if config_path is not None:
        fields.update(load_config_file(config_path))
    if ENV_CACHE in env:
        fields["cache_path"] = env[ENV_CACHE]
    if ENV_JOBS in env:
        try:
            fields["jobs"] = int(env[ENV_JOBS])
        except ValueError:
            raise ConfigError(
                f"{ENV_JOBS} must be an integer, got {env[ENV_JOBS]!r}"
            ) from None
    for key, value in (overrides or {}).items():
        if value is not None:
            fields[key] = value
    return RunConfig(**fields)
