import json

import pytest

from henonlab.config import ConfigError, RunConfig, load_config_file, resolve_config


def test_defaults():
    cfg = resolve_config()
    assert cfg.tol == 1e-8
    assert cfg.primes == (101, 103)
    assert cfg.jobs == 1
    assert cfg.out_format == "json"


def test_validation_names_field():
    with pytest.raises(ConfigError, match="tol"):
        RunConfig(tol=-1.0)
    with pytest.raises(ConfigError, match="jobs"):
        RunConfig(jobs=0)
    with pytest.raises(ConfigError, match="primes"):
        RunConfig(primes=(4,))
    with pytest.raises(ConfigError, match="format"):
        RunConfig(out_format="xml")


def test_toml_file(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text('tol = 1e-10\nseed = 3\nprimes = [5, 7]\n')
    cfg = resolve_config(str(p))
    assert cfg.tol == 1e-10
    assert cfg.seed == 3
    assert cfg.primes == (5, 7)


def test_json_file(tmp_path):
    p = tmp_path / "run.json"
    p.write_text(json.dumps({"eps": 1e-3, "jobs": 2}))
    cfg = resolve_config(str(p))
    assert cfg.eps == 1e-3
    assert cfg.jobs == 2


def test_unknown_field_rejected(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text("unknown_thing = 1\n")
    with pytest.raises(ConfigError, match="unknown_thing"):
        load_config_file(str(p))


def test_flag_overrides_file(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text("tol = 1e-4\nseed = 3\n")
    cfg = resolve_config(str(p), overrides={"tol": 1e-12})
    assert cfg.tol == 1e-12
    assert cfg.seed == 3  # untouched by the override


def test_env_overrides_file_but_not_flags(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text('cache = "from_file.jsonl"\njobs = 2\n')
    env = {"HENONLAB_CACHE": "from_env.jsonl", "HENONLAB_JOBS": "4"}
    cfg = resolve_config(str(p), env=env)
    assert cfg.cache_path == "from_env.jsonl"
    assert cfg.jobs == 4
    cfg = resolve_config(str(p), overrides={"jobs": 8}, env=env)
    assert cfg.jobs == 8


def test_env_jobs_must_be_int():
    with pytest.raises(ConfigError, match="HENONLAB_JOBS"):
        resolve_config(env={"HENONLAB_JOBS": "many"})


def test_as_dict_shape():
    d = RunConfig().as_dict()
    assert d["format"] == "json"
    assert d["primes"] == [101, 103]
    assert "out_format" not in d
