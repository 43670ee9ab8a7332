"""Tests for config module."""

import pytest

from groupspike.config import (
    DEFAULT_CONFIG,
    create_default_config,
    get_config_value,
    load_config,
    sampler_config_from,
)
from groupspike.core import SamplerConfig
from groupspike.exceptions import ConfigurationError


def test_default_config_file_loads_to_defaults(tmp_path):
    """The generated config file reproduces the built-in defaults."""
    path = create_default_config(tmp_path / "groupspike.toml")
    config = load_config(path)
    assert config["sampler"] == DEFAULT_CONFIG["sampler"]
    assert sampler_config_from(config) == SamplerConfig()


def test_user_values_merge_over_defaults(tmp_path):
    """User sections update defaults key by key."""
    path = tmp_path / "custom.toml"
    path.write_text("[sampler]\nn_iter = 200\n\n[bgl_ss]\na = 2.0\n", encoding="utf-8")
    config = load_config(path)
    assert config["sampler"]["n_iter"] == 200
    assert config["sampler"]["n_burn"] == DEFAULT_CONFIG["sampler"]["n_burn"]
    sampler = sampler_config_from(config, n_burn=50)
    assert (sampler.n_iter, sampler.n_burn) == (200, 50)
    assert sampler.bgl_ss.a == 2.0


def test_load_config_missing_file(tmp_path):
    """An explicit path that does not exist is an error."""
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "nope.toml")


def test_load_config_invalid_toml(tmp_path):
    """Broken TOML and non-table sections are errors."""
    broken = tmp_path / "broken.toml"
    broken.write_text("[sampler\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_config(broken)

    flat = tmp_path / "flat.toml"
    flat.write_text('sampler = "fast"\n', encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_config(flat)


def test_sampler_config_rejects_unknown_and_invalid(tmp_path):
    """Unknown keys and invalid values raise ConfigurationError."""
    config = load_config(create_default_config(tmp_path / "c.toml"))
    config["bsgl"]["d3"] = 1.0
    with pytest.raises(ConfigurationError):
        sampler_config_from(config)

    config = load_config(create_default_config(tmp_path / "d.toml"))
    with pytest.raises(ConfigurationError):
        sampler_config_from(config, n_iter=10, n_burn=10)
    with pytest.raises(ConfigurationError):
        sampler_config_from(config, n_iter="many")


def test_get_config_value():
    """Nested lookups fall back to the default."""
    config = {"benchmark": {"reps": 5, "file": None}}
    assert get_config_value(config, "benchmark", "reps") == 5
    assert get_config_value(config, "benchmark", "file", default="x") == "x"
    assert get_config_value(config, "missing", "key", default=3) == 3
    assert get_config_value(config, "benchmark", "reps", "deeper", default=0) == 0
