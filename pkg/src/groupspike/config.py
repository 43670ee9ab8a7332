"""Configuration management for groupspike."""

import copy
from pathlib import Path
from typing import Any, Dict, Optional

# Try tomllib (Python 3.11+)
try:
    import tomllib
except ImportError:
    tomllib = None  # type: ignore

# Fallback to tomli for older Python versions
try:
    import tomli
except ImportError:
    tomli = None

from .constants import (
    DEFAULT_BOOT_REPS,
    DEFAULT_CONFIG_FILE,
    DEFAULT_EM_INNER_ITERS,
    DEFAULT_EM_ROUNDS,
    DEFAULT_FOLDS,
    DEFAULT_N_BURN,
    DEFAULT_N_ITER,
    DEFAULT_RC_FILE,
    DEFAULT_REPS,
    DEFAULT_SEED,
)
from .core import BglSsHyper, BsglHyper, BsgsSsHyper, SamplerConfig
from .exceptions import ConfigurationError
from .utils import get_home_config_dir

DEFAULT_CONFIG: Dict[str, Any] = {
    "sampler": {
        "n_iter": DEFAULT_N_ITER,
        "n_burn": DEFAULT_N_BURN,
        "seed": DEFAULT_SEED,
        "em_rounds": DEFAULT_EM_ROUNDS,
        "em_inner_iters": DEFAULT_EM_INNER_ITERS,
    },
    "bgl_ss": {"a": 1.0, "b": 1.0, "alpha": 0.0, "gamma": 0.0},
    "bsgl": {"d1": 0.1, "d2": 0.1},
    "bsgs_ss": {"a1": 1.0, "a2": 1.0, "c1": 1.0, "c2": 1.0, "alpha": 0.1, "gamma": 0.1},
    "benchmark": {
        "reps": DEFAULT_REPS,
        "boot_reps": DEFAULT_BOOT_REPS,
        "folds": DEFAULT_FOLDS,
        "jobs": 1,
    },
    "logging": {
        "level": "INFO",
        "file": None,
    },
}


def load_config(config_path: Optional[Path] = None) -> Dict[str, Any]:
    """
    Load configuration from TOML file.

    Args:
        config_path: Path to config file. If None, searches for:
            1. groupspike.toml in current directory
            2. .groupspikerc in current directory
            3. ~/.groupspike/config.toml

    Returns:
        Configuration dictionary with user sections merged over the defaults

    Raises:
        ConfigurationError: If config file is missing or invalid
    """
    default_config = copy.deepcopy(DEFAULT_CONFIG)

    if config_path is None:
        search_paths = [
            Path(DEFAULT_CONFIG_FILE),
            Path(DEFAULT_RC_FILE),
            get_home_config_dir() / "config.toml",
        ]

        for path in search_paths:
            if path.exists():
                config_path = path
                break
    else:
        if not config_path.exists():
            raise ConfigurationError(
                f"Config file not found: {config_path}",
                "Create it with 'groupspike init-config' or omit --config",
            )

    if config_path is None or not config_path.exists():
        return default_config

    try:
        if tomllib is not None:
            with config_path.open("rb") as f:
                user_config = tomllib.load(f)
        elif tomli is not None:
            with config_path.open("rb") as f:
                user_config = tomli.load(f)
        else:
            raise ConfigurationError(
                "TOML parsing not available. Install tomli: pip install tomli",
                "Or upgrade to Python 3.11+",
            )
    except ConfigurationError:
        raise
    except Exception as e:
        raise ConfigurationError(
            f"Error parsing config file {config_path}: {e}",
            "Check TOML syntax and file permissions",
        ) from e

    merged_config = default_config
    for section, values in user_config.items():
        if section in merged_config and isinstance(merged_config[section], dict):
            if not isinstance(values, dict):
                raise ConfigurationError(
                    f"Section [{section}] in {config_path} must be a table",
                    f"Write it as a [{section}] block of key = value pairs",
                )
            merged_config[section].update(values)
        else:
            merged_config[section] = values

    return merged_config


def get_config_value(config: Dict[str, Any], *keys: str, default: Any = None) -> Any:
    """
    Get nested config value safely.

    Args:
        config: Configuration dictionary
        *keys: Nested keys to traverse
        default: Default value if key not found

    Returns:
        Config value or default
    """
    value = config
    for key in keys:
        if isinstance(value, dict):
            value = value.get(key)
            if value is None:
                return default
        else:
            return default
    return value if value is not None else default


def _section(config: Dict[str, Any], name: str, allowed: set) -> Dict[str, Any]:
    values = dict(config.get(name) or {})
    unknown = set(values) - allowed
    if unknown:
        raise ConfigurationError(
            f"Unknown keys in [{name}]: {', '.join(sorted(unknown))}",
            f"Allowed keys: {', '.join(sorted(allowed))}",
        )
    return values


def sampler_config_from(config: Dict[str, Any], **overrides: Any) -> SamplerConfig:
    """
    Build a validated :class:`SamplerConfig` from a loaded configuration.

    Keyword overrides (typically CLI flags) replace file values when not None.

    Raises:
        ConfigurationError: On unknown keys or invalid values
    """
    sampler = _section(
        config, "sampler", {"n_iter", "n_burn", "seed", "em_rounds", "em_inner_iters"}
    )
    sampler.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SamplerConfig(
            n_iter=int(sampler.get("n_iter", DEFAULT_N_ITER)),
            n_burn=int(sampler.get("n_burn", DEFAULT_N_BURN)),
            seed=int(sampler.get("seed", DEFAULT_SEED)),
            em_rounds=int(sampler.get("em_rounds", DEFAULT_EM_ROUNDS)),
            em_inner_iters=int(sampler.get("em_inner_iters", DEFAULT_EM_INNER_ITERS)),
            bgl_ss=BglSsHyper(**_section(config, "bgl_ss", {"a", "b", "alpha", "gamma"})),
            bsgl=BsglHyper(**_section(config, "bsgl", {"d1", "d2"})),
            bsgs_ss=BsgsSsHyper(
                **_section(config, "bsgs_ss", {"a1", "a2", "c1", "c2", "alpha", "gamma"})
            ),
        )
    except (TypeError, ValueError) as e:
        raise ConfigurationError(
            f"Invalid sampler configuration: {e}",
            "Use numbers for every sampler setting",
        ) from e


def create_default_config(output_path: Path) -> Path:
    """
    Create a default configuration file.

    Args:
        output_path: Path where to create config file

    Returns:
        Path to created config file
    """
    default_content = f"""# groupspike configuration

[sampler]
# Gibbs iterations per chain and how many of them are burn-in
n_iter = {DEFAULT_N_ITER}
n_burn = {DEFAULT_N_BURN}
# Master seed; the same seed and settings reproduce a report exactly
seed = {DEFAULT_SEED}
# Monte Carlo EM rounds for lambda (BGL-SS) and t (BSGS-SS); 0 disables tuning
em_rounds = {DEFAULT_EM_ROUNDS}
em_inner_iters = {DEFAULT_EM_INNER_ITERS}

[bgl_ss]
# Beta(a, b) prior on the group spike probability pi0
a = 1.0
b = 1.0
# Inverse-gamma(alpha, gamma) prior on sigma^2; 0, 0 is the 1/sigma^2 prior
alpha = 0.0
gamma = 0.0

[bsgl]
# Gamma(1, d) priors on lambda1^2 and lambda2^2
d1 = 0.1
d2 = 0.1

[bsgs_ss]
# Beta priors on the group (pi0) and coefficient (pi1) spike probabilities
a1 = 1.0
a2 = 1.0
c1 = 1.0
c2 = 1.0
alpha = 0.1
gamma = 0.1

[benchmark]
reps = {DEFAULT_REPS}
# Bootstrap resamples for the standard error of the median MSE (at least 100)
boot_reps = {DEFAULT_BOOT_REPS}
# Cross-validation folds for the group lasso and sparse group lasso
folds = {DEFAULT_FOLDS}
# Concurrent replications; 0 uses every physical core
jobs = 1

[logging]
# Logging level: DEBUG, INFO, WARNING, ERROR, CRITICAL
level = "INFO"
# Log file path (omit for default: ~/.groupspike/logs/groupspike.log)
# file = "groupspike.log"
"""

    output_path.write_text(default_content, encoding="utf-8")
    return output_path
