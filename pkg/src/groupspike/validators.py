"""Input validation for command-line and configuration values."""

from __future__ import annotations

from pathlib import Path
from typing import List, Optional, Sequence

from .constants import LEVEL_COEF, LEVEL_GROUP, METHODS, MIN_BOOT_REPS
from .exceptions import ConfigurationError, InsufficientReplications, UnknownMethod


def validate_method(method: str) -> str:
    """
    Validate a method name.

    Args:
        method: Method name to validate, case-insensitive

    Returns:
        Normalised method name

    Raises:
        UnknownMethod: If the name is not registered
    """
    name = method.strip().lower() if isinstance(method, str) else str(method)
    if name not in METHODS:
        raise UnknownMethod(
            f"unknown method '{method}'",
            f"Use one of: {', '.join(METHODS)}",
        )
    return name


def validate_methods(methods: str) -> List[str]:
    """Parse a comma-separated method list, keeping order and dropping repeats."""
    names: List[str] = []
    for part in methods.split(","):
        if part.strip():
            name = validate_method(part)
            if name not in names:
                names.append(name)
    if not names:
        raise UnknownMethod("No method given", f"Use one or more of: {', '.join(METHODS)}")
    return names


def validate_file_path(
    file_path: Path, must_exist: bool = False, must_be_file: bool = False
) -> Path:
    """
    Validate and resolve a file path.

    Args:
        file_path: Path to validate
        must_exist: Whether the path must exist
        must_be_file: Whether the path must be a file

    Returns:
        Resolved, absolute path

    Raises:
        ConfigurationError: If path is invalid
    """
    if not isinstance(file_path, (Path, str)):
        raise ConfigurationError(
            "File path must be a Path object or string",
            "Use pathlib.Path or a valid string path",
        )

    path = Path(file_path).resolve()

    if must_exist and not path.exists():
        raise ConfigurationError(
            f"Path does not exist: {path}",
            "Ensure the file or directory exists",
        )

    if must_be_file and not path.is_file():
        raise ConfigurationError(
            f"Path is not a file: {path}",
            "Provide a valid file path",
        )

    return path


def validate_log_level(level: str) -> str:
    """
    Validate logging level.

    Args:
        level: Log level to validate

    Returns:
        Validated log level

    Raises:
        ConfigurationError: If level is invalid
    """
    valid_levels = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
    level_upper = level.upper() if isinstance(level, str) else str(level).upper()

    if level_upper not in valid_levels:
        raise ConfigurationError(
            f"Invalid log level: {level}",
            f"Use one of: {', '.join(valid_levels)}",
        )

    return level_upper


def validate_level(level: str) -> str:
    """Selection level for TPR/FPR tables: ``group`` or ``coef``."""
    name = level.strip().lower() if isinstance(level, str) else str(level)
    if name not in (LEVEL_GROUP, LEVEL_COEF):
        raise ConfigurationError(
            f"Invalid selection level: {level}",
            f"Use '{LEVEL_GROUP}' or '{LEVEL_COEF}'",
        )
    return name


def validate_reps(reps: int) -> int:
    """
    Validate a replication count.

    Raises:
        InsufficientReplications: If ``reps`` < 1
    """
    if reps < 1:
        raise InsufficientReplications(
            f"Number of replications must be at least 1, got {reps}",
            "Use --reps 1 or more",
        )
    return reps


def validate_boot_reps(boot_reps: int) -> int:
    if boot_reps < MIN_BOOT_REPS:
        raise ConfigurationError(
            f"Bootstrap resamples too few: {boot_reps} (minimum: {MIN_BOOT_REPS})",
            f"Set boot_reps to at least {MIN_BOOT_REPS}",
        )
    return boot_reps


def validate_probability(value: Optional[float], name: str) -> Optional[float]:
    """Check that an optional value lies in [0, 1]."""
    if value is None:
        return None
    if not 0.0 <= value <= 1.0:
        raise ConfigurationError(
            f"{name} must lie in [0, 1], got {value}",
            f"Pass a probability for {name}",
        )
    return value


def validate_positive(value: Optional[float], name: str) -> Optional[float]:
    if value is None:
        return None
    if not value > 0:
        raise ConfigurationError(f"{name} must be positive, got {value}")
    return value


def validate_group_sizes(sizes: Sequence[object]) -> List[int]:
    """
    Validate a group specification.

    Args:
        sizes: Parsed JSON array of group sizes

    Returns:
        Sizes as a list of ints

    Raises:
        ConfigurationError: If the array is empty or holds anything but positive integers
    """
    if not isinstance(sizes, (list, tuple)) or not sizes:
        raise ConfigurationError(
            "Group specification must be a non-empty JSON array of sizes",
            "Write the group sizes as e.g. [5, 5, 5, 5]",
        )
    out: List[int] = []
    for size in sizes:
        if isinstance(size, bool) or not isinstance(size, int) or size < 1:
            raise ConfigurationError(
                f"Invalid group size: {size!r}",
                "Every group size must be a positive integer",
            )
        out.append(size)
    return out
