"""Shared data types for grouped regression problems.

A :class:`GroupedDesign` holds the response, the covariate matrix and a
partition of the columns into contiguous groups. Everything downstream
(samplers, solvers, the simulation harness) consumes this one type.

Group indices are 0-based throughout the Python API.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from .constants import (
    DEFAULT_EM_INNER_ITERS,
    DEFAULT_EM_ROUNDS,
    DEFAULT_LAMBDA_INIT,
    DEFAULT_N_BURN,
    DEFAULT_N_ITER,
    DEFAULT_SEED,
    DEFAULT_T_INIT,
)
from .exceptions import ConfigurationError, DimensionMismatch, IndexOutOfRange, NonFiniteInput


def group_offsets(group_sizes: Sequence[int]) -> Tuple[int, ...]:
    """Start offsets of each group plus the total, length G+1."""
    offsets = [0]
    for size in group_sizes:
        offsets.append(offsets[-1] + int(size))
    return tuple(offsets)


def _check_sizes(group_sizes: Sequence[int]) -> Tuple[int, ...]:
    sizes = tuple(int(s) for s in group_sizes)
    if not sizes:
        raise DimensionMismatch("At least one group is required", "Pass a non-empty group list")
    if any(s < 1 for s in sizes):
        raise DimensionMismatch(
            f"Group sizes must be positive, got {list(sizes)}",
            "Every group needs at least one column",
        )
    return sizes


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class GroupedDesign:
    """Response, covariates and contiguous group partition.

    Construct through :func:`make_design`. Arrays are copied and made
    read-only so one design can be shared between concurrent chains.
    """

    y: np.ndarray
    x: np.ndarray
    group_sizes: Tuple[int, ...]
    offsets: Tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "group_sizes", _check_sizes(self.group_sizes))
        object.__setattr__(self, "offsets", group_offsets(self.group_sizes))
        object.__setattr__(self, "y", _frozen(self.y))
        object.__setattr__(self, "x", _frozen(self.x))

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def p(self) -> int:
        return int(self.x.shape[1])

    @property
    def n_groups(self) -> int:
        return len(self.group_sizes)

    def group_slice(self, g: int) -> slice:
        """Column slice owned by group ``g``."""
        if not 0 <= g < self.n_groups:
            raise IndexOutOfRange(
                f"Group index {g} out of range for {self.n_groups} groups",
                f"Use an index between 0 and {self.n_groups - 1}",
            )
        return slice(self.offsets[g], self.offsets[g + 1])

    def group_columns(self, g: int) -> np.ndarray:
        return self.x[:, self.group_slice(g)]

    def group_of_column(self) -> np.ndarray:
        """Group label of every column."""
        return np.repeat(np.arange(self.n_groups), self.group_sizes)

    def with_response(self, y: np.ndarray) -> "GroupedDesign":
        """Same covariates with a new response vector."""
        return make_design(y, self.x, self.group_sizes)

    def subset(self, rows: np.ndarray) -> "GroupedDesign":
        """Design restricted to the given observation indices."""
        return make_design(self.y[rows], self.x[rows], self.group_sizes)

    @cached_property
    def gram(self) -> np.ndarray:
        """XᵀX, computed once."""
        gram = self.x.T @ self.x
        gram.setflags(write=False)
        return gram

    @cached_property
    def xty(self) -> np.ndarray:
        """Xᵀy, computed once."""
        xty = self.x.T @ self.y
        xty.setflags(write=False)
        return xty


def make_design(y: Any, x: Any, group_sizes: Sequence[int]) -> GroupedDesign:
    """
    Validate inputs and build a :class:`GroupedDesign`.

    Args:
        y: Response vector of length n
        x: Covariate matrix n×p
        group_sizes: Sizes of the contiguous column groups

    Returns:
        Immutable design with precomputed group offsets

    Raises:
        DimensionMismatch: If shapes disagree with each other or with the groups
        NonFiniteInput: If any entry is NaN or infinite
    """
    y_arr = np.asarray(y, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if y_arr.ndim != 1:
        raise DimensionMismatch(f"Response must be a vector, got shape {y_arr.shape}")
    if x_arr.ndim != 2:
        raise DimensionMismatch(f"Covariates must be a matrix, got shape {x_arr.shape}")
    if y_arr.shape[0] < 1:
        raise DimensionMismatch("Design needs at least one observation")
    if x_arr.shape[0] != y_arr.shape[0]:
        raise DimensionMismatch(
            f"Response has {y_arr.shape[0]} rows but covariates have {x_arr.shape[0]}",
            "Check that y and X come from the same observations",
        )
    sizes = _check_sizes(group_sizes)
    if sum(sizes) != x_arr.shape[1]:
        raise DimensionMismatch(
            f"Group sizes sum to {sum(sizes)} but X has {x_arr.shape[1]} columns",
            "Group sizes must partition the covariate columns",
        )
    if not (np.all(np.isfinite(y_arr)) and np.all(np.isfinite(x_arr))):
        raise NonFiniteInput(
            "Design contains NaN or infinite values",
            "Remove or impute non-finite entries before fitting",
        )
    return GroupedDesign(y=y_arr, x=x_arr, group_sizes=sizes)


@dataclass(frozen=True)
class GroupedCoefficients:
    """Coefficient vector together with its group partition."""

    values: np.ndarray
    group_sizes: Tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = _check_sizes(self.group_sizes)
        values = _frozen(self.values).reshape(-1)
        if values.shape[0] != sum(sizes):
            raise DimensionMismatch(
                f"{values.shape[0]} coefficients for groups totalling {sum(sizes)}"
            )
        object.__setattr__(self, "group_sizes", sizes)
        object.__setattr__(self, "values", values)

    @property
    def offsets(self) -> Tuple[int, ...]:
        return group_offsets(self.group_sizes)

    @property
    def n_groups(self) -> int:
        return len(self.group_sizes)

    def group(self, g: int) -> np.ndarray:
        return group_view(self, g)

    def group_norms(self) -> np.ndarray:
        offsets = self.offsets
        return np.array(
            [np.linalg.norm(self.values[offsets[g] : offsets[g + 1]]) for g in range(self.n_groups)]
        )

    def tolist(self) -> list:
        return [float(v) for v in self.values]


def group_view(beta: GroupedCoefficients, g: int) -> np.ndarray:
    """
    Read-only slice of the coefficients belonging to group ``g``.

    Raises:
        IndexOutOfRange: If ``g`` is not a valid 0-based group index
    """
    if not 0 <= g < beta.n_groups:
        raise IndexOutOfRange(
            f"Group index {g} out of range for {beta.n_groups} groups",
            f"Use an index between 0 and {beta.n_groups - 1}",
        )
    offsets = beta.offsets
    return beta.values[offsets[g] : offsets[g + 1]]


@dataclass(frozen=True)
class SelectionPattern:
    """Group and coefficient inclusion flags.

    A coefficient flag implies its group flag, and a group flag implies at
    least one member coefficient flag.
    """

    group_included: Tuple[bool, ...]
    coef_included: Tuple[bool, ...]
    group_sizes: Tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = _check_sizes(self.group_sizes)
        groups = tuple(bool(v) for v in self.group_included)
        coefs = tuple(bool(v) for v in self.coef_included)
        if len(groups) != len(sizes) or len(coefs) != sum(sizes):
            raise DimensionMismatch("Selection flags do not match the group structure")
        offsets = group_offsets(sizes)
        for g, flag in enumerate(groups):
            if flag != any(coefs[offsets[g] : offsets[g + 1]]):
                raise DimensionMismatch(
                    f"Group flag {g} inconsistent with its coefficient flags",
                    "Build patterns with SelectionPattern.from_coefficients",
                )
        object.__setattr__(self, "group_sizes", sizes)
        object.__setattr__(self, "group_included", groups)
        object.__setattr__(self, "coef_included", coefs)

    @classmethod
    def from_coefficients(
        cls, coef_included: Sequence[bool], group_sizes: Sequence[int]
    ) -> "SelectionPattern":
        """Derive group flags from coefficient flags."""
        sizes = _check_sizes(group_sizes)
        offsets = group_offsets(sizes)
        coefs = tuple(bool(v) for v in coef_included)
        groups = tuple(any(coefs[offsets[g] : offsets[g + 1]]) for g in range(len(sizes)))
        return cls(group_included=groups, coef_included=coefs, group_sizes=sizes)

    @classmethod
    def from_groups(
        cls, group_included: Sequence[bool], group_sizes: Sequence[int]
    ) -> "SelectionPattern":
        """Expand group flags to every member coefficient."""
        sizes = _check_sizes(group_sizes)
        coefs = tuple(bool(flag) for flag, size in zip(group_included, sizes) for _ in range(size))
        return cls.from_coefficients(coefs, sizes)

    def flags(self, level: str) -> Tuple[bool, ...]:
        """Flags at ``"group"`` or ``"coef"`` level."""
        if level == "group":
            return self.group_included
        if level == "coef":
            return self.coef_included
        raise ConfigurationError(f"Unknown selection level: {level}", "Use 'group' or 'coef'")

    def to_dict(self) -> Dict[str, list]:
        return {"groups": list(self.group_included), "coefficients": list(self.coef_included)}


def selection_of(beta: GroupedCoefficients) -> SelectionPattern:
    """
    Inclusion pattern of a coefficient vector.

    A coefficient is included when it is not exactly 0.0 and a group is
    included when its L2 norm is nonzero. No tolerance is applied.
    """
    return SelectionPattern.from_coefficients(beta.values != 0.0, beta.group_sizes)


@dataclass(frozen=True)
class Standardizer:
    """Column centring and scaling learned on training data."""

    x_mean: np.ndarray
    x_scale: np.ndarray
    y_mean: float

    def transform(self, design: GroupedDesign) -> GroupedDesign:
        x = (design.x - self.x_mean) / self.x_scale
        return make_design(design.y - self.y_mean, x, design.group_sizes)

    def predict(self, x_raw: np.ndarray, beta: np.ndarray) -> np.ndarray:
        """Prediction on the original response scale."""
        return ((np.asarray(x_raw) - self.x_mean) / self.x_scale) @ beta + self.y_mean

    def unscale(self, beta: np.ndarray) -> np.ndarray:
        """Coefficients on the original covariate scale. Zeros stay exactly zero."""
        return np.asarray(beta, dtype=float) / self.x_scale


def standardize(design: GroupedDesign) -> Tuple[GroupedDesign, Standardizer]:
    """Centre y and give every column mean 0 and unit variance.

    Constant columns keep scale 1 so they map to zeros instead of NaN.
    """
    x_mean = design.x.mean(axis=0)
    x_scale = design.x.std(axis=0)
    x_scale = np.where(x_scale > 0, x_scale, 1.0)
    scaler = Standardizer(x_mean=x_mean, x_scale=x_scale, y_mean=float(design.y.mean()))
    return scaler.transform(design), scaler


def _require(condition: bool, message: str, suggestion: str = "") -> None:
    if not condition:
        raise ConfigurationError(message, suggestion)


@dataclass(frozen=True)
class BglSsHyper:
    """Hyperparameters of the group spike-and-slab lasso.

    ``lam`` and ``pi0`` fix the respective parameter when set; otherwise λ
    is tuned by Monte Carlo EM and π₀ gets a Beta(a, b) prior.
    ``alpha = gamma = 0`` is the improper 1/σ² prior.
    """

    a: float = 1.0
    b: float = 1.0
    alpha: float = 0.0
    gamma: float = 0.0
    lam: Optional[float] = None
    pi0: Optional[float] = None
    lambda_init: float = DEFAULT_LAMBDA_INIT

    def __post_init__(self) -> None:
        _require(self.a > 0 and self.b > 0, "Beta prior parameters a, b must be positive")
        _require(self.alpha >= 0 and self.gamma >= 0, "σ² prior parameters must be >= 0")
        _require(self.lam is None or self.lam > 0, "Fixed lambda must be positive")
        _require(self.pi0 is None or 0.0 <= self.pi0 <= 1.0, "Fixed pi0 must lie in [0, 1]")
        _require(self.lambda_init > 0, "Initial lambda must be positive")


@dataclass(frozen=True)
class BsglHyper:
    """Hyperparameters of the Bayesian sparse group lasso.

    λ₁² and λ₂² get Gamma(1, d₁) and Gamma(1, d₂) priors unless fixed.
    ``sigma2`` pins the noise variance (no-data prior checks).
    """

    d1: float = 0.1
    d2: float = 0.1
    alpha: float = 0.0
    gamma: float = 0.0
    lambda1_sq: Optional[float] = None
    lambda2_sq: Optional[float] = None
    sigma2: Optional[float] = None
    lambda1_sq_init: float = 1.0
    lambda2_sq_init: float = 1.0

    def __post_init__(self) -> None:
        _require(self.d1 > 0 and self.d2 > 0, "Rate hyperparameters d1, d2 must be positive")
        _require(self.alpha >= 0 and self.gamma >= 0, "σ² prior parameters must be >= 0")
        for name in ("lambda1_sq", "lambda2_sq", "sigma2"):
            value = getattr(self, name)
            _require(value is None or value > 0, f"Fixed {name} must be positive")
        _require(
            self.lambda1_sq_init > 0 and self.lambda2_sq_init > 0,
            "Initial lambda values must be positive",
        )


@dataclass(frozen=True)
class BsgsSsHyper:
    """Hyperparameters of the bi-level spike-and-slab sparse group model."""

    a1: float = 1.0
    a2: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    alpha: float = 0.1
    gamma: float = 0.1
    t: Optional[float] = None
    t_init: float = DEFAULT_T_INIT
    pi0: Optional[float] = None
    pi1: Optional[float] = None
    s2: Optional[float] = None

    def __post_init__(self) -> None:
        _require(
            min(self.a1, self.a2, self.c1, self.c2) > 0,
            "Beta prior parameters a1, a2, c1, c2 must be positive",
        )
        _require(self.alpha >= 0 and self.gamma >= 0, "σ² prior parameters must be >= 0")
        _require(self.t is None or self.t > 0, "Fixed t must be positive")
        _require(self.t_init > 0, "Initial t must be positive")
        _require(self.pi0 is None or 0.0 <= self.pi0 <= 1.0, "Fixed pi0 must lie in [0, 1]")
        _require(self.pi1 is None or 0.0 <= self.pi1 <= 1.0, "Fixed pi1 must lie in [0, 1]")
        _require(self.s2 is None or self.s2 > 0, "Fixed s2 must be positive")


@dataclass(frozen=True)
class SamplerConfig:
    """Chain lengths, seed, MC-EM settings and per-method hyperparameters."""

    n_iter: int = DEFAULT_N_ITER
    n_burn: int = DEFAULT_N_BURN
    seed: int = DEFAULT_SEED
    em_rounds: int = DEFAULT_EM_ROUNDS
    em_inner_iters: int = DEFAULT_EM_INNER_ITERS
    bgl_ss: BglSsHyper = field(default_factory=BglSsHyper)
    bsgl: BsglHyper = field(default_factory=BsglHyper)
    bsgs_ss: BsgsSsHyper = field(default_factory=BsgsSsHyper)

    def __post_init__(self) -> None:
        _require(self.n_iter >= 1, f"n_iter must be positive, got {self.n_iter}")
        _require(
            0 <= self.n_burn < self.n_iter,
            f"n_burn must satisfy 0 <= n_burn < n_iter, got {self.n_burn} / {self.n_iter}",
            "Lower --burn or raise --iters",
        )
        _require(self.em_rounds >= 0, "em_rounds must be non-negative")
        _require(self.em_inner_iters >= 1, "em_inner_iters must be positive")

    @property
    def n_kept(self) -> int:
        return self.n_iter - self.n_burn

    def replace(self, **changes: Any) -> "SamplerConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)
