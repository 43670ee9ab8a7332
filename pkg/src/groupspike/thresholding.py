"""Closed-form estimators under an orthogonal design XᵀX = nI."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import ndtri

from .bgl_ss import spike_weight
from .core import GroupedCoefficients, GroupedDesign, group_view
from .exceptions import ConfigurationError, InputError


@dataclass(frozen=True)
class OrthogonalContext:
    """Fixed quantities of the spike-and-slab posterior under XᵀX = nI.

    ``tau2`` may be a scalar or one slab variance per group.
    """

    n: int
    sigma: float
    tau2: Union[float, np.ndarray]
    pi0: float
    beta_ls: GroupedCoefficients

    def __post_init__(self) -> None:
        tau2 = np.broadcast_to(
            np.asarray(self.tau2, dtype=float), (self.beta_ls.n_groups,)
        ).copy()
        if self.n < 1 or not self.sigma > 0 or not np.all(tau2 > 0):
            raise ConfigurationError("Orthogonal context needs n >= 1, sigma > 0 and tau2 > 0")
        if not 0.0 <= self.pi0 <= 1.0:
            raise ConfigurationError(f"pi0 must lie in [0, 1], got {self.pi0}")
        object.__setattr__(self, "tau2", tau2)

    @classmethod
    def from_design(
        cls,
        design: GroupedDesign,
        sigma: float,
        tau2: Union[float, np.ndarray],
        pi0: float,
        atol: float = 1e-8,
    ) -> "OrthogonalContext":
        """Context from a design whose Gram matrix is nI.

        Raises:
            InputError: If XᵀX is not n times the identity within ``atol``
        """
        n = design.n
        if not np.allclose(design.gram, n * np.eye(design.p), atol=atol * n):
            raise InputError("Design is not orthogonal (XᵀX != nI)")
        beta_ls = GroupedCoefficients(design.xty / n, design.group_sizes)
        return cls(n=n, sigma=sigma, tau2=tau2, pi0=pi0, beta_ls=beta_ls)

    def shrinkage(self, g: int) -> float:
        """B_g = 1 / (1 + nτ_g²)."""
        return 1.0 / (1.0 + self.n * float(self.tau2[g]))  # type: ignore[index]


def spike_prob(ctx: OrthogonalContext, g: int) -> float:
    """Posterior probability that group ``g`` is exactly zero.

    Exact 0 at π₀ = 0 and exact 1 at π₀ = 1.
    """
    beta_g = group_view(ctx.beta_ls, g)
    m = beta_g.shape[0]
    n_tau2 = ctx.n * float(ctx.tau2[g])  # type: ignore[index]
    one_minus_b = n_tau2 / (1.0 + n_tau2)
    log_ratio = -0.5 * m * math.log1p(n_tau2) + one_minus_b * ctx.n * float(beta_g @ beta_g) / (
        2.0 * ctx.sigma**2
    )
    return spike_weight(ctx.pi0, log_ratio)


def median_quantile(l_g: float) -> float:
    """Q = Φ⁻¹(1 / (2(1 − min(½, l)))); +inf once l reaches ½."""
    return float(ndtri(1.0 / (2.0 * (1.0 - min(0.5, l_g)))))


def median_threshold(ctx: OrthogonalContext) -> GroupedCoefficients:
    """
    Marginal posterior median of every coefficient.

    Soft thresholding of the shrunken least-squares estimate:
    sgn(β̂)·((1 − B)|β̂| − (σ/√n)·Q·√(1 − B))₊. A group whose spike
    probability is at least ½ is returned as exact zeros.
    """
    out = np.zeros(ctx.beta_ls.values.shape[0])
    offsets = ctx.beta_ls.offsets
    for g in range(ctx.beta_ls.n_groups):
        beta_g = group_view(ctx.beta_ls, g)
        q = median_quantile(spike_prob(ctx, g))
        if math.isinf(q):
            continue
        one_minus_b = 1.0 - ctx.shrinkage(g)
        cut = ctx.sigma / math.sqrt(ctx.n) * q * math.sqrt(one_minus_b)
        magnitude = np.maximum(one_minus_b * np.abs(beta_g) - cut, 0.0)
        out[offsets[g] : offsets[g + 1]] = np.sign(beta_g) * magnitude
    return GroupedCoefficients(out, ctx.beta_ls.group_sizes)


def group_lasso_threshold(
    beta_ls: GroupedCoefficients, n: int, lambda_n: float
) -> GroupedCoefficients:
    """
    Group soft thresholding (1 − λ_n / (n‖β̂_g‖₂))₊ β̂_g.

    A group is zeroed when n‖β̂_g‖₂ ≤ λ_n, equality included.
    """
    if lambda_n < 0:
        raise ConfigurationError(f"lambda_n must be non-negative, got {lambda_n}")
    out = np.zeros(beta_ls.values.shape[0])
    offsets = beta_ls.offsets
    for g in range(beta_ls.n_groups):
        beta_g = group_view(beta_ls, g)
        norm = float(np.linalg.norm(beta_g))
        if n * norm <= lambda_n:
            continue
        out[offsets[g] : offsets[g + 1]] = (1.0 - lambda_n / (n * norm)) * beta_g
    return GroupedCoefficients(out, beta_ls.group_sizes)
