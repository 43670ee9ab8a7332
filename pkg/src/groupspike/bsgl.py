"""Bayesian sparse group lasso.

Scale-mixture hierarchy::

    β | τ², γ², σ²  ~ N(0, σ² V),  V = diag((1/τ_gj² + 1/γ_g²)⁻¹)
    1/τ_gj² | β     ~ InverseGaussian(σλ₁/|β_gj|, λ₁²)
    1/γ_g²  | β     ~ InverseGaussian(σλ₂/‖β_g‖₂, λ₂²)
    λ₁², λ₂²        ~ Gamma(1, d₁), Gamma(1, d₂)

The posterior is continuous, so the chain never produces exact zeros and
only mean and median estimates are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from .constants import METHOD_BSGL, NORM_GUARD
from .core import BsglHyper, GroupedDesign, SamplerConfig
from .exceptions import InvalidParameter
from .logger import logger
from .posterior import ChainDraws, ChainRecorder
from .rand import (
    RngStream,
    draw_gamma,
    draw_inverse_gamma,
    draw_inverse_gaussian,
    draw_laplace,
    draw_mvnormal_canonical,
    precision_cholesky,
)


@dataclass
class BsglState:
    """Current values of every BSGL parameter."""

    beta: np.ndarray
    tau2: np.ndarray
    gamma2: np.ndarray
    sigma2: float
    lambda1_sq: float
    lambda2_sq: float
    group_of: np.ndarray
    hyper: BsglHyper = field(default_factory=BsglHyper)

    @property
    def v(self) -> np.ndarray:
        """Diagonal of V, the harmonic combination of τ² and the group γ²."""
        return 1.0 / (1.0 / self.tau2 + 1.0 / self.gamma2[self.group_of])


def step_beta_full(state: BsglState, design: GroupedDesign, rng: RngStream) -> BsglState:
    """
    Draw β from N((XᵀX + V⁻¹)⁻¹Xᵀy, σ²(XᵀX + V⁻¹)⁻¹).

    Raises:
        NotPositiveDefinite: If XᵀX + V⁻¹ cannot be factorised
    """
    v = state.v
    if not np.all(np.isfinite(v) & (v > 0)):
        raise InvalidParameter("Prior variances V must be positive and finite")
    chol = precision_cholesky(design.gram + np.diag(1.0 / v))
    state.beta, _ = draw_mvnormal_canonical(chol, np.asarray(design.xty), state.sigma2, rng)
    return state


def beta_conditional_mean(state: BsglState, design: GroupedDesign) -> np.ndarray:
    """Mean of the β conditional, (XᵀX + V⁻¹)⁻¹Xᵀy."""
    chol = precision_cholesky(design.gram + np.diag(1.0 / state.v))
    return linalg.cho_solve((chol, True), design.xty)


def _inverse_scale_draw(norm: float, lam_sq: float, sigma: float, rng: RngStream) -> float:
    """Draw a mixing variance whose reciprocal is InverseGaussian(σλ/norm, λ²).

    Below the guard the draw comes from the β → 0 limit, Gamma(½, λ²/2).
    """
    if norm < NORM_GUARD:
        return float(draw_gamma(0.5, 0.5 * lam_sq, rng))
    return 1.0 / float(draw_inverse_gaussian(sigma * math.sqrt(lam_sq) / norm, lam_sq, rng))


def step_gamma2(state: BsglState, design: GroupedDesign, rng: RngStream) -> BsglState:
    """Redraw every group variance γ_g²."""
    if not state.lambda2_sq > 0:
        raise InvalidParameter(f"lambda2^2 must be positive, got {state.lambda2_sq}")
    sigma = math.sqrt(state.sigma2)
    for g in range(design.n_groups):
        norm = float(np.linalg.norm(state.beta[design.group_slice(g)]))
        if norm < NORM_GUARD:
            logger.warning(f"Group {g} norm {norm:.3g} below guard; drawing gamma2 from limit")
        state.gamma2[g] = _inverse_scale_draw(norm, state.lambda2_sq, sigma, rng)
    return state


def step_tau2_bsgl(state: BsglState, design: GroupedDesign, rng: RngStream) -> BsglState:
    """Redraw every coefficient variance τ_gj²."""
    if not state.lambda1_sq > 0:
        raise InvalidParameter(f"lambda1^2 must be positive, got {state.lambda1_sq}")
    sigma = math.sqrt(state.sigma2)
    for j in range(design.p):
        magnitude = abs(float(state.beta[j]))
        if magnitude < NORM_GUARD:
            logger.warning(f"Coefficient {j} magnitude {magnitude:.3g} below guard")
        state.tau2[j] = _inverse_scale_draw(magnitude, state.lambda1_sq, sigma, rng)
    return state


def sigma2_conditional_bsgl(state: BsglState, design: GroupedDesign) -> Tuple[float, float]:
    """Shape (p + n)/2 + α and scale ½RSS + ½βᵀV⁻¹β + γ."""
    resid = design.y - design.x @ state.beta
    shape = 0.5 * (design.p + design.n) + state.hyper.alpha
    scale = (
        0.5 * float(resid @ resid)
        + 0.5 * float(np.sum(state.beta**2 / state.v))
        + state.hyper.gamma
    )
    return shape, scale


def step_sigma2_bsgl(state: BsglState, design: GroupedDesign, rng: RngStream) -> BsglState:
    if state.hyper.sigma2 is not None:
        state.sigma2 = state.hyper.sigma2
        return state
    shape, scale = sigma2_conditional_bsgl(state, design)
    state.sigma2 = float(draw_inverse_gamma(shape, scale, rng))
    return state


def lambda_conditionals(state: BsglState) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """(shape, rate) of the λ₁² and λ₂² Gamma conditionals.

    Raises:
        InvalidParameter: If d₁ or d₂ is not positive
    """
    hyper = state.hyper
    if not (hyper.d1 > 0 and hyper.d2 > 0):
        raise InvalidParameter(f"d1 and d2 must be positive, got {hyper.d1}, {hyper.d2}")
    p = state.tau2.shape[0]
    n_groups = state.gamma2.shape[0]
    first = (p + 1.0, 0.5 * float(np.sum(state.tau2)) + hyper.d1)
    second = (0.5 * n_groups + 1.0, 0.5 * float(np.sum(state.gamma2)) + hyper.d2)
    return first, second


def step_lambdas(state: BsglState, rng: RngStream) -> BsglState:
    """Redraw λ₁² and λ₂² unless they are fixed."""
    (shape1, rate1), (shape2, rate2) = lambda_conditionals(state)
    hyper = state.hyper
    if hyper.lambda1_sq is None:
        state.lambda1_sq = float(draw_gamma(shape1, rate1, rng))
    if hyper.lambda2_sq is None:
        state.lambda2_sq = float(draw_gamma(shape2, rate2, rng))
    return state


def gibbs_sweep(state: BsglState, design: GroupedDesign, rng: RngStream) -> BsglState:
    """One systematic scan: β, γ², τ², σ², then λ₁² and λ₂²."""
    step_beta_full(state, design, rng)
    step_gamma2(state, design, rng)
    step_tau2_bsgl(state, design, rng)
    step_sigma2_bsgl(state, design, rng)
    step_lambdas(state, rng)
    return state


def initial_state(design: GroupedDesign, hyper: BsglHyper) -> BsglState:
    beta = linalg.solve(design.gram + np.eye(design.p), design.xty, assume_a="pos")
    if hyper.sigma2 is not None:
        sigma2 = hyper.sigma2
    else:
        sigma2 = float(np.var(design.y - design.x @ beta))
        if not sigma2 > 0:
            sigma2 = max(float(np.var(design.y)), 1.0)
    return BsglState(
        beta=np.array(beta, dtype=float),
        tau2=np.ones(design.p),
        gamma2=np.ones(design.n_groups),
        sigma2=sigma2,
        lambda1_sq=hyper.lambda1_sq if hyper.lambda1_sq is not None else hyper.lambda1_sq_init,
        lambda2_sq=hyper.lambda2_sq if hyper.lambda2_sq is not None else hyper.lambda2_sq_init,
        group_of=design.group_of_column(),
        hyper=hyper,
    )


def run_bsgl(design: GroupedDesign, config: SamplerConfig, rng: RngStream) -> ChainDraws:
    """Run the BSGL Gibbs sampler and keep the draws after burn-in."""
    state = initial_state(design, config.bsgl)
    recorder = ChainRecorder(
        METHOD_BSGL,
        design.group_sizes,
        config.n_iter,
        config.n_burn,
        {
            "tau2": (design.p,),
            "gamma2": (design.n_groups,),
            "sigma2": (),
            "lambda1_sq": (),
            "lambda2_sq": (),
        },
        sparse=False,
    )
    for iteration in range(config.n_iter):
        gibbs_sweep(state, design, rng)
        recorder.record(
            iteration,
            state.beta,
            tau2=state.tau2,
            gamma2=state.gamma2,
            sigma2=state.sigma2,
            lambda1_sq=state.lambda1_sq,
            lambda2_sq=state.lambda2_sq,
        )
    return recorder.finish()


def draw_scaled_prior(
    group_sizes: Tuple[int, ...], lambda1: float, lambda2: float, rng: RngStream
) -> np.ndarray:
    """Draw u with density ∝ exp(−λ₁‖u‖₁ − λ₂Σ_g‖u_g‖₂).

    Laplace(λ₁) proposals are accepted with probability exp(−λ₂Σ_g‖u_g‖₂).
    β = σu is then a draw from the marginal prior of β given σ.
    """
    offsets = np.cumsum((0,) + tuple(group_sizes))
    p = int(offsets[-1])
    while True:
        u = np.asarray(draw_laplace(lambda1, rng, p), dtype=float)
        penalty = sum(
            float(np.linalg.norm(u[offsets[g] : offsets[g + 1]])) for g in range(len(group_sizes))
        )
        if rng.uniform() <= math.exp(-lambda2 * penalty):
            return u


def draw_prior(
    group_sizes: Tuple[int, ...],
    hyper: BsglHyper,
    lambda1_sq: float,
    lambda2_sq: float,
    rng: RngStream,
    sigma2: Optional[float] = None,
) -> BsglState:
    """Joint prior draw of (σ², β, τ², γ²) for fixed λ₁², λ₂²."""
    if sigma2 is None:
        if hyper.alpha <= 0 or hyper.gamma <= 0:
            raise InvalidParameter("Prior draws need a proper sigma2 prior or a fixed sigma2")
        sigma2 = float(draw_inverse_gamma(hyper.alpha, hyper.gamma, rng))
    sigma = math.sqrt(sigma2)
    beta = sigma * draw_scaled_prior(
        group_sizes, math.sqrt(lambda1_sq), math.sqrt(lambda2_sq), rng
    )
    group_of = np.repeat(np.arange(len(group_sizes)), group_sizes)
    offsets = np.cumsum((0,) + tuple(group_sizes))
    tau2 = np.array([_inverse_scale_draw(abs(b), lambda1_sq, sigma, rng) for b in beta])
    gamma2 = np.array(
        [
            _inverse_scale_draw(
                float(np.linalg.norm(beta[offsets[g] : offsets[g + 1]])), lambda2_sq, sigma, rng
            )
            for g in range(len(group_sizes))
        ]
    )
    return BsglState(
        beta=beta,
        tau2=tau2,
        gamma2=gamma2,
        sigma2=sigma2,
        lambda1_sq=lambda1_sq,
        lambda2_sq=lambda2_sq,
        group_of=group_of,
        hyper=hyper,
    )
