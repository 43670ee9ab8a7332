"""Bayesian group lasso with a group-level spike-and-slab prior.

Hierarchy::

    y | β, σ²          ~ N(Xβ, σ² I)
    β_g | τ_g², σ², π₀ ~ π₀ δ₀ + (1 − π₀) N(0, σ² τ_g² I)
    τ_g²               ~ Gamma((m_g + 1)/2, rate λ²/2)
    σ²                 ~ InverseGamma(α, γ)    (α = γ = 0 gives 1/σ²)
    π₀                 ~ Beta(a, b)            (or fixed)

λ is fixed or tuned by Monte Carlo EM. Fixing π₀ = 0 removes the spike and
gives the plain Bayesian group lasso.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.special import expit, gammaln

from .constants import METHOD_BGL_SS
from .core import BglSsHyper, GroupedDesign, SamplerConfig
from .exceptions import (
    DegenerateEstimate,
    InvalidParameter,
    NotPositiveDefinite,
    SingularCovariance,
)
from .logger import logger
from .posterior import ChainDraws, ChainRecorder, EmResult, em_converged
from .rand import (
    RngStream,
    draw_beta,
    draw_gamma,
    draw_inverse_gamma,
    draw_inverse_gaussian,
    draw_mvnormal_canonical,
    precision_cholesky,
)


@dataclass
class BglState:
    """Current values of every BGL-SS parameter. Z_g is derived from ``beta``."""

    beta: np.ndarray
    tau2: np.ndarray
    sigma2: float
    pi0: float
    lam: float
    hyper: BglSsHyper = field(default_factory=BglSsHyper)

    def z(self, design: GroupedDesign) -> np.ndarray:
        """Group nonzero flags Z_g."""
        return np.array(
            [np.any(self.beta[design.group_slice(g)] != 0.0) for g in range(design.n_groups)]
        )


def log_slab_ratio(xtr: np.ndarray, chol: np.ndarray, tau2: float, sigma2: float) -> float:
    """Log of the slab-to-spike marginal likelihood ratio for one group.

    ``chol`` is the lower Cholesky factor of X_gᵀX_g + I/τ².
    """
    m = xtr.shape[0]
    w = linalg.solve_triangular(chol, xtr, lower=True)
    return float(
        -0.5 * m * math.log(tau2) - np.sum(np.log(np.diag(chol))) + (w @ w) / (2.0 * sigma2)
    )


def spike_weight(pi0: float, log_ratio: float) -> float:
    """π₀ / (π₀ + (1 − π₀)·exp(log_ratio)) evaluated in log space."""
    if pi0 <= 0.0:
        return 0.0
    if pi0 >= 1.0:
        return 1.0
    return float(expit(math.log(pi0) - math.log1p(-pi0) - log_ratio))


def _group_precision(design: GroupedDesign, g: int, tau2: float) -> np.ndarray:
    block = design.group_slice(g)
    gram = design.gram[block, block]
    try:
        return precision_cholesky(gram + np.eye(gram.shape[0]) / tau2)
    except NotPositiveDefinite as e:
        raise SingularCovariance(
            f"Conditional covariance of group {g} is singular (tau2={tau2:g})",
            "Check the design for non-finite columns",
        ) from e


def _residual_without(
    design: GroupedDesign, beta: np.ndarray, resid: np.ndarray, g: int
) -> np.ndarray:
    block = design.group_slice(g)
    return resid + design.x[:, block] @ beta[block]


def beta_group_conditional(
    g: int, state: BglState, design: GroupedDesign
) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Spike probability and slab parameters of β_g given everything else.

    Returns:
        Tuple of (l_g, μ_g, Σ_g) where the slab is N(μ_g, σ²Σ_g)

    Raises:
        SingularCovariance: If the Cholesky factorisation of Σ_g⁻¹ fails
    """
    resid = design.y - design.x @ state.beta
    partial = _residual_without(design, state.beta, resid, g)
    xtr = design.group_columns(g).T @ partial
    chol = _group_precision(design, g, float(state.tau2[g]))
    l_g = spike_weight(state.pi0, log_slab_ratio(xtr, chol, float(state.tau2[g]), state.sigma2))
    sigma_g = linalg.cho_solve((chol, True), np.eye(xtr.shape[0]))
    return l_g, sigma_g @ xtr, sigma_g


def step_beta(state: BglState, design: GroupedDesign, rng: RngStream) -> BglState:
    """Blocked update of every β_g, keeping the residual current."""
    resid = design.y - design.x @ state.beta
    for g in range(design.n_groups):
        block = design.group_slice(g)
        x_g = design.x[:, block]
        partial = resid + x_g @ state.beta[block]
        xtr = x_g.T @ partial
        tau2 = float(state.tau2[g])
        chol = _group_precision(design, g, tau2)
        l_g = spike_weight(state.pi0, log_slab_ratio(xtr, chol, tau2, state.sigma2))
        if rng.bernoulli(l_g):
            new = np.zeros(xtr.shape[0])
        else:
            new, _ = draw_mvnormal_canonical(chol, xtr, state.sigma2, rng)
        state.beta[block] = new
        resid = partial - x_g @ new
    return state


def step_tau2(state: BglState, design: GroupedDesign, rng: RngStream) -> BglState:
    """
    Redraw every τ_g².

    Zero groups draw τ_g² from its Gamma((m_g+1)/2, λ²/2) prior. Nonzero
    groups draw 1/τ_g² from InverseGaussian(λσ/‖β_g‖₂, λ²).

    Raises:
        InvalidParameter: If λ or σ² is not positive
    """
    if not state.lam > 0:
        raise InvalidParameter(f"lambda must be positive, got {state.lam}")
    if not state.sigma2 > 0:
        raise InvalidParameter(f"sigma2 must be positive, got {state.sigma2}")
    lam2 = state.lam * state.lam
    sigma = math.sqrt(state.sigma2)
    for g in range(design.n_groups):
        beta_g = state.beta[design.group_slice(g)]
        m = beta_g.shape[0]
        norm = float(np.linalg.norm(beta_g))
        nonzero = bool(np.any(beta_g != 0.0))
        if nonzero and norm == 0.0:
            logger.warning(f"Group {g} norm underflowed to zero; using spike branch for tau2")
            nonzero = False
        if nonzero:
            state.tau2[g] = 1.0 / draw_inverse_gaussian(state.lam * sigma / norm, lam2, rng)
        else:
            state.tau2[g] = draw_gamma(0.5 * (m + 1), 0.5 * lam2, rng)
    return state


def sigma2_conditional(state: BglState, design: GroupedDesign) -> Tuple[float, float]:
    """Shape and scale of the inverse-gamma σ² conditional.

    Zero groups contribute nothing to either the shape or the quadratic term.
    """
    resid = design.y - design.x @ state.beta
    shape = 0.5 * design.n + state.hyper.alpha
    quad = 0.0
    for g in range(design.n_groups):
        beta_g = state.beta[design.group_slice(g)]
        if np.any(beta_g != 0.0):
            shape += 0.5 * beta_g.shape[0]
            quad += float(beta_g @ beta_g) / float(state.tau2[g])
    scale = 0.5 * (float(resid @ resid) + quad) + state.hyper.gamma
    return shape, scale


def step_sigma2(state: BglState, design: GroupedDesign, rng: RngStream) -> BglState:
    shape, scale = sigma2_conditional(state, design)
    state.sigma2 = float(draw_inverse_gamma(shape, scale, rng))
    return state


def step_pi0(state: BglState, design: GroupedDesign, rng: RngStream) -> BglState:
    """Conjugate update Beta(a + #zero groups, b + #nonzero groups); no-op when π₀ is fixed."""
    hyper = state.hyper
    if hyper.pi0 is not None:
        state.pi0 = hyper.pi0
        return state
    nonzero = int(np.sum(state.z(design)))
    zero = design.n_groups - nonzero
    state.pi0 = float(draw_beta(hyper.a + zero, hyper.b + nonzero, rng))
    return state


def gibbs_sweep(state: BglState, design: GroupedDesign, rng: RngStream) -> BglState:
    """One systematic scan: β groups, τ², σ², π₀."""
    step_beta(state, design, rng)
    step_tau2(state, design, rng)
    step_sigma2(state, design, rng)
    step_pi0(state, design, rng)
    return state


def initial_state(design: GroupedDesign, hyper: BglSsHyper) -> BglState:
    """Ridge start (XᵀX + I)⁻¹Xᵀy with τ² = 1 and σ² from the ridge residuals."""
    beta = linalg.solve(design.gram + np.eye(design.p), design.xty, assume_a="pos")
    resid = design.y - design.x @ beta
    sigma2 = float(np.var(resid))
    if not sigma2 > 0:
        sigma2 = max(float(np.var(design.y)), 1.0)
    return BglState(
        beta=np.array(beta, dtype=float),
        tau2=np.ones(design.n_groups),
        sigma2=sigma2,
        pi0=hyper.pi0 if hyper.pi0 is not None else 0.5,
        lam=hyper.lam if hyper.lam is not None else hyper.lambda_init,
        hyper=hyper,
    )


def em_update_lambda(sum_tau2: float, p: int, n_groups: int) -> float:
    """
    EM update λ = sqrt((p + G) / Σ_g E[τ_g² | y]).

    Raises:
        DegenerateEstimate: If the expected sum is zero or not finite
    """
    if not (math.isfinite(sum_tau2) and sum_tau2 > 0):
        raise DegenerateEstimate(
            f"Monte Carlo estimate of sum E[tau2] is {sum_tau2}",
            "Increase em_inner_iters or fix lambda with --fix-lambda",
        )
    return math.sqrt((p + n_groups) / sum_tau2)


def tune_lambda(
    design: GroupedDesign,
    config: SamplerConfig,
    rng: RngStream,
    state: Optional[BglState] = None,
) -> Tuple[EmResult, BglState]:
    """Monte Carlo EM for λ with warm-started inner chains.

    The first round discards half of its inner draws as burn-in; later
    rounds continue from the previous state.
    """
    hyper = config.bgl_ss
    if state is None:
        state = initial_state(design, hyper)
    state.lam = hyper.lambda_init
    path = [state.lam]
    inner = config.em_inner_iters
    for round_index in range(config.em_rounds):
        if round_index == 0:
            for _ in range(inner // 2):
                gibbs_sweep(state, design, rng)
        total = 0.0
        for _ in range(inner):
            gibbs_sweep(state, design, rng)
            total += float(np.sum(state.tau2))
        state.lam = em_update_lambda(total / inner, design.p, design.n_groups)
        path.append(state.lam)
        logger.debug(f"BGL-SS EM round {round_index + 1}: lambda={state.lam:.6g}")
    converged = em_converged(path)
    if config.em_rounds > 0 and not converged:
        logger.warning(
            f"BGL-SS lambda EM did not settle after {config.em_rounds} rounds "
            f"(last values {', '.join(f'{v:.4g}' for v in path[-3:])})"
        )
    return EmResult(name="lambda", value=state.lam, path=path, converged=converged), state


def mc_em_lambda(design: GroupedDesign, config: SamplerConfig, rng: RngStream) -> float:
    """Monte Carlo EM estimate of λ after ``config.em_rounds`` updates."""
    result, _ = tune_lambda(design, config, rng)
    return result.value


def run_bgl_ss(
    design: GroupedDesign,
    config: SamplerConfig,
    rng: RngStream,
    method: str = METHOD_BGL_SS,
) -> ChainDraws:
    """
    Run the blocked Gibbs sampler and keep the draws after burn-in.

    λ is fixed when ``config.bgl_ss.lam`` is set, tuned by MC-EM when
    ``em_rounds > 0`` and left at ``lambda_init`` otherwise.
    """
    hyper = config.bgl_ss
    state = initial_state(design, hyper)
    em: Optional[EmResult] = None
    if hyper.lam is None and config.em_rounds > 0:
        em, state = tune_lambda(design, config, rng, state)
    sparse = hyper.pi0 is None or hyper.pi0 > 0.0
    recorder = ChainRecorder(
        method,
        design.group_sizes,
        config.n_iter,
        config.n_burn,
        {"tau2": (design.n_groups,), "sigma2": (), "pi0": ()},
        sparse=sparse,
    )
    for iteration in range(config.n_iter):
        gibbs_sweep(state, design, rng)
        recorder.record(
            iteration, state.beta, tau2=state.tau2, sigma2=state.sigma2, pi0=state.pi0
        )
    draws = recorder.finish(em)
    draws.params["lambda"] = np.full(draws.n_draws, state.lam)
    return draws


def draw_prior(
    group_sizes: Tuple[int, ...],
    hyper: BglSsHyper,
    lam: float,
    rng: RngStream,
    sigma2: Optional[float] = None,
) -> BglState:
    """Joint prior draw of (π₀, σ², τ², β) for a fixed λ.

    ``sigma2`` must be given when the σ² prior is improper.
    """
    if sigma2 is None:
        if hyper.alpha <= 0 or hyper.gamma <= 0:
            raise InvalidParameter("Prior draws need a proper sigma2 prior or a fixed sigma2")
        sigma2 = float(draw_inverse_gamma(hyper.alpha, hyper.gamma, rng))
    pi0 = hyper.pi0 if hyper.pi0 is not None else float(draw_beta(hyper.a, hyper.b, rng))
    tau2 = np.array([draw_gamma(0.5 * (m + 1), 0.5 * lam * lam, rng) for m in group_sizes])
    beta = []
    for m, t in zip(group_sizes, tau2):
        if rng.bernoulli(pi0):
            beta.append(np.zeros(m))
        else:
            beta.append(math.sqrt(sigma2 * t) * rng.standard_normal(m))
    return BglState(
        beta=np.concatenate(beta), tau2=tau2, sigma2=sigma2, pi0=pi0, lam=lam, hyper=hyper
    )


def multi_laplace_logpdf(beta_g: np.ndarray, lam: float, sigma: float) -> float:
    """Log density of the slab marginal of β_g after integrating τ_g².

    log[λ^m Γ(m/2) / (2 π^{m/2} Γ(m) σ^m)] − (λ/σ)‖β_g‖₂
    """
    beta_g = np.atleast_1d(np.asarray(beta_g, dtype=float))
    m = beta_g.shape[0]
    rate = lam / sigma
    log_norm = (
        m * math.log(rate) + gammaln(0.5 * m) - math.log(2.0) - 0.5 * m * math.log(math.pi)
        - gammaln(m)
    )
    return float(log_norm - rate * np.linalg.norm(beta_g))
