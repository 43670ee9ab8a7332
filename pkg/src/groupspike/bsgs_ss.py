"""Bi-level spike-and-slab sparse group selection.

Coefficients are reparametrised as β_gj = τ_gj·b_gj with::

    b_g    ~ π₀ δ₀ + (1 − π₀) N(0, I)           group level
    τ_gj   ~ π₁ δ₀ + (1 − π₁) N⁺(0, s²)         coefficient level
    s²     ~ InverseGamma(1, t)
    σ²     ~ InverseGamma(α, γ)
    π₀, π₁ ~ Beta(a₁, a₂), Beta(c₁, c₂)

t is fixed or tuned by Monte Carlo EM.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.special import log_ndtr

from .bgl_ss import spike_weight
from .constants import METHOD_BSGS_SS
from .core import BsgsSsHyper, GroupedDesign, SamplerConfig
from .exceptions import DegenerateEstimate, InvalidParameter
from .logger import logger
from .posterior import ChainDraws, ChainRecorder, EmResult, em_converged
from .rand import (
    RngStream,
    draw_beta,
    draw_inverse_gamma,
    draw_mvnormal_canonical,
    draw_truncated_normal_positive,
    precision_cholesky,
)

_LOG2 = math.log(2.0)


@dataclass
class BsgsState:
    """Current values of every BSGS-SS parameter. ``beta`` is always τ·b."""

    b: np.ndarray
    tau: np.ndarray
    sigma2: float
    pi0: float
    pi1: float
    s2: float
    t: float
    hyper: BsgsSsHyper = field(default_factory=BsgsSsHyper)

    @property
    def beta(self) -> np.ndarray:
        return self.tau * self.b


def _b_precision(
    g: int, state: BsgsState, design: GroupedDesign, resid_without: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Cholesky of I + WᵀW/σ² and the linear term Wᵀr/σ² with W = X_g diag(τ_g)."""
    block = design.group_slice(g)
    tau_g = state.tau[block]
    w = design.x[:, block] * tau_g
    precision = np.eye(tau_g.shape[0]) + (w.T @ w) / state.sigma2
    return precision_cholesky(precision), (w.T @ resid_without) / state.sigma2


def _b_spike_prob(pi0: float, chol: np.ndarray, linear: np.ndarray) -> float:
    # log ratio = ½log|Σ| + ‖Σ^{1/2}Wᵀr‖²/(2σ⁴), with linear = Wᵀr/σ².
    h = linalg.solve_triangular(chol, linear, lower=True)
    return spike_weight(pi0, float(-np.sum(np.log(np.diag(chol))) + 0.5 * (h @ h)))


def b_group_conditional(
    g: int, state: BsgsState, design: GroupedDesign
) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Spike probability and slab parameters of b_g given everything else.

    Returns:
        Tuple of (l_g, μ_g, Σ_g) with Σ_g = (I + σ⁻²V_g^{1/2}X_gᵀX_gV_g^{1/2})⁻¹
        and μ_g = σ⁻²Σ_gV_g^{1/2}X_gᵀr
    """
    block = design.group_slice(g)
    resid = design.y - design.x @ state.beta + design.x[:, block] @ state.beta[block]
    chol, linear = _b_precision(g, state, design, resid)
    sigma_g = linalg.cho_solve((chol, True), np.eye(linear.shape[0]))
    return _b_spike_prob(state.pi0, chol, linear), sigma_g @ linear, sigma_g


def step_b(state: BsgsState, design: GroupedDesign, rng: RngStream) -> BsgsState:
    """Blocked spike-or-slab update of every b_g."""
    resid = design.y - design.x @ state.beta
    for g in range(design.n_groups):
        block = design.group_slice(g)
        x_g = design.x[:, block]
        partial = resid + x_g @ state.beta[block]
        chol, linear = _b_precision(g, state, design, partial)
        if rng.bernoulli(_b_spike_prob(state.pi0, chol, linear)):
            state.b[block] = 0.0
        else:
            state.b[block], _ = draw_mvnormal_canonical(chol, linear, 1.0, rng)
        resid = partial - x_g @ state.beta[block]
    return state


def _tau_terms(
    x_j: np.ndarray, b_j: float, resid_without: np.ndarray, state: BsgsState
) -> Tuple[float, float, float]:
    v2 = 1.0 / (1.0 / state.s2 + b_j * b_j * float(x_j @ x_j) / state.sigma2)
    u = v2 * b_j * float(x_j @ resid_without) / state.sigma2
    v = math.sqrt(v2)
    log_ratio = _LOG2 + 0.5 * math.log(v2 / state.s2) + u * u / (2.0 * v2) + log_ndtr(u / v)
    return spike_weight(state.pi1, float(log_ratio)), u, v2


def tau_conditional(
    g: int, j: int, state: BsgsState, design: GroupedDesign
) -> Tuple[float, float, float]:
    """
    Spike probability and truncated-normal slab of τ_gj.

    ``j`` indexes within group ``g``.

    Returns:
        Tuple of (q_gj, u_gj, v_gj²); the slab is N⁺(u_gj, v_gj²)
    """
    column = design.offsets[g] + j
    block = design.group_slice(g)
    if j < 0 or column >= block.stop:
        raise InvalidParameter(f"Group {g} has no coefficient {j}")
    beta = state.beta
    x_j = design.x[:, column]
    resid = design.y - design.x @ beta + x_j * beta[column]
    return _tau_terms(x_j, float(state.b[column]), resid, state)


def step_tau(state: BsgsState, design: GroupedDesign, rng: RngStream) -> BsgsState:
    """Coordinate-wise τ update with the residual refreshed after every coordinate."""
    resid = design.y - design.x @ state.beta
    for column in range(design.p):
        x_j = design.x[:, column]
        b_j = float(state.b[column])
        partial = resid + x_j * (state.tau[column] * b_j)
        q, u, v2 = _tau_terms(x_j, b_j, partial, state)
        if rng.bernoulli(q):
            state.tau[column] = 0.0
        else:
            state.tau[column] = draw_truncated_normal_positive(u, math.sqrt(v2), rng)
        resid = partial - x_j * (state.tau[column] * b_j)
    return state


def step_sigma2_bsgs(state: BsgsState, design: GroupedDesign, rng: RngStream) -> BsgsState:
    """σ² from InverseGamma(n/2 + α, ½‖y − Xβ‖² + γ)."""
    resid = design.y - design.x @ state.beta
    shape = 0.5 * design.n + state.hyper.alpha
    scale = 0.5 * float(resid @ resid) + state.hyper.gamma
    state.sigma2 = float(draw_inverse_gamma(shape, scale, rng))
    return state


def pi_counts(
    state: BsgsState, design: GroupedDesign
) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    """((#zero groups, #nonzero groups), (#zero τ, #nonzero τ)).

    The first pair partitions G and the second partitions p.
    """
    zero_groups = sum(
        1 for g in range(design.n_groups) if not np.any(state.b[design.group_slice(g)] != 0.0)
    )
    zero_tau = int(np.sum(state.tau == 0.0))
    return (zero_groups, design.n_groups - zero_groups), (zero_tau, design.p - zero_tau)


def step_pi(state: BsgsState, design: GroupedDesign, rng: RngStream) -> BsgsState:
    """Conjugate Beta updates of π₀ and π₁; fixed values are left alone."""
    hyper = state.hyper
    (zero_g, nonzero_g), (zero_t, nonzero_t) = pi_counts(state, design)
    if hyper.pi0 is None:
        state.pi0 = float(draw_beta(zero_g + hyper.a1, nonzero_g + hyper.a2, rng))
    if hyper.pi1 is None:
        state.pi1 = float(draw_beta(zero_t + hyper.c1, nonzero_t + hyper.c2, rng))
    return state


def s2_conditional(state: BsgsState) -> Tuple[float, float]:
    """Shape 1 + ½#(τ ≠ 0) and scale t + ½Στ²."""
    if not state.t > 0:
        raise InvalidParameter(f"t must be positive, got {state.t}")
    nonzero = int(np.sum(state.tau != 0.0))
    return 1.0 + 0.5 * nonzero, state.t + 0.5 * float(np.sum(state.tau**2))


def step_s2(state: BsgsState, rng: RngStream) -> BsgsState:
    shape, scale = s2_conditional(state)
    if state.hyper.s2 is None:
        state.s2 = float(draw_inverse_gamma(shape, scale, rng))
    return state


def gibbs_sweep(state: BsgsState, design: GroupedDesign, rng: RngStream) -> BsgsState:
    """One systematic scan: b groups, τ coordinates, σ², π₀ and π₁, s²."""
    step_b(state, design, rng)
    step_tau(state, design, rng)
    step_sigma2_bsgs(state, design, rng)
    step_pi(state, design, rng)
    step_s2(state, rng)
    return state


def initial_state(design: GroupedDesign, hyper: BsgsSsHyper, rng: RngStream) -> BsgsState:
    """Dispersed start: b ~ N(0, I), τ ~ |N(0, 1)|, σ² = var(y)."""
    sigma2 = float(np.var(design.y))
    if not sigma2 > 0:
        sigma2 = 1.0
    return BsgsState(
        b=np.asarray(rng.standard_normal(design.p), dtype=float),
        tau=np.abs(np.asarray(rng.standard_normal(design.p), dtype=float)),
        sigma2=sigma2,
        pi0=hyper.pi0 if hyper.pi0 is not None else 0.5,
        pi1=hyper.pi1 if hyper.pi1 is not None else 0.5,
        s2=hyper.s2 if hyper.s2 is not None else 1.0,
        t=hyper.t if hyper.t is not None else hyper.t_init,
        hyper=hyper,
    )


def em_update_t(mean_inv_s2: float) -> float:
    """
    EM update t = 1 / E[1/s² | y].

    Raises:
        DegenerateEstimate: If the expectation is not a positive finite number
    """
    if not (math.isfinite(mean_inv_s2) and mean_inv_s2 > 0):
        raise DegenerateEstimate(
            f"Monte Carlo estimate of E[1/s2] is {mean_inv_s2}",
            "Increase em_inner_iters or fix t in the configuration",
        )
    return 1.0 / mean_inv_s2


def tune_t(
    design: GroupedDesign,
    config: SamplerConfig,
    rng: RngStream,
    state: Optional[BsgsState] = None,
) -> Tuple[EmResult, BsgsState]:
    """Monte Carlo EM for t with warm-started inner chains."""
    hyper = config.bsgs_ss
    if state is None:
        state = initial_state(design, hyper, rng)
    state.t = hyper.t_init
    path = [state.t]
    inner = config.em_inner_iters
    for round_index in range(config.em_rounds):
        if round_index == 0:
            for _ in range(inner // 2):
                gibbs_sweep(state, design, rng)
        total = 0.0
        for _ in range(inner):
            gibbs_sweep(state, design, rng)
            total += 1.0 / state.s2
        state.t = em_update_t(total / inner)
        path.append(state.t)
        logger.debug(f"BSGS-SS EM round {round_index + 1}: t={state.t:.6g}")
    converged = em_converged(path)
    if config.em_rounds > 0 and not converged:
        logger.warning(
            f"BSGS-SS t EM did not settle after {config.em_rounds} rounds "
            f"(last values {', '.join(f'{v:.4g}' for v in path[-3:])})"
        )
    return EmResult(name="t", value=state.t, path=path, converged=converged), state


def mc_em_t(design: GroupedDesign, config: SamplerConfig, rng: RngStream) -> float:
    """Monte Carlo EM estimate of t after ``config.em_rounds`` updates."""
    result, _ = tune_t(design, config, rng)
    return result.value


def run_bsgs_ss(design: GroupedDesign, config: SamplerConfig, rng: RngStream) -> ChainDraws:
    """
    Run the BSGS-SS Gibbs sampler and keep the draws after burn-in.

    Stored β draws are τ·b, so selection summaries work at both the
    coefficient level and, through the group norms, the group level.
    """
    hyper = config.bsgs_ss
    state = initial_state(design, hyper, rng)
    em: Optional[EmResult] = None
    if hyper.t is None and config.em_rounds > 0:
        em, state = tune_t(design, config, rng, state)
    recorder = ChainRecorder(
        METHOD_BSGS_SS,
        design.group_sizes,
        config.n_iter,
        config.n_burn,
        {
            "b": (design.p,),
            "tau": (design.p,),
            "sigma2": (),
            "pi0": (),
            "pi1": (),
            "s2": (),
        },
        sparse=True,
    )
    for iteration in range(config.n_iter):
        gibbs_sweep(state, design, rng)
        recorder.record(
            iteration,
            state.beta,
            b=state.b,
            tau=state.tau,
            sigma2=state.sigma2,
            pi0=state.pi0,
            pi1=state.pi1,
            s2=state.s2,
        )
    draws = recorder.finish(em)
    draws.params["t"] = np.full(draws.n_draws, state.t)
    return draws


def draw_prior(
    group_sizes: Tuple[int, ...],
    hyper: BsgsSsHyper,
    t: float,
    rng: RngStream,
    sigma2: Optional[float] = None,
) -> BsgsState:
    """Joint prior draw of (π₀, π₁, s², σ², b, τ) for a fixed t."""
    if sigma2 is None:
        if hyper.alpha <= 0 or hyper.gamma <= 0:
            raise InvalidParameter("Prior draws need a proper sigma2 prior or a fixed sigma2")
        sigma2 = float(draw_inverse_gamma(hyper.alpha, hyper.gamma, rng))
    pi0 = hyper.pi0 if hyper.pi0 is not None else float(draw_beta(hyper.a1, hyper.a2, rng))
    pi1 = hyper.pi1 if hyper.pi1 is not None else float(draw_beta(hyper.c1, hyper.c2, rng))
    s2 = hyper.s2 if hyper.s2 is not None else float(draw_inverse_gamma(1.0, t, rng))
    p = int(sum(group_sizes))
    b_parts = []
    for m in group_sizes:
        if rng.bernoulli(pi0):
            b_parts.append(np.zeros(m))
        else:
            b_parts.append(np.asarray(rng.standard_normal(m), dtype=float))
    tau = np.zeros(p)
    for j in range(p):
        if not rng.bernoulli(pi1):
            tau[j] = abs(float(rng.standard_normal())) * math.sqrt(s2)
    return BsgsState(
        b=np.concatenate(b_parts),
        tau=tau,
        sigma2=sigma2,
        pi0=pi0,
        pi1=pi1,
        s2=s2,
        t=t,
        hyper=hyper,
    )
