"""Getting-it-right checks for the Gibbs samplers.

Two simulators target the same joint distribution of parameters and data:

* marginal-conditional: independent prior draws (only parameter moments are
  monitored, so the paired data draw is skipped);
* successive-conditional: one Gibbs sweep given the current data, then a fresh
  data draw given the new parameters, repeated.

If the conditionals are right, every monitored moment has the same
expectation under both. The successive chain is autocorrelated, so its
standard error comes from batch means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, List, Protocol, Sequence, Tuple

import numpy as np

from . import bgl_ss, bsgl, bsgs_ss
from .constants import METHOD_BGL_SS, METHOD_BSGL, METHOD_BSGS_SS
from .core import BglSsHyper, BsglHyper, BsgsSsHyper, GroupedDesign, make_design
from .logger import logger
from .posterior import batch_means_se
from .rand import RngStream


class GewekeModel(Protocol):
    """What the harness needs from a sampler."""

    name: str

    def prior_draw(self, rng: RngStream) -> Any: ...

    def data_draw(self, state: Any, rng: RngStream) -> GroupedDesign: ...

    def gibbs_step(self, state: Any, design: GroupedDesign, rng: RngStream) -> Any: ...

    def moments(self, state: Any) -> np.ndarray: ...

    def moment_names(self) -> List[str]: ...


def _small_design(group_sizes: Sequence[int], n: int, seed: int) -> GroupedDesign:
    x = np.asarray(RngStream(seed, 99).standard_normal((n, int(sum(group_sizes)))))
    return make_design(np.zeros(n), x, group_sizes)


def _beta_moment_names(p: int) -> List[str]:
    return [f"beta[{j}]" for j in range(p)] + [f"beta[{j}]^2" for j in range(p)]


def _bounded_beta_moments(beta: np.ndarray, cutoff: float) -> np.ndarray:
    """sign(β_j), 1{β_j = 0} and 1{|β_j| < cutoff}: finite variance under any prior scale."""
    return np.concatenate(
        [np.sign(beta), (beta == 0.0).astype(float), (np.abs(beta) < cutoff).astype(float)]
    )


def _bounded_beta_names(p: int) -> List[str]:
    return (
        [f"sign(beta[{j}])" for j in range(p)]
        + [f"beta[{j}]==0" for j in range(p)]
        + [f"|beta[{j}]|<c" for j in range(p)]
    )


@dataclass
class _FixedDesignModel:
    """Shared data-generating step y ~ N(Xβ, σ²I) on a fixed small design."""

    group_sizes: Tuple[int, ...] = (2, 2)
    n: int = 12
    seed: int = 7
    design: GroupedDesign = field(init=False)

    def __post_init__(self) -> None:
        self.group_sizes = tuple(self.group_sizes)
        self.design = _small_design(self.group_sizes, self.n, self.seed)

    def data_draw(self, state: Any, rng: RngStream) -> GroupedDesign:
        noise = math.sqrt(state.sigma2) * np.asarray(rng.standard_normal(self.n))
        return self.design.with_response(self.design.x @ state.beta + noise)


@dataclass
class BglSsGewekeModel(_FixedDesignModel):
    """BGL-SS on two groups of two, n = 15, fixed λ and an InverseGamma(2, 2) σ² prior."""

    n: int = 15
    name: str = METHOD_BGL_SS
    lam: float = 1.5
    hyper: BglSsHyper = field(default_factory=lambda: BglSsHyper(alpha=2.0, gamma=2.0, lam=1.5))

    def prior_draw(self, rng: RngStream) -> bgl_ss.BglState:
        return bgl_ss.draw_prior(self.group_sizes, self.hyper, self.lam, rng)

    def gibbs_step(
        self, state: bgl_ss.BglState, design: GroupedDesign, rng: RngStream
    ) -> bgl_ss.BglState:
        return bgl_ss.gibbs_sweep(state, design, rng)

    def moments(self, state: bgl_ss.BglState) -> np.ndarray:
        return np.concatenate(
            [state.beta, state.beta**2, state.tau2, [state.sigma2, state.pi0]]
        )

    def moment_names(self) -> List[str]:
        p = int(sum(self.group_sizes))
        taus = [f"tau2[{g}]" for g in range(len(self.group_sizes))]
        return _beta_moment_names(p) + taus + ["sigma2", "pi0"]


@dataclass
class BsglGewekeModel(_FixedDesignModel):
    """BSGL on groups (2, 1), n = 12, fixed λ₁², λ₂² and a proper σ² prior."""

    group_sizes: Tuple[int, ...] = (2, 1)
    name: str = METHOD_BSGL
    lambda1_sq: float = 1.0
    lambda2_sq: float = 2.0
    hyper: BsglHyper = field(
        default_factory=lambda: BsglHyper(alpha=3.0, gamma=2.0, lambda1_sq=1.0, lambda2_sq=2.0)
    )

    def prior_draw(self, rng: RngStream) -> bsgl.BsglState:
        return bsgl.draw_prior(
            self.group_sizes, self.hyper, self.lambda1_sq, self.lambda2_sq, rng
        )

    def gibbs_step(
        self, state: bsgl.BsglState, design: GroupedDesign, rng: RngStream
    ) -> bsgl.BsglState:
        return bsgl.gibbs_sweep(state, design, rng)

    def moments(self, state: bsgl.BsglState) -> np.ndarray:
        return np.concatenate(
            [state.beta, state.beta**2, state.tau2, state.gamma2, [state.sigma2]]
        )

    def moment_names(self) -> List[str]:
        p = int(sum(self.group_sizes))
        taus = [f"tau2[{j}]" for j in range(p)]
        gammas = [f"gamma2[{g}]" for g in range(len(self.group_sizes))]
        return _beta_moment_names(p) + taus + gammas + ["sigma2"]


@dataclass
class BsgsSsGewekeModel(_FixedDesignModel):
    """BSGS-SS on two groups of two, n = 12, fixed t and proper priors everywhere.

    s² has an InverseGamma(1, t) prior with no finite mean, so β_j = τ_j b_j has
    no finite second moment either. Only bounded functions of β and s² are
    monitored.
    """

    name: str = METHOD_BSGS_SS
    t: float = 1.0
    cutoff: float = 1.0
    hyper: BsgsSsHyper = field(default_factory=lambda: BsgsSsHyper(alpha=3.0, gamma=2.0, t=1.0))

    def prior_draw(self, rng: RngStream) -> bsgs_ss.BsgsState:
        return bsgs_ss.draw_prior(self.group_sizes, self.hyper, self.t, rng)

    def gibbs_step(
        self, state: bsgs_ss.BsgsState, design: GroupedDesign, rng: RngStream
    ) -> bsgs_ss.BsgsState:
        return bsgs_ss.gibbs_sweep(state, design, rng)

    def moments(self, state: bsgs_ss.BsgsState) -> np.ndarray:
        return np.concatenate(
            [
                _bounded_beta_moments(state.beta, self.cutoff),
                (state.tau == 0.0).astype(float),
                [state.sigma2, state.pi0, state.pi1, float(state.s2 > self.t)],
            ]
        )

    def moment_names(self) -> List[str]:
        p = int(sum(self.group_sizes))
        zeros = [f"tau[{j}]==0" for j in range(p)]
        return _bounded_beta_names(p) + zeros + ["sigma2", "pi0", "pi1", "s2>t"]


@dataclass
class GewekeResult:
    """Per-moment comparison of the two simulators."""

    model: str
    names: List[str]
    marginal_mean: np.ndarray
    successive_mean: np.ndarray
    z_scores: np.ndarray
    n_draws: int

    @property
    def max_abs_z(self) -> float:
        return float(np.max(np.abs(self.z_scores)))

    def passed(self, threshold: float = 4.0) -> bool:
        return bool(np.all(np.abs(self.z_scores) < threshold))

    def failures(self, threshold: float = 4.0) -> List[Tuple[str, float]]:
        return [
            (name, float(z))
            for name, z in zip(self.names, self.z_scores)
            if not abs(z) < threshold
        ]


def geweke_test(
    model: GewekeModel, n_draws: int, rng: RngStream, batches: int = 50
) -> GewekeResult:
    """
    Run both simulators for ``n_draws`` steps and compare moment means.

    Args:
        model: Sampler adapter
        n_draws: Draws per simulator
        rng: Random stream; the two simulators use separate children
        batches: Batch count for the successive-conditional standard error

    Returns:
        z-scores (marginal − successive) / combined standard error
    """
    marginal_rng = rng.child(0)
    successive_rng = rng.child(1)

    marginal = []
    for _ in range(n_draws):
        state = model.prior_draw(marginal_rng)
        marginal.append(model.moments(state))
    marginal_arr = np.asarray(marginal)

    state = model.prior_draw(successive_rng)
    design = model.data_draw(state, successive_rng)
    successive = []
    for _ in range(n_draws):
        state = model.gibbs_step(state, design, successive_rng)
        design = model.data_draw(state, successive_rng)
        successive.append(model.moments(state))
    successive_arr = np.asarray(successive)

    mc_se2 = marginal_arr.var(axis=0, ddof=1) / n_draws
    sc_se = np.array(
        [batch_means_se(successive_arr[:, k], batches) for k in range(successive_arr.shape[1])]
    )
    denom = np.sqrt(mc_se2 + sc_se**2)
    diff = marginal_arr.mean(axis=0) - successive_arr.mean(axis=0)
    z = np.divide(diff, denom, out=np.zeros_like(diff), where=denom > 0)

    result = GewekeResult(
        model=model.name,
        names=model.moment_names(),
        marginal_mean=marginal_arr.mean(axis=0),
        successive_mean=successive_arr.mean(axis=0),
        z_scores=z,
        n_draws=n_draws,
    )
    logger.debug(f"Geweke {model.name}: max |z| = {result.max_abs_z:.3f}")
    return result
