"""Tests for the group spike-and-slab lasso sampler."""

import math

import numpy as np
import pytest
from scipy import stats

from groupspike import bgl_ss
from groupspike.core import BglSsHyper, SamplerConfig, make_design
from groupspike.exceptions import DegenerateEstimate, InvalidParameter
from groupspike.posterior import summarize
from groupspike.rand import RngStream


def _signal_design(n=50, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 9))
    beta = np.array([2.0, -2.0, 1.5, 0, 0, 0, 0, 0, 0])
    return make_design(x @ beta + rng.standard_normal(n), x, (3, 3, 3)), beta


def _state(design, **kwargs):
    state = bgl_ss.initial_state(design, BglSsHyper(**kwargs))
    state.lam = 1.0
    return state


def test_spike_weight_limits():
    """π₀ = 0 and π₀ = 1 give exact 0 and 1; extreme ratios do not overflow."""
    assert bgl_ss.spike_weight(0.0, 3.0) == 0.0
    assert bgl_ss.spike_weight(1.0, -3.0) == 1.0
    assert bgl_ss.spike_weight(0.5, 0.0) == pytest.approx(0.5)
    assert bgl_ss.spike_weight(0.5, 1e4) == pytest.approx(0.0)
    assert bgl_ss.spike_weight(0.5, -1e4) == pytest.approx(1.0)


def test_log_slab_ratio_matches_determinant_form():
    """The Cholesky form equals the log-determinant form of the ratio."""
    design, _ = _signal_design()
    x_g = design.group_columns(0)
    tau2, sigma2 = 0.7, 1.3
    resid = design.y
    xtr = x_g.T @ resid
    precision = x_g.T @ x_g + np.eye(3) / tau2
    chol = np.linalg.cholesky(precision)
    _, logdet = np.linalg.slogdet(precision)
    expected = (
        -1.5 * math.log(tau2) - 0.5 * logdet + xtr @ np.linalg.solve(precision, xtr) / (2 * sigma2)
    )
    assert bgl_ss.log_slab_ratio(xtr, chol, tau2, sigma2) == pytest.approx(expected)


def test_beta_group_conditional_mean():
    """The slab mean is Σ_g X_gᵀ r with r the partial residual."""
    design, _ = _signal_design()
    state = _state(design, pi0=0.0)
    state.pi0 = 0.0
    l_g, mu, sigma_g = bgl_ss.beta_group_conditional(1, state, design)
    assert l_g == 0.0
    block = design.group_slice(1)
    partial = design.y - design.x @ state.beta + design.x[:, block] @ state.beta[block]
    x_g = design.x[:, block]
    expected_sigma = np.linalg.inv(x_g.T @ x_g + np.eye(3) / state.tau2[1])
    np.testing.assert_allclose(sigma_g, expected_sigma, rtol=1e-8)
    np.testing.assert_allclose(mu, expected_sigma @ x_g.T @ partial, rtol=1e-8)


def test_sigma2_conditional_ignores_zero_groups():
    """Zero groups add nothing to the σ² shape or quadratic term."""
    design, _ = _signal_design()
    state = _state(design, alpha=1.0, gamma=2.0)
    state.beta[3:6] = 0.0
    shape, scale = bgl_ss.sigma2_conditional(state, design)
    assert shape == pytest.approx(design.n / 2 + 1.0 + 3.0)
    resid = design.y - design.x @ state.beta
    quad = sum(
        float(state.beta[s] @ state.beta[s]) / state.tau2[g]
        for g, s in ((0, slice(0, 3)), (2, slice(6, 9)))
    )
    assert scale == pytest.approx(0.5 * (resid @ resid + quad) + 2.0)


def test_step_pi0_fixed_is_noop():
    """A fixed π₀ is never redrawn."""
    design, _ = _signal_design()
    state = _state(design, pi0=0.3)
    bgl_ss.step_pi0(state, design, RngStream(0))
    assert state.pi0 == 0.3


def test_step_tau2_invalid_lambda():
    """Non-positive λ raises InvalidParameter."""
    design, _ = _signal_design()
    state = _state(design)
    state.lam = 0.0
    with pytest.raises(InvalidParameter):
        bgl_ss.step_tau2(state, design, RngStream(0))


def test_em_update_lambda():
    """λ = sqrt((p + G) / Σ E[τ²]); degenerate sums raise."""
    assert bgl_ss.em_update_lambda(12.0, 9, 3) == pytest.approx(1.0)
    with pytest.raises(DegenerateEstimate):
        bgl_ss.em_update_lambda(0.0, 9, 3)
    with pytest.raises(DegenerateEstimate):
        bgl_ss.em_update_lambda(float("inf"), 9, 3)


def test_multi_laplace_reduces_to_laplace():
    """For one coefficient the slab marginal is Laplace with scale σ/λ."""
    for b in (-1.2, 0.0, 0.4):
        expected = stats.laplace.logpdf(b, scale=2.0 / 1.5)
        assert bgl_ss.multi_laplace_logpdf(np.array([b]), 1.5, 2.0) == pytest.approx(expected)


def test_run_is_reproducible():
    """The same seed reproduces the chain exactly."""
    design, _ = _signal_design()
    config = SamplerConfig(n_iter=40, n_burn=10, em_rounds=0, bgl_ss=BglSsHyper(lam=1.0))
    a = bgl_ss.run_bgl_ss(design, config, RngStream(3))
    b = bgl_ss.run_bgl_ss(design, config, RngStream(3))
    np.testing.assert_array_equal(a.beta, b.beta)
    assert a.n_draws == 30


def test_run_recovers_strong_signal():
    """The active group is kept and null groups are mostly spikes."""
    design, beta = _signal_design()
    config = SamplerConfig(n_iter=1500, n_burn=500, em_rounds=0, bgl_ss=BglSsHyper(lam=1.0))
    draws = bgl_ss.run_bgl_ss(design, config, RngStream(4))
    summary = summarize(draws)
    assert summary.mtm.group_included[0]
    np.testing.assert_allclose(summary.coef_median.values[:3], beta[:3], atol=0.5)
    spikes = draws.spike_frequency()
    assert spikes[0] < 0.05
    assert spikes[1] > 0.5 and spikes[2] > 0.5


def test_pi0_zero_never_produces_zeros():
    """With π₀ = 0 the chain is dense and records no model counts."""
    design, _ = _signal_design()
    config = SamplerConfig(
        n_iter=50, n_burn=10, em_rounds=0, bgl_ss=BglSsHyper(lam=1.0, pi0=0.0)
    )
    draws = bgl_ss.run_bgl_ss(design, config, RngStream(5))
    assert not draws.sparse
    assert np.all(draws.beta != 0.0)
    assert not draws.model_counts


def test_mc_em_lambda_runs():
    """MC-EM returns a positive λ and records its path."""
    design, _ = _signal_design()
    config = SamplerConfig(n_iter=20, n_burn=5, em_rounds=3, em_inner_iters=20)
    result, _ = bgl_ss.tune_lambda(design, config, RngStream(6))
    assert result.value > 0
    assert len(result.path) == 4
    assert bgl_ss.mc_em_lambda(design, config, RngStream(6)) == pytest.approx(result.value)


def test_singleton_prior_is_laplace():
    """With π₀ = 0 and m = 1 the prior of β is Laplace with scale σ/λ."""
    rng = RngStream(21)
    hyper = BglSsHyper(pi0=0.0)
    draws = [bgl_ss.draw_prior((1,), hyper, 1.5, rng, sigma2=4.0).beta[0] for _ in range(4000)]
    assert stats.kstest(draws, stats.laplace(scale=2.0 / 1.5).cdf).pvalue > 1e-3


def test_pure_noise_selects_nothing():
    """On pure noise the median thresholding model is empty."""
    rng = np.random.default_rng(22)
    x = rng.standard_normal((60, 8))
    design = make_design(rng.standard_normal(60), x, (2, 2, 2, 2))
    config = SamplerConfig(n_iter=2000, n_burn=500, em_rounds=0, bgl_ss=BglSsHyper(lam=1.0))
    summary = summarize(bgl_ss.run_bgl_ss(design, config, RngStream(23)))
    assert not np.any(summary.mtm.group_included)
    assert np.all(summary.coef_median.values == 0.0)
