"""Tests for the bi-level spike-and-slab sampler."""

import numpy as np
import pytest

from groupspike import bsgs_ss
from groupspike.core import BsgsSsHyper, SamplerConfig, make_design
from groupspike.exceptions import DegenerateEstimate, InvalidParameter
from groupspike.posterior import summarize
from groupspike.rand import RngStream


def _design(n=60, seed=2):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 6))
    beta = np.array([2.0, 0.0, -2.0, 0.0, 0.0, 0.0])
    return make_design(x @ beta + 0.5 * rng.standard_normal(n), x, (3, 3)), beta


def _state(design, seed=0, **kwargs):
    return bsgs_ss.initial_state(design, BsgsSsHyper(**kwargs), RngStream(seed))


def test_beta_is_tau_times_b_after_sweep():
    """β = τ·b holds after every sweep."""
    design, _ = _design()
    state = _state(design, t=1.0)
    rng = RngStream(1)
    for _ in range(5):
        bsgs_ss.gibbs_sweep(state, design, rng)
        np.testing.assert_array_equal(state.beta, state.tau * state.b)
        assert np.all(state.tau >= 0)


def test_pi_counts_partition():
    """Zero and nonzero counts partition G and p."""
    design, _ = _design()
    state = _state(design)
    state.b[3:] = 0.0
    state.tau[[0, 4]] = 0.0
    (zero_g, nonzero_g), (zero_t, nonzero_t) = bsgs_ss.pi_counts(state, design)
    assert (zero_g, nonzero_g) == (1, 1)
    assert (zero_t, nonzero_t) == (2, 4)


def test_s2_conditional():
    """s² shape counts nonzero τ; scale adds half the sum of squares to t."""
    design, _ = _design()
    state = _state(design, t=2.0)
    state.tau = np.array([1.0, 0.0, 2.0, 0.0, 0.0, 1.0])
    shape, scale = bsgs_ss.s2_conditional(state)
    assert shape == pytest.approx(2.5)
    assert scale == pytest.approx(2.0 + 3.0)


def test_tau_conditional_ranges():
    """q lies in [0, 1] and v² is positive; bad indices raise."""
    design, _ = _design()
    state = _state(design)
    for g in range(2):
        for j in range(3):
            q, _, v2 = bsgs_ss.tau_conditional(g, j, state, design)
            assert 0.0 <= q <= 1.0
            assert v2 > 0
    with pytest.raises(InvalidParameter):
        bsgs_ss.tau_conditional(0, 3, state, design)
    with pytest.raises(InvalidParameter):
        bsgs_ss.tau_conditional(1, -1, state, design)


def test_tau_conditional_zero_b_has_prior_variance():
    """With b_gj = 0 the slab variance is the prior s²."""
    design, _ = _design()
    state = _state(design, s2=1.7)
    state.b[0] = 0.0
    _, u, v2 = bsgs_ss.tau_conditional(0, 0, state, design)
    assert u == 0.0
    assert v2 == pytest.approx(1.7)


def test_b_group_conditional():
    """Σ_g = (I + WᵀW/σ²)⁻¹ and μ_g = Σ_g Wᵀr/σ² with W = X_g diag(τ_g)."""
    design, _ = _design()
    state = _state(design, pi0=0.0)
    l_g, mu, sigma_g = bsgs_ss.b_group_conditional(0, state, design)
    assert l_g == 0.0
    w = design.x[:, :3] * state.tau[:3]
    resid = design.y - design.x[:, 3:] @ state.beta[3:]
    expected_sigma = np.linalg.inv(np.eye(3) + w.T @ w / state.sigma2)
    np.testing.assert_allclose(sigma_g, expected_sigma, rtol=1e-8)
    np.testing.assert_allclose(mu, expected_sigma @ w.T @ resid / state.sigma2, rtol=1e-8)


def test_em_update_t():
    """t = 1 / E[1/s²]; degenerate values raise."""
    assert bsgs_ss.em_update_t(4.0) == pytest.approx(0.25)
    with pytest.raises(DegenerateEstimate):
        bsgs_ss.em_update_t(0.0)
    with pytest.raises(DegenerateEstimate):
        bsgs_ss.em_update_t(float("nan"))


def test_run_recovers_bi_level_pattern():
    """Active coefficients are kept; their zero neighbours and the null group are dropped."""
    design, beta = _design()
    config = SamplerConfig(n_iter=1500, n_burn=500, em_rounds=0, bsgs_ss=BsgsSsHyper(t=1.0))
    draws = bsgs_ss.run_bsgs_ss(design, config, RngStream(5))
    summary = summarize(draws)
    assert summary.mtm.coef_included[0] and summary.mtm.coef_included[2]
    assert not summary.mtm.group_included[1]
    np.testing.assert_allclose(summary.coef_median.values[[0, 2]], beta[[0, 2]], atol=0.4)
    assert draws.params["t"][0] == 1.0


def test_run_with_em_records_path():
    """MC-EM for t stores one value per round plus the start."""
    design, _ = _design()
    config = SamplerConfig(n_iter=30, n_burn=10, em_rounds=2, em_inner_iters=20)
    draws = bsgs_ss.run_bsgs_ss(design, config, RngStream(6))
    assert draws.em is not None
    assert len(draws.em.path) == 3
    assert draws.em.value > 0


def test_mc_em_t_runs():
    """mc_em_t returns the last value of the tuned t path."""
    design, _ = _design()
    config = SamplerConfig(n_iter=20, n_burn=5, em_rounds=3, em_inner_iters=20)
    result, _ = bsgs_ss.tune_t(design, config, RngStream(7))
    t = bsgs_ss.mc_em_t(design, config, RngStream(7))
    assert t > 0
    assert t == pytest.approx(result.value)
    assert result.path[-1] == t
