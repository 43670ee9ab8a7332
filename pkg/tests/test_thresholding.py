"""Tests for closed-form estimators under orthogonal designs."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.stats import norm

from groupspike import bgl_ss
from groupspike.core import BglSsHyper, GroupedCoefficients, make_design
from groupspike.exceptions import ConfigurationError, InputError
from groupspike.rand import RngStream
from groupspike.thresholding import (
    OrthogonalContext,
    group_lasso_threshold,
    median_quantile,
    median_threshold,
    spike_prob,
)


def orthogonal_design(n, sizes, beta, sigma=1.0, seed=0):
    """Design with XᵀX = nI."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, sum(sizes))))
    x = math.sqrt(n) * q
    y = x @ np.asarray(beta, dtype=float) + sigma * rng.standard_normal(n)
    return make_design(y, x, sizes)


def _mixture_median(mu, s, spike):
    """Median of spike·δ₀ + (1 − spike)·N(mu, s²) by root finding."""

    def cdf(m):
        return (1 - spike) * norm.cdf((m - mu) / s) + spike * (m >= 0)

    below = (1 - spike) * norm.cdf(-mu / s)
    if below < 0.5 <= below + spike:
        return 0.0
    if below >= 0.5:
        return brentq(lambda m: cdf(m) - 0.5, mu - 20 * s, -1e-300)
    return brentq(lambda m: cdf(m) - 0.5, 1e-300, mu + 20 * s)


def test_from_design_requires_orthogonality():
    """Non-orthogonal designs are rejected."""
    rng = np.random.default_rng(0)
    design = make_design(rng.standard_normal(10), rng.standard_normal((10, 3)), (3,))
    with pytest.raises(InputError):
        OrthogonalContext.from_design(design, 1.0, 1.0, 0.5)


def test_context_validation():
    """σ, τ² and π₀ are validated."""
    beta = GroupedCoefficients(np.ones(2), (2,))
    with pytest.raises(ConfigurationError):
        OrthogonalContext(n=10, sigma=0.0, tau2=1.0, pi0=0.5, beta_ls=beta)
    with pytest.raises(ConfigurationError):
        OrthogonalContext(n=10, sigma=1.0, tau2=1.0, pi0=1.5, beta_ls=beta)


def test_spike_prob_limits():
    """π₀ = 0 gives 0 and π₀ = 1 gives 1 exactly."""
    beta = GroupedCoefficients(np.array([0.3, -0.2]), (1, 1))
    assert spike_prob(OrthogonalContext(20, 1.0, 1.0, 0.0, beta), 0) == 0.0
    assert spike_prob(OrthogonalContext(20, 1.0, 1.0, 1.0, beta), 1) == 1.0


def test_median_quantile():
    """Q is 0 at l = 0 and infinite from l = ½."""
    assert median_quantile(0.0) == pytest.approx(0.0)
    assert math.isinf(median_quantile(0.5))
    assert math.isinf(median_quantile(0.9))


def test_median_threshold_matches_mixture_median():
    """Closed-form medians equal numerically computed mixture medians."""
    n, sigma, tau2, pi0 = 40, 1.0, 0.5, 0.5
    beta_ls = GroupedCoefficients(np.array([0.9, -0.4, 0.05, 0.3, -0.25, 0.02]), (2, 2, 2))
    ctx = OrthogonalContext(n, sigma, tau2, pi0, beta_ls)
    medians = median_threshold(ctx)
    for g in range(3):
        spike = spike_prob(ctx, g)
        shrink = 1 - ctx.shrinkage(g)
        s = sigma / math.sqrt(n) * math.sqrt(shrink)
        for j, b in zip(range(2 * g, 2 * g + 2), beta_ls.group(g)):
            expected = _mixture_median(shrink * b, s, spike)
            assert medians.values[j] == pytest.approx(expected, abs=1e-8)


def test_median_threshold_zeroes_likely_spikes():
    """Groups with spike probability at least ½ are exactly zero."""
    beta_ls = GroupedCoefficients(np.array([1.0, 1.0, 0.01, -0.01]), (2, 2))
    ctx = OrthogonalContext(50, 1.0, 1.0, 0.5, beta_ls)
    assert spike_prob(ctx, 1) >= 0.5
    medians = median_threshold(ctx)
    assert medians.values[2] == 0.0 and medians.values[3] == 0.0
    assert medians.values[0] > 0


def test_per_group_tau2():
    """τ² may be given per group."""
    beta_ls = GroupedCoefficients(np.array([0.5, 0.5]), (1, 1))
    ctx = OrthogonalContext(30, 1.0, np.array([0.1, 10.0]), 0.0, beta_ls)
    medians = median_threshold(ctx)
    assert medians.values[0] < medians.values[1]


def test_group_lasso_threshold():
    """Groups with n‖β̂_g‖ ≤ λ are zeroed, equality included; others shrink."""
    beta_ls = GroupedCoefficients(np.array([3.0, 4.0, 0.1]), (2, 1))
    out = group_lasso_threshold(beta_ls, 10, 10.0)
    np.testing.assert_allclose(out.values[:2], (1 - 10.0 / 50.0) * np.array([3.0, 4.0]))
    assert out.values[2] == 0.0
    boundary = group_lasso_threshold(GroupedCoefficients(np.array([0.5]), (1,)), 10, 5.0)
    assert boundary.values[0] == 0.0
    with pytest.raises(ConfigurationError):
        group_lasso_threshold(beta_ls, 10, -1.0)


def test_from_design_least_squares():
    """The context's least-squares estimate is Xᵀy / n."""
    design = orthogonal_design(30, (2, 1), [1.0, 0.0, -1.0])
    ctx = OrthogonalContext.from_design(design, 1.0, 1.0, 0.5)
    np.testing.assert_allclose(ctx.beta_ls.values, design.x.T @ design.y / 30)


def _fixed_state(design, tau2, sigma2, pi0):
    return bgl_ss.BglState(
        beta=np.zeros(design.p),
        tau2=np.full(design.n_groups, tau2),
        sigma2=sigma2,
        pi0=pi0,
        lam=1.0,
        hyper=BglSsHyper(pi0=pi0),
    )


def test_spike_prob_matches_gibbs_conditional():
    """Under XᵀX = nI the closed form equals the sampler's conditional spike probability."""
    beta = [0.9, -0.4, 0.05, 0.02, 0.3, -0.25]
    design = orthogonal_design(40, (2, 2, 2), beta, seed=5)
    ctx = OrthogonalContext.from_design(design, math.sqrt(1.3), 0.5, 0.4)
    state = _fixed_state(design, 0.5, 1.3, 0.4)
    state.beta = np.array([0.7, 0.1, -0.3, 0.0, 0.0, 0.2])
    for g in range(3):
        l_g, mean, _ = bgl_ss.beta_group_conditional(g, state, design)
        assert spike_prob(ctx, g) == pytest.approx(l_g, rel=1e-9, abs=1e-12)
        np.testing.assert_allclose(
            mean, (1 - ctx.shrinkage(g)) * ctx.beta_ls.group(g), atol=1e-10
        )


def _gibbs_medians(design, tau2, sigma2, pi0, n_draws, seed):
    state = _fixed_state(design, tau2, sigma2, pi0)
    rng = RngStream(seed)
    draws = np.empty((n_draws, design.p))
    for i in range(n_draws):
        bgl_ss.step_beta(state, design, rng)
        draws[i] = state.beta
    return np.median(draws, axis=0)


def test_median_threshold_matches_gibbs_draws():
    """Closed-form medians agree with medians of β draws at fixed τ², σ² and π₀."""
    design = orthogonal_design(40, (2, 2, 2), [0.9, -0.4, 0.1, 0.05, 0.3, -0.25], seed=6)
    ctx = OrthogonalContext.from_design(design, 1.0, 0.5, 0.5)
    expected = median_threshold(ctx).values
    np.testing.assert_allclose(_gibbs_medians(design, 0.5, 1.0, 0.5, 4000, 7), expected, atol=0.05)


@pytest.mark.slow
def test_median_threshold_matches_long_gibbs_run():
    """Long-run version of the Gibbs median agreement with a tighter tolerance."""
    design = orthogonal_design(40, (2, 2, 2), [0.9, -0.4, 0.1, 0.05, 0.3, -0.25], seed=6)
    for pi0 in (0.2, 0.5, 0.8):
        ctx = OrthogonalContext.from_design(design, 1.0, 0.5, pi0)
        medians = _gibbs_medians(design, 0.5, 1.0, pi0, 40000, 8)
        np.testing.assert_allclose(medians, median_threshold(ctx).values, atol=0.015)


def test_median_threshold_shrinks_as_pi0_grows():
    """Raising π₀ never increases the magnitude of a median."""
    beta_ls = GroupedCoefficients(np.array([0.9, -0.4, 0.3, 0.25, -0.1, 0.6]), (2, 2, 2))
    previous = None
    for pi0 in np.linspace(0.0, 0.95, 20):
        current = np.abs(median_threshold(OrthogonalContext(40, 1.0, 0.5, pi0, beta_ls)).values)
        if previous is not None:
            assert np.all(current <= previous + 1e-12)
        previous = current


def test_median_threshold_zero_region_is_symmetric_interval():
    """For one coefficient the median is zero exactly on an interval around 0."""
    n, sigma, tau2, pi0 = 30, 1.0, 0.5, 0.5
    grid = np.linspace(-1.5, 1.5, 301)
    medians = np.array(
        [
            median_threshold(
                OrthogonalContext(n, sigma, tau2, pi0, GroupedCoefficients(np.array([b]), (1,)))
            ).values[0]
            for b in grid
        ]
    )
    zero = np.flatnonzero(medians == 0.0)
    assert zero.size > 0
    assert np.array_equal(zero, np.arange(zero[0], zero[-1] + 1))
    assert zero[0] + zero[-1] == grid.size - 1
    assert np.all(np.sign(medians[medians != 0.0]) == np.sign(grid[medians != 0.0]))
    for b, median in zip(grid, medians):
        ctx = OrthogonalContext(n, sigma, tau2, pi0, GroupedCoefficients(np.array([b]), (1,)))
        shrink = 1 - ctx.shrinkage(0)
        cut = sigma / math.sqrt(n) * median_quantile(spike_prob(ctx, 0)) * math.sqrt(shrink)
        assert (median == 0.0) == (shrink * abs(b) <= cut)


def _ls_draw(beta, n, rng):
    """β̂^LS under XᵀX = nI with σ = 1."""
    noise = rng.standard_normal(beta.shape[0]) / math.sqrt(n)
    return GroupedCoefficients(beta + noise, (2, 2, 2))


def test_median_threshold_selection_improves_with_n():
    """With nτ² growing like n^(7/4) the median model recovers the support at large n."""
    beta = np.array([1.0, -0.5, 0.0, 0.0, 0.8, 0.3])
    rng = np.random.default_rng(31)
    accuracy = []
    for n in (50, 500, 5000):
        hits = 0
        for _ in range(200):
            ctx = OrthogonalContext(n, 1.0, n**0.75, 0.5, _ls_draw(beta, n, rng))
            hits += np.array_equal(median_threshold(ctx).values != 0.0, beta != 0.0)
        accuracy.append(hits / 200)
    assert accuracy[-1] >= 0.99
    # 200 replications resolve accuracy to about one failure.
    assert all(b >= a - 0.01 for a, b in zip(accuracy, accuracy[1:]))


def test_group_lasso_null_group_zero_rate_stays_below_one():
    """With λ_n = λ₀√n the null group stays nonzero with probability bounded away from 0."""
    beta = np.array([1.0, -0.5, 0.0, 0.0, 0.8, 0.3])
    rng = np.random.default_rng(32)
    for n in (100, 10_000):
        zeros = 0
        for _ in range(200):
            out = group_lasso_threshold(_ls_draw(beta, n, rng), n, 2.0 * math.sqrt(n))
            zeros += bool(np.all(out.group(1) == 0.0))
            assert np.all(out.values[[0, 1, 4, 5]] != 0.0)
        assert zeros / 200 <= 0.95
