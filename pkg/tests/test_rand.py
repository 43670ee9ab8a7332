"""Tests for random variate generators."""

import math

import numpy as np
import pytest
from scipy import linalg, stats

from groupspike.exceptions import InvalidParameter, NotPositiveDefinite
from groupspike.rand import (
    RngStream,
    draw_beta,
    draw_gamma,
    draw_inverse_gamma,
    draw_inverse_gaussian,
    draw_laplace,
    draw_mvnormal,
    draw_mvnormal_canonical,
    draw_truncated_normal_positive,
    precision_cholesky,
)

N = 20000


def test_stream_reproducible():
    """The same seed and stream path give the same sequence."""
    a = RngStream(11, 2, 3).standard_normal(5)
    b = RngStream(11, 2, 3).standard_normal(5)
    np.testing.assert_array_equal(a, b)


def test_streams_differ():
    """Different stream paths give different sequences."""
    a = RngStream(11, 2, 3).standard_normal(5)
    b = RngStream(11, 2, 4).standard_normal(5)
    c = RngStream(11, 2).child(3).standard_normal(5)
    assert not np.array_equal(a, b)
    np.testing.assert_array_equal(a, c)


def test_gamma_is_shape_rate():
    """Gamma(2, rate=4) has mean 0.5."""
    draws = draw_gamma(2.0, 4.0, RngStream(1), N)
    assert abs(np.mean(draws) - 0.5) < 0.02


def test_inverse_gamma_mean():
    """InverseGamma(5, 4) has mean 1."""
    draws = draw_inverse_gamma(5.0, 4.0, RngStream(2), N)
    assert abs(np.mean(draws) - 1.0) < 0.03


def test_inverse_gaussian_mean():
    """InverseGaussian(2, 3) has mean 2."""
    draws = draw_inverse_gaussian(2.0, 3.0, RngStream(3), N)
    assert np.all(draws > 0)
    assert abs(np.mean(draws) - 2.0) < 0.07


def test_beta_and_laplace_moments():
    """Beta(2, 6) mean and Laplace mean absolute value."""
    assert abs(np.mean(draw_beta(2.0, 6.0, RngStream(4), N)) - 0.25) < 0.01
    assert abs(np.mean(np.abs(draw_laplace(2.0, RngStream(5), N))) - 0.5) < 0.02


def test_truncated_normal_half_normal():
    """Location 0 gives a half normal with mean sqrt(2/pi)."""
    draws = draw_truncated_normal_positive(0.0, 1.0, RngStream(6), N)
    assert np.all(draws > 0)
    assert abs(np.mean(draws) - math.sqrt(2.0 / math.pi)) < 0.03


def test_truncated_normal_far_tail():
    """Far-tail draws stay positive and concentrate near zero."""
    draws = draw_truncated_normal_positive(-10.0, 1.0, RngStream(7), 2000)
    assert np.all(draws > 0)
    assert np.mean(draws) < 0.2


def test_truncated_normal_scalar_and_invalid():
    """Scalar draws are floats; bad parameters raise."""
    value = draw_truncated_normal_positive(1.0, 0.5, RngStream(8))
    assert isinstance(value, float) and value > 0
    with pytest.raises(InvalidParameter):
        draw_truncated_normal_positive(0.0, 0.0, RngStream(8))
    with pytest.raises(InvalidParameter):
        draw_truncated_normal_positive(float("nan"), 1.0, RngStream(8))


def test_invalid_gamma_parameters():
    """Non-positive shape or rate raise InvalidParameter."""
    with pytest.raises(InvalidParameter):
        draw_gamma(-1.0, 1.0, RngStream(0))
    with pytest.raises(InvalidParameter):
        draw_inverse_gaussian(1.0, 0.0, RngStream(0))


def test_mvnormal_not_positive_definite():
    """An indefinite covariance raises NotPositiveDefinite."""
    with pytest.raises(NotPositiveDefinite):
        draw_mvnormal(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]), RngStream(0))
    with pytest.raises(NotPositiveDefinite):
        precision_cholesky(np.array([[0.0, 0.0], [0.0, 1.0]]))


def test_mvnormal_canonical_mean():
    """Canonical draws have mean P^-1 h and the sample mean matches."""
    precision = np.array([[2.0, 0.5], [0.5, 1.0]])
    linear = np.array([1.0, -1.0])
    chol = precision_cholesky(precision)
    _, mean = draw_mvnormal_canonical(chol, linear, 1.0, RngStream(9))
    np.testing.assert_allclose(mean, linalg.solve(precision, linear))
    rng = RngStream(10)
    draws = np.array([draw_mvnormal_canonical(chol, linear, 1.0, rng)[0] for _ in range(5000)])
    np.testing.assert_allclose(draws.mean(axis=0), mean, atol=0.05)
    np.testing.assert_allclose(np.cov(draws.T), linalg.inv(precision), atol=0.05)


@pytest.mark.parametrize("location", [-3.0, 0.0, 2.0])
def test_truncated_normal_matches_scipy(location):
    """Positive-truncated draws pass a KS test against scipy's truncnorm."""
    sd = 1.5
    draws = draw_truncated_normal_positive(location, sd, RngStream(11, int(location + 10)), N)
    reference = stats.truncnorm(-location / sd, np.inf, loc=location, scale=sd)
    assert stats.kstest(draws, reference.cdf).pvalue > 1e-3


def test_truncated_normal_scaled_half_normal_mean():
    """Location 0 with sd s has mean s·sqrt(2/pi)."""
    draws = draw_truncated_normal_positive(0.0, 2.5, RngStream(12), N)
    assert abs(np.mean(draws) - 2.5 * math.sqrt(2.0 / math.pi)) < 0.06


def test_inverse_gaussian_reciprocal_mean():
    """E[1/X] = 1/mu + 1/lambda for an inverse Gaussian."""
    draws = draw_inverse_gaussian(2.0, 3.0, RngStream(13), N)
    assert abs(np.mean(1.0 / draws) - (0.5 + 1.0 / 3.0)) < 0.02


def test_laplace_matches_scipy():
    """draw_laplace(rate) is a Laplace with scale 1/rate."""
    draws = draw_laplace(2.0, RngStream(14), N)
    assert stats.kstest(draws, stats.laplace(scale=0.5).cdf).pvalue > 1e-3
