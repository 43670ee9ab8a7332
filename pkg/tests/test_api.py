"""Tests for the fit entry point."""

import numpy as np
import pytest

from groupspike.api import FitOptions, check_method, fit
from groupspike.constants import METHODS
from groupspike.core import BglSsHyper, BsgsSsHyper, SamplerConfig, make_design, standardize
from groupspike.exceptions import UnknownMethod
from groupspike.rand import RngStream

TINY = SamplerConfig(
    n_iter=60,
    n_burn=20,
    em_rounds=0,
    bgl_ss=BglSsHyper(lam=1.0),
    bsgs_ss=BsgsSsHyper(t=1.0),
)


def _design(n=30, seed=4):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 6))
    beta = np.array([1.0, -1.0, 0.0, 0.0, 0.0, 0.5])
    design, _ = standardize(make_design(x @ beta + 0.3 * rng.standard_normal(n), x, (2, 2, 2)))
    return design


@pytest.mark.parametrize("method", METHODS)
def test_every_method_fits(method):
    """Each registered method returns coefficients of length p."""
    result = fit(_design(), method, TINY, RngStream(1), FitOptions(folds=3))
    assert result.method == method
    assert result.coefficients.values.shape == (6,)
    assert np.all(np.isfinite(result.coefficients.values))
    assert result.elapsed >= 0


def test_selection_by_method():
    """Spike-and-slab methods select by MTM; continuous posteriors and OLS select nothing."""
    design = _design()
    assert fit(design, "bgl-ss", TINY, RngStream(2)).selection is not None
    assert fit(design, "bsgs-ss", TINY, RngStream(2)).selection is not None
    assert fit(design, "bsgl", TINY, RngStream(2)).selection is None
    assert fit(design, "bgl", TINY, RngStream(2)).selection is None
    assert fit(design, "ols", TINY, RngStream(2)).selection is None


def test_bayesian_coefficients_are_medians():
    """Bayesian point estimates default to the marginal median."""
    result = fit(_design(), "bgl-ss", TINY, RngStream(3))
    assert result.is_bayesian
    np.testing.assert_array_equal(result.coefficients.values, result.estimate("median").values)
    np.testing.assert_array_equal(
        result.estimate("mean").values, result.summary.coef_mean.values
    )
    with pytest.raises(UnknownMethod):
        result.estimate("mode")


def test_fixed_penalty_skips_cross_validation():
    """A given penalty is used as is; gl ignores the L1 part."""
    design = _design()
    result = fit(design, "gl", TINY, RngStream(4), FitOptions(penalty=(5.0, 2.0)))
    assert result.cv is None
    assert not result.is_bayesian
    cv_result = fit(design, "sgl", TINY, RngStream(4), FitOptions(folds=3))
    assert cv_result.cv is not None


def test_predict_uses_estimate():
    """Predictions are X times the point estimate."""
    design = _design()
    result = fit(design, "ols", TINY, RngStream(5))
    np.testing.assert_allclose(result.predict(design.x), design.x @ result.coefficients.values)


def test_same_stream_same_fit():
    """Fits are reproducible from the stream."""
    design = _design()
    a = fit(design, "bsgs-ss", TINY, RngStream(6))
    b = fit(design, "bsgs-ss", TINY, RngStream(6))
    np.testing.assert_array_equal(a.coefficients.values, b.coefficients.values)


def test_unknown_method():
    """Unregistered names raise UnknownMethod with the name in the message."""
    with pytest.raises(UnknownMethod, match="unknown method 'lasso'"):
        check_method("lasso")
    with pytest.raises(UnknownMethod):
        fit(_design(), "lasso", TINY)
