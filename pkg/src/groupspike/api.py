"""Public Python API: one entry point that fits any registered method."""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .baselines import CvResult, cross_validate, fit_ols, fit_sparse_group_lasso
from .bgl_ss import run_bgl_ss
from .bsgl import run_bsgl
from .bsgs_ss import run_bsgs_ss
from .constants import (
    DEFAULT_FOLDS,
    METHOD_BGL,
    METHOD_BGL_SS,
    METHOD_BSGL,
    METHOD_BSGS_SS,
    METHOD_GL,
    METHOD_OLS,
    METHOD_SGL,
    METHODS,
)
from .core import GroupedCoefficients, GroupedDesign, SamplerConfig, SelectionPattern, selection_of
from .exceptions import UnknownMethod
from .logger import logger
from .posterior import ChainDraws, PosteriorSummary, summarize
from .rand import RngStream


@dataclass
class FitResult:
    """Estimates from one method on one design.

    Bayesian methods carry ``draws`` and ``summary``; penalised methods
    carry ``cv`` when the penalty was chosen by cross-validation.
    """

    method: str
    coefficients: GroupedCoefficients
    selection: Optional[SelectionPattern]
    elapsed: float
    draws: Optional[ChainDraws] = None
    summary: Optional[PosteriorSummary] = None
    cv: Optional[CvResult] = None

    @property
    def is_bayesian(self) -> bool:
        return self.summary is not None

    def estimate(self, kind: str = "median") -> GroupedCoefficients:
        """Point estimate: ``mean`` or ``median`` for chains, the solution otherwise."""
        if self.summary is None:
            return self.coefficients
        if kind == "mean":
            return self.summary.coef_mean
        if kind == "median":
            return self.summary.coef_median
        raise UnknownMethod(f"Unknown point estimate {kind}", "Use 'mean' or 'median'")

    def predict(self, x: np.ndarray, kind: str = "median") -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.estimate(kind).values


@dataclass
class FitOptions:
    """Settings that only some methods read."""

    folds: int = DEFAULT_FOLDS
    jobs: int = 1
    penalty: Optional[Tuple[float, float]] = None


def _bayesian(
    method: str, draws: ChainDraws, started: float, level: float = 0.95
) -> FitResult:
    summary = summarize(draws, level)
    return FitResult(
        method=method,
        coefficients=summary.coef_median,
        selection=summary.mtm,
        elapsed=time.perf_counter() - started,
        draws=draws,
        summary=summary,
    )


def _fit_bgl_ss(
    design: GroupedDesign, config: SamplerConfig, rng: RngStream, options: FitOptions
) -> FitResult:
    started = time.perf_counter()
    return _bayesian(METHOD_BGL_SS, run_bgl_ss(design, config, rng), started)


def _fit_bgl(
    design: GroupedDesign, config: SamplerConfig, rng: RngStream, options: FitOptions
) -> FitResult:
    started = time.perf_counter()
    dense = config.replace(bgl_ss=dataclasses.replace(config.bgl_ss, pi0=0.0))
    return _bayesian(METHOD_BGL, run_bgl_ss(design, dense, rng, method=METHOD_BGL), started)


def _fit_bsgl(
    design: GroupedDesign, config: SamplerConfig, rng: RngStream, options: FitOptions
) -> FitResult:
    started = time.perf_counter()
    return _bayesian(METHOD_BSGL, run_bsgl(design, config, rng), started)


def _fit_bsgs_ss(
    design: GroupedDesign, config: SamplerConfig, rng: RngStream, options: FitOptions
) -> FitResult:
    started = time.perf_counter()
    return _bayesian(METHOD_BSGS_SS, run_bsgs_ss(design, config, rng), started)


def _penalised(method: str) -> Callable[..., FitResult]:
    def fit_method(
        design: GroupedDesign, config: SamplerConfig, rng: RngStream, options: FitOptions
    ) -> FitResult:
        started = time.perf_counter()
        cv: Optional[CvResult] = None
        if options.penalty is not None:
            lambda1, lambda2 = options.penalty
            if method == METHOD_GL:
                lambda1 = 0.0
        else:
            cv = cross_validate(design, method, k=options.folds, rng=rng, jobs=options.jobs)
            lambda1, lambda2 = cv.lambda1, cv.lambda2
            logger.debug(f"{method} CV chose lambda1={lambda1:.4g}, lambda2={lambda2:.4g}")
        beta = fit_sparse_group_lasso(design, lambda1, lambda2)
        return FitResult(
            method=method,
            coefficients=beta,
            selection=selection_of(beta),
            elapsed=time.perf_counter() - started,
            cv=cv,
        )

    return fit_method


def _fit_ols(
    design: GroupedDesign, config: SamplerConfig, rng: RngStream, options: FitOptions
) -> FitResult:
    started = time.perf_counter()
    beta = fit_ols(design)
    return FitResult(
        method=METHOD_OLS,
        coefficients=beta,
        selection=None,
        elapsed=time.perf_counter() - started,
    )


FitFunction = Callable[[GroupedDesign, SamplerConfig, RngStream, FitOptions], FitResult]

_REGISTRY: Dict[str, FitFunction] = {
    METHOD_BGL_SS: _fit_bgl_ss,
    METHOD_BGL: _fit_bgl,
    METHOD_BSGL: _fit_bsgl,
    METHOD_BSGS_SS: _fit_bsgs_ss,
    METHOD_GL: _penalised(METHOD_GL),
    METHOD_SGL: _penalised(METHOD_SGL),
    METHOD_OLS: _fit_ols,
}


def check_method(method: str) -> str:
    """Return ``method`` if registered.

    Raises:
        UnknownMethod: Otherwise
    """
    if method not in _REGISTRY:
        raise UnknownMethod(
            f"unknown method '{method}'",
            f"Choose one of: {', '.join(METHODS)}",
        )
    return method


def fit(
    design: GroupedDesign,
    method: str,
    config: Optional[SamplerConfig] = None,
    rng: Optional[RngStream] = None,
    options: Optional[FitOptions] = None,
) -> FitResult:
    """Fit one method.

    Args:
        design: Standardised grouped design
        method: One of ``bgl-ss``, ``bgl``, ``bsgl``, ``bsgs-ss``, ``gl``, ``sgl``, ``ols``
        config: Sampler settings; defaults when omitted
        rng: Random stream; derived from ``config.seed`` when omitted
        options: CV folds, worker count or a fixed penalty for ``gl``/``sgl``

    Returns:
        Point estimate, selected model and method-specific detail
    """
    fit_method = _REGISTRY[check_method(method)]
    config = config or SamplerConfig()
    rng = rng if rng is not None else RngStream(config.seed)
    result = fit_method(design, config, rng, options or FitOptions())
    logger.debug(f"{method} fitted in {result.elapsed:.2f}s")
    return result
