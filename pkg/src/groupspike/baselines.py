"""Frequentist comparators: group lasso, sparse group lasso, OLS and K-fold CV.

Penalised objectives follow the unscaled convention

    ‖y − Xβ‖² + λ₁‖β‖₁ + λ₂ Σ_g ‖β_g‖₂

so the group lasso at penalty λ matches the orthogonal-design group
thresholding rule at λ_n = λ/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .constants import (
    GRID_MIN_RATIO,
    GRID_SIZE,
    HARD_ZERO_TOL,
    KKT_TOL,
    MAX_SWEEPS,
    METHOD_GL,
    METHOD_SGL,
    SGL_RATIOS,
    SOLVER_TOL,
)
from .core import GroupedCoefficients, GroupedDesign
from .exceptions import (
    ConfigurationError,
    InsufficientData,
    MaxIterationsExceeded,
    RankDeficient,
    UnknownMethod,
)
from .logger import logger
from .parallel import run_parallel
from .rand import RngStream

_MAX_INNER = 10000


def _soft(w: np.ndarray, threshold: float) -> np.ndarray:
    return np.sign(w) * np.maximum(np.abs(w) - threshold, 0.0)


def _group_shrink(w: np.ndarray, threshold: float) -> np.ndarray:
    norm = float(np.linalg.norm(w))
    if norm <= threshold:
        return np.zeros_like(w)
    return (1.0 - threshold / norm) * w


def sgl_prox(w: np.ndarray, lambda1: float, lambda2: float) -> np.ndarray:
    """Prox of λ₁‖·‖₁ + λ₂‖·‖₂ on one block: group shrink after soft threshold."""
    return _group_shrink(_soft(w, lambda1), lambda2)


def objective(design: GroupedDesign, beta: np.ndarray, lambda1: float, lambda2: float) -> float:
    """Penalised least-squares objective."""
    resid = design.y - design.x @ beta
    groups = sum(
        float(np.linalg.norm(beta[design.group_slice(g)])) for g in range(design.n_groups)
    )
    return float(resid @ resid) + lambda1 * float(np.sum(np.abs(beta))) + lambda2 * groups


def kkt_residual_sparse_group_lasso(
    design: GroupedDesign, beta: np.ndarray, lambda1: float, lambda2: float
) -> float:
    """Largest violation of the subgradient optimality conditions."""
    grad = -2.0 * design.x.T @ (design.y - design.x @ beta)
    worst = 0.0
    for g in range(design.n_groups):
        block = design.group_slice(g)
        beta_g = beta[block]
        grad_g = grad[block]
        norm = float(np.linalg.norm(beta_g))
        if norm == 0.0:
            excess = float(np.linalg.norm(_soft(-grad_g, lambda1))) - lambda2
            worst = max(worst, excess)
            continue
        shifted = grad_g + lambda2 * beta_g / norm
        active = beta_g != 0.0
        if np.any(active):
            worst = max(
                worst,
                float(np.max(np.abs(shifted[active] + lambda1 * np.sign(beta_g[active])))),
            )
        if np.any(~active):
            worst = max(worst, float(np.max(np.abs(shifted[~active]))) - lambda1)
    return max(worst, 0.0)


def kkt_residual_group_lasso(design: GroupedDesign, beta: np.ndarray, lam: float) -> float:
    return kkt_residual_sparse_group_lasso(design, beta, 0.0, lam)


def _block_descent(
    design: GroupedDesign,
    lambda1: float,
    lambda2: float,
    beta0: Optional[np.ndarray],
    tol: float,
    kkt_tol: float,
    max_sweeps: int,
) -> np.ndarray:
    if lambda1 < 0 or lambda2 < 0:
        raise ConfigurationError(f"Penalties must be non-negative, got {lambda1}, {lambda2}")
    beta = np.zeros(design.p) if beta0 is None else np.array(beta0, dtype=float)
    blocks = [design.group_slice(g) for g in range(design.n_groups)]
    grams = [np.asarray(design.gram[b, b]) for b in blocks]
    steps = [2.0 * float(np.linalg.norm(gram, 2)) for gram in grams]
    resid = design.y - design.x @ beta

    for sweep in range(max_sweeps):
        largest = 0.0
        for block, gram, lipschitz in zip(blocks, grams, steps):
            x_g = design.x[:, block]
            old = beta[block].copy()
            partial_resid = resid + x_g @ old
            corr = x_g.T @ partial_resid
            if float(np.linalg.norm(_soft(2.0 * corr, lambda1))) <= lambda2 or lipschitz == 0.0:
                new = np.zeros_like(old)
            else:
                new = old
                for _ in range(_MAX_INNER):
                    grad = -2.0 * (corr - gram @ new)
                    candidate = sgl_prox(
                        new - grad / lipschitz, lambda1 / lipschitz, lambda2 / lipschitz
                    )
                    moved = float(np.max(np.abs(candidate - new)))
                    new = candidate
                    if moved <= 0.01 * tol:
                        break
            beta[block] = new
            resid = partial_resid - x_g @ new
            largest = max(largest, float(np.max(np.abs(new - old))))
        if largest < tol:
            candidate = np.where(np.abs(beta) < HARD_ZERO_TOL, 0.0, beta)
            if kkt_residual_sparse_group_lasso(design, candidate, lambda1, lambda2) <= kkt_tol:
                logger.debug(f"Block descent converged after {sweep + 1} sweeps")
                return candidate
    raise MaxIterationsExceeded(
        f"Block coordinate descent did not converge in {max_sweeps} sweeps",
        "Standardise the covariates or raise the sweep cap",
    )


def fit_group_lasso(
    design: GroupedDesign,
    lam: float,
    beta0: Optional[np.ndarray] = None,
    tol: float = SOLVER_TOL,
    kkt_tol: float = KKT_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> GroupedCoefficients:
    """
    Group lasso by block coordinate descent with per-block majorisation.

    Args:
        design: Grouped design, columns standardised upstream
        lam: Group penalty λ ≥ 0
        beta0: Optional warm start

    Returns:
        Solution whose zero groups are exactly zero

    Raises:
        MaxIterationsExceeded: If convergence and KKT checks fail within ``max_sweeps``
    """
    values = _block_descent(design, 0.0, lam, beta0, tol, kkt_tol, max_sweeps)
    return GroupedCoefficients(values, design.group_sizes)


def fit_sparse_group_lasso(
    design: GroupedDesign,
    lambda1: float,
    lambda2: float,
    beta0: Optional[np.ndarray] = None,
    tol: float = SOLVER_TOL,
    kkt_tol: float = KKT_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> GroupedCoefficients:
    """Sparse group lasso by blockwise proximal descent.

    A block is set to zero when ‖S(2X_gᵀr_g, λ₁)‖₂ ≤ λ₂; otherwise the block
    is solved by proximal gradient steps with the soft-then-group prox.
    """
    values = _block_descent(design, lambda1, lambda2, beta0, tol, kkt_tol, max_sweeps)
    return GroupedCoefficients(values, design.group_sizes)


def fit_ols(design: GroupedDesign) -> GroupedCoefficients:
    """
    Ordinary least squares.

    Raises:
        RankDeficient: If XᵀX is singular, which includes every p > n design
    """
    if design.p > design.n:
        raise RankDeficient(
            f"Least squares needs p <= n, got p={design.p}, n={design.n}",
            "Use a penalised method for p > n problems",
        )
    beta, _, rank, _ = np.linalg.lstsq(design.x, design.y, rcond=None)
    if rank < design.p:
        raise RankDeficient(
            f"Design has rank {rank} < p={design.p}",
            "Remove collinear columns or use a penalised method",
        )
    return GroupedCoefficients(beta, design.group_sizes)


@dataclass(frozen=True)
class PenaltyGrid:
    """Descending penalties. For SGL ``values`` is the total penalty and
    ``ratio`` the share given to the L1 term."""

    values: Tuple[float, ...]
    ratio: Optional[float] = None

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ConfigurationError("Penalty grid must not be empty")
        if any(v <= 0 for v in values):
            raise ConfigurationError("Penalty grid values must be positive")
        if any(a <= b for a, b in zip(values, values[1:])):
            raise ConfigurationError("Penalty grid must be strictly descending")
        if self.ratio is not None and not 0.0 <= self.ratio <= 1.0:
            raise ConfigurationError(f"SGL ratio must lie in [0, 1], got {self.ratio}")
        object.__setattr__(self, "values", values)

    def penalties(self, index: int) -> Tuple[float, float]:
        """(λ₁, λ₂) at one grid point."""
        total = self.values[index]
        if self.ratio is None:
            return 0.0, total
        return self.ratio * total, (1.0 - self.ratio) * total


def group_lasso_lambda_max(design: GroupedDesign) -> float:
    """Smallest λ at which the group lasso solution is all zero, 2·max_g‖X_gᵀy‖₂."""
    return 2.0 * max(
        float(np.linalg.norm(design.xty[design.group_slice(g)])) for g in range(design.n_groups)
    )


def sparse_group_lasso_lambda_max(design: GroupedDesign, ratio: float) -> float:
    """Smallest total penalty with an all-zero SGL solution for an L1 share ``ratio``."""
    if ratio <= 0.0:
        return group_lasso_lambda_max(design)
    worst = 0.0
    for g in range(design.n_groups):
        corr = 2.0 * np.asarray(design.xty[design.group_slice(g)])
        if not np.any(corr != 0.0):
            continue
        if ratio >= 1.0:
            worst = max(worst, float(np.max(np.abs(corr))))
            continue

        def excess(total: float, c: np.ndarray = corr) -> float:
            return float(np.linalg.norm(_soft(c, ratio * total))) - (1.0 - ratio) * total

        upper = float(np.max(np.abs(corr))) / ratio
        worst = max(worst, brentq(excess, 0.0, upper))
    return worst


def penalty_grid(
    design: GroupedDesign,
    ratio: Optional[float] = None,
    n_points: int = GRID_SIZE,
    min_ratio: float = GRID_MIN_RATIO,
) -> PenaltyGrid:
    """Log-spaced grid from the all-zero threshold down to ``min_ratio`` of it."""
    if ratio is None:
        top = group_lasso_lambda_max(design)
    else:
        top = sparse_group_lasso_lambda_max(design, ratio)
    if not top > 0:
        top = 1.0
    return PenaltyGrid(tuple(np.geomspace(top, top * min_ratio, n_points)), ratio)


def default_grids(design: GroupedDesign, method: str) -> List[PenaltyGrid]:
    if method == METHOD_GL:
        return [penalty_grid(design)]
    if method == METHOD_SGL:
        return [penalty_grid(design, ratio) for ratio in SGL_RATIOS]
    raise UnknownMethod(f"No penalty grid for method {method}", "Use 'gl' or 'sgl'")


def fit_path(design: GroupedDesign, grid: PenaltyGrid) -> List[GroupedCoefficients]:
    """Fits along a grid from the largest penalty down, each warm-started."""
    fits: List[GroupedCoefficients] = []
    beta0: Optional[np.ndarray] = None
    for index in range(len(grid.values)):
        lambda1, lambda2 = grid.penalties(index)
        fit = fit_sparse_group_lasso(design, lambda1, lambda2, beta0=beta0)
        fits.append(fit)
        beta0 = np.array(fit.values)
    return fits


@dataclass
class CvResult:
    """Outcome of K-fold cross-validation over one or more grids."""

    method: str
    lambda1: float
    lambda2: float
    grid_index: int
    point_index: int
    grids: List[PenaltyGrid]
    curves: List[np.ndarray] = field(default_factory=list)

    @property
    def best_error(self) -> float:
        return float(self.curves[self.grid_index][self.point_index])


def _fold_errors(
    fold: np.ndarray, design: GroupedDesign, grids: Sequence[PenaltyGrid]
) -> List[np.ndarray]:
    train = np.setdiff1d(np.arange(design.n), fold)
    train_design = design.subset(train)
    x_test = design.x[fold]
    y_test = design.y[fold]
    errors = []
    for grid in grids:
        fits = fit_path(train_design, grid)
        errors.append(np.array([float(np.mean((y_test - x_test @ f.values) ** 2)) for f in fits]))
    return errors


def cross_validate(
    design: GroupedDesign,
    method: str,
    grids: Optional[Sequence[PenaltyGrid]] = None,
    k: int = 5,
    rng: Optional[RngStream] = None,
    jobs: int = 1,
) -> CvResult:
    """
    Choose the penalty minimising mean held-out squared error.

    Fold assignment is a permutation drawn from ``rng``. Ties go to the
    larger penalty.

    Raises:
        InsufficientData: If k < 2 or there are fewer observations than folds
    """
    if k < 2 or design.n < k:
        raise InsufficientData(
            f"Cross-validation needs k >= 2 and n >= k, got k={k}, n={design.n}",
            "Reduce the number of folds",
        )
    if grids is None:
        grids = default_grids(design, method)
    grids = list(grids)
    rng = rng if rng is not None else RngStream(0)
    folds = np.array_split(rng.permutation(design.n), k)
    per_fold = run_parallel(
        partial(_fold_errors, design=design, grids=grids), folds, max_workers=max(1, jobs)
    )
    curves = [np.mean([errs[i] for errs in per_fold], axis=0) for i in range(len(grids))]

    best: Optional[Tuple[float, float, int, int]] = None
    for grid_index, (grid, curve) in enumerate(zip(grids, curves)):
        point = int(np.argmin(curve))
        key = (float(curve[point]), -grid.values[point])
        if best is None or key < best[:2]:
            best = (key[0], key[1], grid_index, point)
    assert best is not None
    lambda1, lambda2 = grids[best[2]].penalties(best[3])
    return CvResult(
        method=method,
        lambda1=lambda1,
        lambda2=lambda2,
        grid_index=best[2],
        point_index=best[3],
        grids=grids,
        curves=curves,
    )
