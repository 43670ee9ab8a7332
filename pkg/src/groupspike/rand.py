"""Random variates for the Gibbs conditionals.

Every draw goes through an explicit :class:`RngStream`. Gamma variates are
shape-rate throughout (density ∝ x^{shape-1} exp(-rate·x)); call sites that
start from a scale parameterisation convert before calling.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.special import ndtr, ndtri

from .exceptions import InvalidParameter, NotPositiveDefinite

ArrayLike = Union[float, np.ndarray]

_SEED_MASK = (1 << 64) - 1
# Below this standardised lower bound the inverse CDF is accurate; above it
# the exponential rejection sampler takes over.
_TAIL_SWITCH = 5.0
_TINY = np.finfo(float).tiny


class RngStream:
    """Deterministic generator keyed by a seed and a stream path.

    The same ``(seed, *stream)`` always reproduces the same sequence and
    distinct stream paths are statistically independent (``SeedSequence``
    spawn keys). A stream is owned by one chain; never share it between
    threads.
    """

    def __init__(self, seed: int, *stream: int):
        self.seed = int(seed)
        self.stream: Tuple[int, ...] = tuple(int(s) for s in stream)
        sequence = np.random.SeedSequence(
            entropy=self.seed & _SEED_MASK,
            spawn_key=tuple(s & _SEED_MASK for s in self.stream),
        )
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def child(self, *stream: int) -> "RngStream":
        """Independent stream below this one in the stream path."""
        return RngStream(self.seed, *self.stream, *stream)

    def standard_normal(self, size: Optional[Union[int, Tuple[int, ...]]] = None) -> ArrayLike:
        return self.generator.standard_normal(size)

    def uniform(self, size: Optional[Union[int, Tuple[int, ...]]] = None) -> ArrayLike:
        return self.generator.random(size)

    def bernoulli(self, prob: float) -> bool:
        return bool(self.generator.random() < prob)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream={self.stream})"


def _positive(name: str, value: ArrayLike) -> None:
    arr = np.asarray(value, dtype=float)
    if not (np.all(np.isfinite(arr)) and np.all(arr > 0)):
        raise InvalidParameter(f"{name} must be positive and finite, got {value!r}")


def draw_gamma(
    shape: ArrayLike, rate: ArrayLike, rng: RngStream, size: Optional[int] = None
) -> ArrayLike:
    """Gamma(shape, rate) draw with mean shape/rate."""
    _positive("shape", shape)
    _positive("rate", rate)
    return rng.generator.gamma(shape, 1.0 / np.asarray(rate, dtype=float), size)


def draw_inverse_gamma(
    shape: ArrayLike, scale: ArrayLike, rng: RngStream, size: Optional[int] = None
) -> ArrayLike:
    """InverseGamma(shape, scale): reciprocal of a Gamma(shape, rate=scale) draw."""
    _positive("shape", shape)
    _positive("scale", scale)
    return 1.0 / draw_gamma(shape, scale, rng, size)


def draw_inverse_gaussian(
    mean: ArrayLike, shape: ArrayLike, rng: RngStream, size: Optional[int] = None
) -> ArrayLike:
    """Inverse Gaussian with mean μ and shape λ.

    NumPy's Wald generator implements the Michael-Schucany-Haas
    transformation with one uniform acceptance step.
    """
    _positive("mean", mean)
    _positive("shape", shape)
    return rng.generator.wald(mean, shape, size)


def _robert_tail(alpha: float, rng: RngStream) -> float:
    """Standard normal conditioned on z > alpha, exponential proposal."""
    rate = 0.5 * (alpha + math.sqrt(alpha * alpha + 4.0))
    while True:
        z = alpha + rng.generator.exponential(1.0 / rate)
        if rng.uniform() <= math.exp(-0.5 * (z - rate) ** 2):
            return float(z)


def draw_truncated_normal_positive(
    location: float, sd: float, rng: RngStream, size: Optional[int] = None
) -> ArrayLike:
    """
    Draw from N(location, sd²) conditioned on the value being positive.

    Uses the inverse CDF on the upper tail, ``z = -Φ⁻¹(u·Φ(-α))`` with
    ``α = -location/sd``, and Robert's exponential rejection once α is far
    in the tail. Naive accept-reject is never used.

    Raises:
        InvalidParameter: If ``sd`` is not positive or ``location`` is not finite
    """
    _positive("sd", sd)
    if not math.isfinite(location):
        raise InvalidParameter(f"location must be finite, got {location!r}")
    alpha = -location / sd
    count = 1 if size is None else int(size)
    if alpha < _TAIL_SWITCH:
        mass = ndtr(-alpha)
        u = np.maximum(rng.uniform(count), _TINY)
        z = -ndtri(u * mass)
    else:
        z = np.array([_robert_tail(alpha, rng) for _ in range(count)])
    # Rounding can land exactly on the bound when location/sd is huge.
    values = np.maximum(location + sd * z, _TINY)
    return float(values[0]) if size is None else values


def draw_mvnormal(
    mean: np.ndarray, cov: np.ndarray, rng: RngStream, size: Optional[int] = None
) -> np.ndarray:
    """
    Multivariate normal draw ``mean + L z`` with ``L`` the Cholesky factor of ``cov``.

    Raises:
        NotPositiveDefinite: If the Cholesky factorisation fails
    """
    mean = np.asarray(mean, dtype=float)
    try:
        chol = np.linalg.cholesky(np.asarray(cov, dtype=float))
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(
            "Covariance matrix is not positive definite",
            "Check that variance parameters are strictly positive",
        ) from e
    if size is None:
        return mean + chol @ rng.standard_normal(mean.shape[0])
    z = rng.standard_normal((int(size), mean.shape[0]))
    return mean + z @ chol.T


def precision_cholesky(precision: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a precision matrix.

    Raises:
        NotPositiveDefinite: If the factorisation fails
    """
    try:
        return linalg.cholesky(precision, lower=True)
    except linalg.LinAlgError as e:
        raise NotPositiveDefinite(
            "Precision matrix is not positive definite",
            "Check that variance parameters are strictly positive",
        ) from e


def draw_mvnormal_canonical(
    chol: np.ndarray, linear: np.ndarray, scale: float, rng: RngStream
) -> Tuple[np.ndarray, np.ndarray]:
    """Draw from N(P⁻¹h, scale·P⁻¹) given the lower Cholesky factor of P.

    Returns:
        Tuple of (draw, mean)
    """
    mean = linalg.cho_solve((chol, True), linear)
    z = rng.standard_normal(linear.shape[0])
    noise = linalg.solve_triangular(chol, z, lower=True, trans="T")
    return mean + math.sqrt(scale) * noise, mean


def draw_beta(a: float, b: float, rng: RngStream, size: Optional[int] = None) -> ArrayLike:
    """Beta(a, b) draw with mean a/(a+b)."""
    _positive("a", a)
    _positive("b", b)
    return rng.generator.beta(a, b, size)


def draw_laplace(rate: float, rng: RngStream, size: Optional[int] = None) -> ArrayLike:
    """Double exponential with density (rate/2)·exp(-rate·|x|)."""
    _positive("rate", rate)
    return rng.generator.laplace(0.0, 1.0 / rate, size)
