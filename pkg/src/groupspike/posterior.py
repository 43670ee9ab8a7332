"""Stored chains, posterior summaries and chain diagnostics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constants import CREDIBLE_LEVEL, EM_RTOL, EM_WINDOW
from .core import GroupedCoefficients, SelectionPattern, group_offsets, selection_of
from .exceptions import EmptyChain

Pattern = Tuple[bool, ...]


@dataclass
class EmResult:
    """Outcome of a Monte Carlo EM run for one hyperparameter."""

    name: str
    value: float
    path: List[float] = field(default_factory=list)
    converged: bool = False


@dataclass
class ChainDraws:
    """Post burn-in draws of one Gibbs chain.

    ``beta`` has one row per stored iteration. ``params`` holds the other
    monitored quantities with the same leading dimension. ``model_counts``
    tallies coefficient-level inclusion patterns when the model is sparse.
    """

    method: str
    beta: np.ndarray
    group_sizes: Tuple[int, ...]
    n_iter: int
    n_burn: int
    params: Dict[str, np.ndarray] = field(default_factory=dict)
    model_counts: Counter = field(default_factory=Counter)
    sparse: bool = True
    em: Optional[EmResult] = None

    @property
    def n_draws(self) -> int:
        return int(self.beta.shape[0])

    def group_model_counts(self) -> Counter:
        """Visit counts keyed by group-level inclusion pattern."""
        offsets = group_offsets(self.group_sizes)
        counts: Counter = Counter()
        for pattern, count in self.model_counts.items():
            key = tuple(
                any(pattern[offsets[g] : offsets[g + 1]]) for g in range(len(self.group_sizes))
            )
            counts[key] += count
        return counts

    def spike_frequency(self) -> np.ndarray:
        """Fraction of stored draws in which each group is exactly zero."""
        offsets = group_offsets(self.group_sizes)
        zero = self.beta == 0.0
        return np.array(
            [
                float(np.mean(np.all(zero[:, offsets[g] : offsets[g + 1]], axis=1)))
                for g in range(len(self.group_sizes))
            ]
        )


class ChainRecorder:
    """Preallocated storage that keeps every iteration from ``n_burn`` on."""

    def __init__(
        self,
        method: str,
        group_sizes: Sequence[int],
        n_iter: int,
        n_burn: int,
        param_shapes: Dict[str, Tuple[int, ...]],
        sparse: bool,
    ):
        self.method = method
        self.group_sizes = tuple(group_sizes)
        self.n_iter = n_iter
        self.n_burn = n_burn
        self.sparse = sparse
        n_kept = n_iter - n_burn
        self.beta = np.empty((n_kept, sum(self.group_sizes)))
        self.params = {name: np.empty((n_kept,) + shape) for name, shape in param_shapes.items()}
        self.counts: Counter = Counter()
        self._row = 0

    def record(self, iteration: int, beta: np.ndarray, **params: object) -> None:
        if iteration < self.n_burn:
            return
        row = self._row
        self.beta[row] = beta
        for name, value in params.items():
            self.params[name][row] = value
        if self.sparse:
            self.counts[tuple((beta != 0.0).tolist())] += 1
        self._row += 1

    def finish(self, em: Optional[EmResult] = None) -> ChainDraws:
        return ChainDraws(
            method=self.method,
            beta=self.beta[: self._row],
            group_sizes=self.group_sizes,
            n_iter=self.n_iter,
            n_burn=self.n_burn,
            params={name: values[: self._row] for name, values in self.params.items()},
            model_counts=self.counts,
            sparse=self.sparse,
            em=em,
        )


@dataclass
class PosteriorSummary:
    """Point estimates, intervals and selected models of one chain.

    ``mtm`` is the zero pattern of the marginal medians. ``hppm`` is the
    most visited coefficient pattern and ``group_hppm`` the most visited
    group pattern. All three are ``None`` for models without exact zeros.
    """

    coef_mean: GroupedCoefficients
    coef_median: GroupedCoefficients
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    n_draws: int
    mtm: Optional[SelectionPattern] = None
    hppm: Optional[SelectionPattern] = None
    hppm_frequency: Optional[float] = None
    group_hppm: Optional[SelectionPattern] = None
    group_hppm_frequency: Optional[float] = None


def _most_visited(counts: Counter) -> Tuple[Pattern, int]:
    return max(counts.items(), key=lambda item: item[1])


def summarize(draws: ChainDraws, level: float = CREDIBLE_LEVEL) -> PosteriorSummary:
    """
    Summarise a chain by means, marginal medians and equal-tail intervals.

    Medians include the exact zeros contributed by spike draws, so a
    coefficient that is zero in more than half the draws has median 0.

    Raises:
        EmptyChain: If the chain holds no draws
    """
    if draws.n_draws == 0:
        raise EmptyChain(
            f"No stored draws for {draws.method}",
            "Run more iterations than burn-in",
        )
    sizes = draws.group_sizes
    mean = GroupedCoefficients(draws.beta.mean(axis=0), sizes)
    median = GroupedCoefficients(np.median(draws.beta, axis=0), sizes)
    tail = (1.0 - level) / 2.0
    lower, upper = np.quantile(draws.beta, [tail, 1.0 - tail], axis=0)
    summary = PosteriorSummary(
        coef_mean=mean,
        coef_median=median,
        ci_lower=lower,
        ci_upper=upper,
        n_draws=draws.n_draws,
    )
    if not draws.sparse:
        return summary

    summary.mtm = selection_of(median)
    pattern, count = _most_visited(draws.model_counts)
    summary.hppm = SelectionPattern.from_coefficients(pattern, sizes)
    summary.hppm_frequency = count / draws.n_draws
    group_pattern, group_count = _most_visited(draws.group_model_counts())
    summary.group_hppm = SelectionPattern.from_groups(group_pattern, sizes)
    summary.group_hppm_frequency = group_count / draws.n_draws
    return summary


def autocorrelation(x: np.ndarray) -> np.ndarray:
    """Normalised autocorrelation of a 1-d chain via FFT."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    centred = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    spectrum = np.fft.rfft(centred, size)
    acov = np.fft.irfft(spectrum * np.conjugate(spectrum), size)[:n]
    if acov[0] <= 0:
        return np.zeros(n)
    return acov / acov[0]


def effective_sample_size(chain: np.ndarray) -> np.ndarray:
    """Initial positive sequence ESS for every column of ``chain``.

    Constant columns (for example a coefficient stuck at zero) report the
    full chain length.
    """
    chain = np.asarray(chain, dtype=float)
    if chain.ndim == 1:
        chain = chain[:, None]
    n = chain.shape[0]
    out = np.empty(chain.shape[1])
    for j in range(chain.shape[1]):
        rho = autocorrelation(chain[:, j])
        if n < 4 or rho[0] == 0.0:
            out[j] = float(n)
            continue
        tau = -1.0
        for k in range(0, n - 1, 2):
            pair = rho[k] + rho[k + 1]
            if pair <= 0:
                break
            tau += 2.0 * pair
        out[j] = n / max(tau, 1e-12)
    return np.minimum(out, float(n) * np.log10(max(n, 10)))


def batch_means_se(x: np.ndarray, batches: int = 50) -> float:
    """Monte Carlo standard error of a chain mean by non-overlapping batch means."""
    x = np.asarray(x, dtype=float)
    batches = max(2, min(batches, x.shape[0] // 2))
    size = x.shape[0] // batches
    means = x[: size * batches].reshape(batches, size).mean(axis=1)
    return float(np.std(means, ddof=1) / np.sqrt(batches))


def em_converged(path: Sequence[float], rtol: float = EM_RTOL, window: int = EM_WINDOW) -> bool:
    """True when each of the last ``window`` EM steps moved by less than ``rtol``."""
    if len(path) < window + 1:
        return False
    recent = np.asarray(path[-(window + 1) :], dtype=float)
    change = np.abs(np.diff(recent)) / np.abs(recent[:-1])
    return bool(np.all(change < rtol))
