"""Simulation examples, selection and prediction metrics, and replication runners."""

from __future__ import annotations

import dataclasses
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtri

from .api import FitOptions, FitResult, check_method, fit
from .constants import (
    DEFAULT_BOOT_REPS,
    DEFAULT_SEED,
    LEVEL_COEF,
    LEVEL_GROUP,
    METHOD_BGL_SS,
    METHOD_BSGS_SS,
    METHOD_GL,
    METHODS,
    MIN_BOOT_REPS,
    SENSITIVITY_BETA_A,
    SENSITIVITY_PI0,
    SPIKE_SLAB_METHODS,
)
from .core import (
    GroupedCoefficients,
    GroupedDesign,
    SamplerConfig,
    SelectionPattern,
    make_design,
    selection_of,
    standardize,
)
from .exceptions import (
    ConfigurationError,
    DimensionMismatch,
    GroupSpikeError,
    InsufficientReplications,
    UnknownExample,
)
from .logger import logger
from .parallel import run_parallel_with_results
from .rand import RngStream


@dataclass(frozen=True)
class ExampleSpec:
    """Dimensions, true coefficients and covariate recipe of one simulation example."""

    id: int
    n_total: int
    n_train: int
    group_sizes: Tuple[int, ...]
    beta: Tuple[float, ...]
    sigma: float
    covariates: str
    description: str = ""

    @property
    def n_test(self) -> int:
        return self.n_total - self.n_train

    @property
    def p(self) -> int:
        return sum(self.group_sizes)

    @property
    def true_beta(self) -> GroupedCoefficients:
        return GroupedCoefficients(np.array(self.beta), self.group_sizes)

    @property
    def truth(self) -> SelectionPattern:
        return selection_of(self.true_beta)


def _additive_beta() -> Tuple[float, ...]:
    beta = np.zeros(50)
    beta[6:9] = (1.0, 1.0, 1.0)
    beta[15:18] = (2.0 / 3.0, -1.0, 1.0 / 3.0)
    beta[30:32] = (2.0, 1.0)
    return tuple(beta)


EXAMPLES: Dict[int, ExampleSpec] = {
    1: ExampleSpec(
        id=1,
        n_total=100,
        n_train=60,
        group_sizes=(5, 5, 5, 5),
        beta=(0.3, -1.0, 0.0, 0.5, 0.01) + (0.0,) * 5 + (0.8,) * 5 + (0.0,) * 5,
        sigma=3.0,
        covariates="compound",
        description="4 groups of 5, pairwise correlation 0.5",
    ),
    2: ExampleSpec(
        id=2,
        n_total=60,
        n_train=40,
        group_sizes=(5,) * 16,
        beta=(1.0, 2.0, 3.0, 4.0, 5.0) + (0.0,) * 5 + (0.1, 0.2, 0.3, 0.4, 0.5) + (0.0,) * 65,
        sigma=2.0,
        covariates="shared-factor",
        description="p > n, 16 groups of 5 sharing a group factor",
    ),
    3: ExampleSpec(
        id=3,
        n_total=100,
        n_train=60,
        group_sizes=(10, 10, 10, 10),
        beta=(0.0,) * 10 + (2.0,) * 10 + (0.0,) * 10 + (2.0,) * 10,
        sigma=2.0,
        covariates="shared-factor",
        description="4 groups of 10, two dense groups",
    ),
    4: ExampleSpec(
        id=4,
        n_total=100,
        n_train=60,
        group_sizes=(10, 10, 10, 10),
        beta=(0.0,) * 10 + (2.0,) * 5 + (0.0,) * 15 + (2.0,) * 5 + (0.0,) * 5,
        sigma=2.0,
        covariates="shared-factor",
        description="4 groups of 10, sparsity inside the nonzero groups",
    ),
    5: ExampleSpec(
        id=5,
        n_total=200,
        n_train=100,
        group_sizes=(3,) * 10 + (2,) * 10,
        beta=_additive_beta(),
        sigma=2.0,
        covariates="additive",
        description="10 cubic factors and 10 three-level factors",
    ),
}


def example_spec(example_id: int) -> ExampleSpec:
    """
    Look up a simulation example.

    Raises:
        UnknownExample: If ``example_id`` is not 1 to 5
    """
    try:
        return EXAMPLES[int(example_id)]
    except (KeyError, ValueError):
        raise UnknownExample(
            f"Unknown example {example_id}",
            f"Choose one of: {', '.join(str(k) for k in EXAMPLES)}",
        ) from None


def compound_symmetric(n: int, p: int, rho: float, rng: RngStream) -> np.ndarray:
    """Rows N(0, (1 − ρ)I + ρ11ᵀ) through one shared factor."""
    shared = np.asarray(rng.standard_normal((n, 1)))
    own = np.asarray(rng.standard_normal((n, p)))
    return math.sqrt(rho) * shared + math.sqrt(1.0 - rho) * own


def shared_factor(n: int, group_sizes: Sequence[int], rng: RngStream) -> np.ndarray:
    """X_gj = z_g + z_gj, so correlation is ½ within groups and 0 across."""
    sizes = tuple(group_sizes)
    factors = np.asarray(rng.standard_normal((n, len(sizes))))
    own = np.asarray(rng.standard_normal((n, sum(sizes))))
    return np.repeat(factors, sizes, axis=1) + own


def additive_expansion(n: int, rng: RngStream) -> np.ndarray:
    """Cubic expansions of 10 factors and two dummies for each of 10 three-level factors.

    Factors are X_i = (Z_i + W)/√2. A three-level factor is 0 below Φ⁻¹(1/3),
    1 above Φ⁻¹(2/3) and 2 in between; level 2 is the baseline.
    """
    z = np.asarray(rng.standard_normal((n, 20)))
    w = np.asarray(rng.standard_normal((n, 1)))
    factors = (z + w) / math.sqrt(2.0)
    low, high = ndtri(1.0 / 3.0), ndtri(2.0 / 3.0)
    columns = []
    for i in range(10):
        x = factors[:, i]
        columns.extend([x, x**2, x**3])
    for i in range(10, 20):
        x = factors[:, i]
        level = np.where(x < low, 0, np.where(x > high, 1, 2))
        columns.extend([(level == 0).astype(float), (level == 1).astype(float)])
    return np.column_stack(columns)


def simulate_covariates(spec: ExampleSpec, n: int, rng: RngStream) -> np.ndarray:
    if spec.covariates == "compound":
        return compound_symmetric(n, spec.p, 0.5, rng)
    if spec.covariates == "shared-factor":
        return shared_factor(n, spec.group_sizes, rng)
    if spec.covariates == "additive":
        return additive_expansion(n, rng)
    raise ConfigurationError(f"Unknown covariate recipe {spec.covariates}")


class SimulatedData(NamedTuple):
    """One draw of an example, split into training and test designs."""

    train: GroupedDesign
    test: GroupedDesign
    beta: GroupedCoefficients
    sigma: float


def generate_example(
    example_id: int, rng: RngStream, sigma: Optional[float] = None
) -> SimulatedData:
    """
    Draw covariates and responses for one example and split them at random.

    Args:
        example_id: Example number 1 to 5
        rng: Random stream owned by this replication
        sigma: Noise standard deviation overriding the example's own

    Raises:
        UnknownExample: If ``example_id`` is not 1 to 5
    """
    spec = example_spec(example_id)
    sigma = spec.sigma if sigma is None else float(sigma)
    beta = spec.true_beta
    x = simulate_covariates(spec, spec.n_total, rng)
    y = x @ beta.values + sigma * np.asarray(rng.standard_normal(spec.n_total))
    order = rng.permutation(spec.n_total)
    train, test = order[: spec.n_train], order[spec.n_train :]
    return SimulatedData(
        train=make_design(y[train], x[train], spec.group_sizes),
        test=make_design(y[test], x[test], spec.group_sizes),
        beta=beta,
        sigma=sigma,
    )


def tpr_fpr(
    selected: SelectionPattern, truth: SelectionPattern, level: str = LEVEL_COEF
) -> Tuple[Optional[float], Optional[float]]:
    """
    True and false positive rates of a selection against the truth.

    Returns ``None`` in place of a rate whose denominator is zero.

    Raises:
        DimensionMismatch: If the two patterns have different group structures
    """
    if selected.group_sizes != truth.group_sizes:
        raise DimensionMismatch("Selected and true patterns have different group structures")
    chosen = np.array(selected.flags(level))
    actual = np.array(truth.flags(level))
    positives = int(actual.sum())
    negatives = int((~actual).sum())
    tpr = float((chosen & actual).sum()) / positives if positives else None
    fpr = float((chosen & ~actual).sum()) / negatives if negatives else None
    return tpr, fpr


def misclassification(selected: SelectionPattern, truth: SelectionPattern) -> float:
    """Fraction of coefficients whose inclusion flag disagrees with the truth."""
    chosen = np.array(selected.coef_included)
    actual = np.array(truth.coef_included)
    if chosen.shape != actual.shape:
        raise DimensionMismatch("Selected and true patterns have different lengths")
    return float(np.mean(chosen != actual))


def median_mse(
    values: Sequence[float], boot_reps: int = DEFAULT_BOOT_REPS, rng: Optional[RngStream] = None
) -> Tuple[float, float]:
    """
    Median of per-replication test errors and its bootstrap standard error.

    Values are sorted before resampling so the result does not depend on
    replication order.

    Raises:
        InsufficientReplications: With fewer than two values
        ConfigurationError: If ``boot_reps`` is below the minimum
    """
    data = np.sort(np.asarray(values, dtype=float))
    if data.shape[0] < 2:
        raise InsufficientReplications(
            f"Bootstrap needs at least 2 replications, got {data.shape[0]}",
            "Run more replications with --reps",
        )
    if boot_reps < MIN_BOOT_REPS:
        raise ConfigurationError(f"boot_reps must be at least {MIN_BOOT_REPS}, got {boot_reps}")
    rng = rng if rng is not None else RngStream(DEFAULT_SEED)
    index = rng.generator.integers(0, data.shape[0], size=(boot_reps, data.shape[0]))
    medians = np.median(data[index], axis=1)
    return float(np.median(data)), float(np.std(medians, ddof=1))


@dataclass
class MethodOutcome:
    """Per-replication record of one method, kept for audit."""

    example: int
    method: str
    replication: int
    rates: Dict[str, Dict[str, Optional[float]]] = field(default_factory=dict)
    mse: Dict[str, float] = field(default_factory=dict)
    misclassification: Dict[str, float] = field(default_factory=dict)
    elapsed: float = 0.0


@dataclass
class FailureRecord:
    example: int
    method: str
    replication: int
    error: str
    message: str


def _selections(result: FitResult) -> Dict[str, SelectionPattern]:
    """Selected models by selector name: mtm/hppm for spike-and-slab, support otherwise."""
    if result.method in SPIKE_SLAB_METHODS and result.summary is not None:
        picks: Dict[str, SelectionPattern] = {}
        if result.summary.mtm is not None:
            picks["mtm"] = result.summary.mtm
        if result.summary.hppm is not None:
            picks["hppm"] = result.summary.hppm
        return picks
    if result.summary is None and result.selection is not None:
        return {"support": result.selection}
    return {}


def _estimates(result: FitResult) -> Dict[str, np.ndarray]:
    if result.summary is not None:
        return {
            "mean": np.asarray(result.summary.coef_mean.values),
            "median": np.asarray(result.summary.coef_median.values),
        }
    return {"fit": np.asarray(result.coefficients.values)}


def evaluate(
    result: FitResult,
    data: SimulatedData,
    predict: Callable[[np.ndarray], np.ndarray],
    example: int,
    replication: int,
) -> MethodOutcome:
    """Score one fit: rates and misclassification per selector, test MSE per estimator."""
    truth = selection_of(data.beta)
    outcome = MethodOutcome(
        example=example, method=result.method, replication=replication, elapsed=result.elapsed
    )
    for name, pattern in _selections(result).items():
        tpr, fpr = tpr_fpr(pattern, truth, LEVEL_COEF)
        group_tpr, group_fpr = tpr_fpr(pattern, truth, LEVEL_GROUP)
        outcome.rates[name] = {
            "tpr": tpr,
            "fpr": fpr,
            "group_tpr": group_tpr,
            "group_fpr": group_fpr,
        }
        outcome.misclassification[name] = misclassification(pattern, truth)
    for name, beta in _estimates(result).items():
        outcome.mse[name] = float(np.mean((data.test.y - predict(beta)) ** 2))
    return outcome


def run_replication(
    example_id: int,
    replication: int,
    methods: Sequence[str],
    config: SamplerConfig,
    master_seed: int,
    options: Optional[FitOptions] = None,
) -> Tuple[List[MethodOutcome], List[FailureRecord]]:
    """
    Fit every method to one fresh dataset.

    The dataset depends only on (example, master seed, replication) and each
    method draws from its own stream below that, so any replication can be
    rebuilt on its own.
    """
    root = RngStream(master_seed, example_id, replication)
    data = generate_example(example_id, root.child(0))
    train, scaler = standardize(data.train)

    def predict(beta: np.ndarray) -> np.ndarray:
        return scaler.predict(data.test.x, beta)

    outcomes: List[MethodOutcome] = []
    failures: List[FailureRecord] = []
    for method in methods:
        method_rng = root.child(1 + METHODS.index(method))
        try:
            result = fit(train, method, config, method_rng, options)
            outcomes.append(evaluate(result, data, predict, example_id, replication))
        except GroupSpikeError as e:
            logger.warning(f"Example {example_id} rep {replication}: {method} failed: {e.message}")
            failures.append(
                FailureRecord(example_id, method, replication, type(e).__name__, e.message)
            )
    return outcomes, failures


@dataclass
class BenchmarkRow:
    """Aggregates for one (example, method) pair."""

    example: int
    method: str
    n_reps: int
    n_failed: int
    rates: Dict[str, Dict[str, Optional[float]]] = field(default_factory=dict)
    mse: Dict[str, Dict[str, Optional[float]]] = field(default_factory=dict)


@dataclass
class BenchmarkReport:
    """Selection and prediction tables plus every replication-level record."""

    examples: List[int]
    methods: List[str]
    n_reps: int
    seed: int
    level: str
    config: Dict[str, object]
    rows: List[BenchmarkRow] = field(default_factory=list)
    outcomes: List[MethodOutcome] = field(default_factory=list)
    failures: List[FailureRecord] = field(default_factory=list)

    def row(self, example: int, method: str) -> BenchmarkRow:
        for row in self.rows:
            if row.example == example and row.method == method:
                return row
        raise KeyError((example, method))


def _mean_defined(values: Iterable[Optional[float]]) -> Optional[float]:
    kept = [v for v in values if v is not None]
    return float(np.mean(kept)) if kept else None


def aggregate(
    outcomes: Sequence[MethodOutcome],
    failures: Sequence[FailureRecord],
    example: int,
    method: str,
    seed: int,
    boot_reps: int = DEFAULT_BOOT_REPS,
) -> BenchmarkRow:
    """Average rates and bootstrap the median MSE for one (example, method)."""
    mine = sorted(
        (o for o in outcomes if o.example == example and o.method == method),
        key=lambda o: o.replication,
    )
    failed = sum(1 for f in failures if f.example == example and f.method == method)
    row = BenchmarkRow(example=example, method=method, n_reps=len(mine), n_failed=failed)

    rate_values: Dict[str, Dict[str, List[Optional[float]]]] = defaultdict(
        lambda: defaultdict(list)
    )
    mse_values: Dict[str, List[float]] = defaultdict(list)
    for outcome in mine:
        for selector, rates in outcome.rates.items():
            for key, value in rates.items():
                rate_values[selector][key].append(value)
        for estimator, value in outcome.mse.items():
            mse_values[estimator].append(value)

    for selector, by_key in rate_values.items():
        row.rates[selector] = {key: _mean_defined(vals) for key, vals in by_key.items()}
    for k, (estimator, values) in enumerate(sorted(mse_values.items())):
        if len(values) >= 2:
            stream = RngStream(seed, example, 1000 + METHODS.index(method), k)
            median, se = median_mse(values, boot_reps, stream)
            row.mse[estimator] = {"median": median, "se": se}
        else:
            row.mse[estimator] = {"median": float(np.median(values)), "se": None}
    return row


def run_benchmark(
    examples: Sequence[int],
    methods: Sequence[str],
    n_reps: int,
    config: Optional[SamplerConfig] = None,
    seed: int = DEFAULT_SEED,
    jobs: int = 1,
    level: str = LEVEL_COEF,
    boot_reps: int = DEFAULT_BOOT_REPS,
    options: Optional[FitOptions] = None,
    on_done: Optional[Callable[[], None]] = None,
) -> BenchmarkReport:
    """
    Replicate every example ``n_reps`` times and fit every method each time.

    Failures are recorded per (method, replication) and do not stop the run.

    Args:
        examples: Example numbers
        methods: Method names
        n_reps: Replications per example
        config: Sampler settings
        seed: Master seed
        jobs: Concurrent replications
        level: Primary selection level for tables, ``coef`` or ``group``
        boot_reps: Bootstrap resamples for the median SE
        options: Options passed to every fit
        on_done: Called after each finished replication

    Raises:
        InsufficientReplications: If ``n_reps`` < 1
    """
    if n_reps < 1:
        raise InsufficientReplications(
            f"Benchmark needs at least one replication, got {n_reps}", "Use --reps 1 or more"
        )
    if level not in (LEVEL_COEF, LEVEL_GROUP):
        raise ConfigurationError(f"Unknown selection level: {level}", "Use 'group' or 'coef'")
    methods = [check_method(m) for m in methods]
    examples = [example_spec(e).id for e in examples]
    config = config or SamplerConfig()
    options = options or FitOptions()

    tasks = [(e, r) for e in examples for r in range(n_reps)]
    results = run_parallel_with_results(
        lambda task: run_replication(task[0], task[1], methods, config, seed, options),
        tasks,
        max_workers=max(1, jobs),
        on_done=on_done,
    )

    outcomes: List[MethodOutcome] = []
    failures: List[FailureRecord] = []
    for (example, rep), result in results:
        if isinstance(result, Exception):
            logger.error(f"Example {example} rep {rep} failed before fitting: {result}")
            message = getattr(result, "message", str(result))
            failures.extend(
                FailureRecord(example, m, rep, type(result).__name__, message) for m in methods
            )
            continue
        outcomes.extend(result[0])
        failures.extend(result[1])

    report = BenchmarkReport(
        examples=list(examples),
        methods=list(methods),
        n_reps=n_reps,
        seed=seed,
        level=level,
        config=config.to_dict(),
        outcomes=outcomes,
        failures=failures,
    )
    for example in examples:
        for method in methods:
            report.rows.append(aggregate(outcomes, failures, example, method, seed, boot_reps))
    return report


@dataclass
class SensitivityRow:
    """Mean misclassification of one prior setting for π₀."""

    setting: str
    mtm: Optional[float]
    hppm: Optional[float]
    n_reps: int
    n_failed: int = 0


@dataclass
class SensitivityReport:
    rows: List[SensitivityRow]
    reference: Optional[float]
    n_reps: int
    seed: int
    config: Dict[str, object] = field(default_factory=dict)
    failures: List[FailureRecord] = field(default_factory=list)


def sensitivity_settings(
    pi0_values: Sequence[float] = SENSITIVITY_PI0, beta_a: Sequence[float] = SENSITIVITY_BETA_A
) -> List[Tuple[str, Dict[str, float]]]:
    """Labelled BGL-SS hyperparameter overrides: fixed π₀ values, then Beta(a, a) priors."""
    settings: List[Tuple[str, Dict[str, float]]] = []
    settings.extend((f"pi0={v:.2f}", {"pi0": v}) for v in pi0_values)
    settings.extend((f"a=b={a:.2f}", {"a": a, "b": a}) for a in beta_a)
    return settings


def _sensitivity_rep(
    replication: int,
    settings: Sequence[Tuple[str, Dict[str, float]]],
    config: SamplerConfig,
    seed: int,
    options: FitOptions,
) -> Tuple[Dict[str, Tuple[float, float]], Optional[float], List[FailureRecord]]:
    root = RngStream(seed, 1, replication)
    data = generate_example(1, root.child(0))
    train, _ = standardize(data.train)
    truth = selection_of(data.beta)
    scores: Dict[str, Tuple[float, float]] = {}
    failures: List[FailureRecord] = []
    for k, (label, override) in enumerate(settings):
        hyper = dataclasses.replace(config.bgl_ss, **override)
        try:
            result = fit(train, METHOD_BGL_SS, config.replace(bgl_ss=hyper), root.child(10 + k))
        except GroupSpikeError as e:
            logger.warning(f"Sensitivity rep {replication} [{label}] failed: {e.message}")
            method = f"{METHOD_BGL_SS}[{label}]"
            failures.append(FailureRecord(1, method, replication, type(e).__name__, e.message))
            continue
        summary = result.summary
        assert summary is not None and summary.mtm is not None and summary.hppm is not None
        scores[label] = (
            misclassification(summary.mtm, truth),
            misclassification(summary.hppm, truth),
        )
    reference: Optional[float] = None
    try:
        gl = fit(train, METHOD_GL, config, root.child(1 + METHODS.index(METHOD_GL)), options)
        reference = misclassification(selection_of(gl.coefficients), truth)
    except GroupSpikeError as e:
        logger.warning(f"Sensitivity rep {replication}: group lasso reference failed: {e.message}")
    return scores, reference, failures


def run_sensitivity(
    n_reps: int,
    config: Optional[SamplerConfig] = None,
    seed: int = DEFAULT_SEED,
    pi0_values: Sequence[float] = SENSITIVITY_PI0,
    beta_a: Sequence[float] = SENSITIVITY_BETA_A,
    jobs: int = 1,
    options: Optional[FitOptions] = None,
    on_done: Optional[Callable[[], None]] = None,
) -> SensitivityReport:
    """
    Misclassification of BGL-SS selections on Example 1 under several π₀ priors.

    Each replication fits every setting to the same dataset; a cross-validated
    group lasso on that dataset gives the reference row.
    """
    if n_reps < 1:
        raise InsufficientReplications(
            f"Sensitivity analysis needs at least one replication, got {n_reps}"
        )
    config = config or SamplerConfig()
    options = options or FitOptions()
    settings = sensitivity_settings(pi0_values, beta_a)
    results = run_parallel_with_results(
        lambda rep: _sensitivity_rep(rep, settings, config, seed, options),
        range(n_reps),
        max_workers=max(1, jobs),
        on_done=on_done,
    )
    per_setting: Dict[str, List[Tuple[float, float]]] = defaultdict(list)
    references: List[Optional[float]] = []
    failures: List[FailureRecord] = []
    failed: Dict[str, int] = defaultdict(int)
    for rep, result in results:
        if isinstance(result, Exception):
            logger.warning(f"Sensitivity rep {rep} failed: {result}")
            message = getattr(result, "message", str(result))
            for label, _ in settings:
                failed[label] += 1
                failures.append(
                    FailureRecord(
                        1, f"{METHOD_BGL_SS}[{label}]", rep, type(result).__name__, message
                    )
                )
            continue
        scores, reference, rep_failures = result
        for label, pair in scores.items():
            per_setting[label].append(pair)
        for label, _ in settings:
            if label not in scores:
                failed[label] += 1
        failures.extend(rep_failures)
        references.append(reference)
    rows = [
        SensitivityRow(
            setting=label,
            mtm=_mean_defined(p[0] for p in per_setting[label]),
            hppm=_mean_defined(p[1] for p in per_setting[label]),
            n_reps=len(per_setting[label]),
            n_failed=failed[label],
        )
        for label, _ in settings
    ]
    return SensitivityReport(
        rows=rows,
        reference=_mean_defined(references),
        n_reps=n_reps,
        seed=seed,
        config=config.to_dict(),
        failures=failures,
    )


@dataclass
class CoefficientTable:
    """True coefficients next to posterior medians and means, per noise level and model."""

    true_beta: List[float]
    columns: List[Tuple[float, str, str]]
    values: Dict[Tuple[float, str, str], List[float]]
    seed: int = DEFAULT_SEED
    config: Dict[str, object] = field(default_factory=dict)

    def as_rows(self) -> List[Dict[str, float]]:
        rows = []
        for j, truth in enumerate(self.true_beta):
            row: Dict[str, float] = {"index": j, "true": truth}
            for sigma, method, kind in self.columns:
                row[f"sigma{sigma:g}_{method}_{kind}"] = self.values[(sigma, method, kind)][j]
            rows.append(row)
        return rows


def coefficient_table(
    sigmas: Sequence[float] = (3.0, 1.0),
    config: Optional[SamplerConfig] = None,
    seed: int = DEFAULT_SEED,
) -> CoefficientTable:
    """Fit BGL-SS and BSGS-SS to one Example 1 dataset per noise level.

    Estimates are mapped back to the original covariate scale.
    """
    config = config or SamplerConfig()
    spec = example_spec(1)
    columns: List[Tuple[float, str, str]] = []
    values: Dict[Tuple[float, str, str], List[float]] = {}
    for k, sigma in enumerate(sigmas):
        root = RngStream(seed, 1, 10_000 + k)
        data = generate_example(1, root.child(0), sigma=sigma)
        train, scaler = standardize(data.train)
        for method in (METHOD_BGL_SS, METHOD_BSGS_SS):
            result = fit(train, method, config, root.child(1 + METHODS.index(method)))
            for kind in ("median", "mean"):
                key = (float(sigma), method, kind)
                columns.append(key)
                values[key] = scaler.unscale(result.estimate(kind).values).tolist()
    return CoefficientTable(
        true_beta=list(spec.beta),
        columns=columns,
        values=values,
        seed=seed,
        config=config.to_dict(),
    )
