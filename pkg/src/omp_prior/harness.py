"""Monte Carlo experiment engine: ensembles, sweeps, and bound checks.

Every trial derives its random stream from (ensemble seed, config index,
trial index), so runs are reproducible bit-for-bit regardless of how
trials are scheduled across threads. The worker count is capped by the
OMP_PRIOR_THREADS environment variable (default: machine parallelism).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ConfigInfeasibleError, GuaranteeViolationError, InvalidCountsError
from .greedy import (
    AdversarialOutside,
    EstimateDiagnostics,
    FixedIterations,
    HighestIndex,
    LowestIndex,
    ResidualThreshold,
    TieBreakPolicy,
    exact_recovery_check,
    omp_prior,
    success_check,
    support_estimate_diagnostics,
)
from .ric import exact_ric, sharp_threshold, sufficient_min_magnitude
from .signals import PriorSupport, SparseSignal

EXACT_RECOVERY_TOL = 1e-8

FAMILIES = ("gaussian_normalized", "gaussian_raw", "identity")
TIE_NAMES = ("lowest", "highest", "adversarial")


@dataclass(frozen=True)
class EnsembleSpec:
    """Random matrix family plus dimensions and the master seed."""

    rows: int
    cols: int
    family: str = "gaussian_normalized"
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InvalidCountsError("ensemble dimensions must be >= 1")
        if self.family not in FAMILIES:
            raise InvalidCountsError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.family == "identity" and self.rows != self.cols:
            raise InvalidCountsError("identity family needs rows == cols")


@dataclass(frozen=True)
class UnitMagnitudeRandomSign:
    """Support values are +-1 with random sign."""


@dataclass(frozen=True)
class UniformMagnitude:
    """Support magnitudes uniform in [lo, hi], random sign."""

    lo: float
    hi: float

    def __post_init__(self):
        if not 0 < self.lo <= self.hi:
            raise InvalidCountsError("need 0 < lo <= hi")


SignalModel = Union[UnitMagnitudeRandomSign, UniformMagnitude]


@dataclass(frozen=True)
class TrialConfig:
    """One Monte Carlo condition: sparsity/prior counts, noise, and policy.

    ``tie`` is a name ("lowest", "highest", "adversarial") rather than a
    policy object because the adversarial policy depends on the per-trial
    supports. ``verify_ric`` computes the exact isometry constant of each
    drawn matrix, which gates the theorem-backed assertions.
    """

    k: int
    g: int
    b: int
    noise_epsilon: float = 0.0
    signal_model: SignalModel = field(default_factory=UnitMagnitudeRandomSign)
    trials: int = 100
    tie: str = "lowest"
    verify_ric: bool = False

    def __post_init__(self):
        if self.k < 1 or not 0 <= self.g < self.k or self.b < 0:
            raise InvalidCountsError(f"need k >= 1, 0 <= g < k, b >= 0; got {self}")
        if self.noise_epsilon < 0:
            raise InvalidCountsError("noise epsilon must be >= 0")
        if self.trials < 0:
            raise InvalidCountsError("trial count must be >= 0")
        if self.tie not in TIE_NAMES:
            raise InvalidCountsError(f"tie must be one of {TIE_NAMES}, got {self.tie!r}")


@dataclass(frozen=True)
class TrialRecord:
    """Everything recorded about a single trial."""

    trial_index: int
    support: tuple[int, ...]
    prior: tuple[int, ...]
    exact_delta: float | None
    threshold_satisfied: bool | None
    magnitude_satisfied: bool | None
    success: bool
    exact_recovery: bool
    error_l2: float
    iterations_run: int
    diagnostics: EstimateDiagnostics


@dataclass(frozen=True)
class SweepRow:
    """Aggregate of one config; the first nine fields are the CSV schema."""

    k: int
    g: int
    b: int
    epsilon: float
    trials: int
    threshold_rate: float
    success_rate: float
    exact_rate: float
    mean_err_l2: float
    compliant_trials: int = 0
    conditional_success_rate: float = math.nan
    conditional_exact_rate: float = math.nan


@dataclass(frozen=True)
class BoundCheckReport:
    """Violation counts for the noisy support-recovery guarantees."""

    requested: int
    attempts: int
    compliant: int
    support_violations: int
    error_violations: int
    magnitude_violations: int
    noncompliant_support_failures: int


@dataclass(frozen=True)
class PriorComparisonRow:
    g: int
    b: int
    trials: int
    success_rate: float
    exact_rate: float


def _worker_count() -> int:
    raw = os.environ.get("OMP_PRIOR_THREADS", "").strip()
    if raw:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ConfigInfeasibleError(f"OMP_PRIOR_THREADS={raw!r} is not an integer") from exc
        if cap >= 1:
            return cap
    return os.cpu_count() or 1


def draw_matrix(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.family == "identity":
        return np.eye(spec.rows)
    A = rng.standard_normal((spec.rows, spec.cols))
    if spec.family == "gaussian_normalized":
        A = A / np.linalg.norm(A, axis=0)
    return A


def _draw_supports(config: TrialConfig, n: int, rng: np.random.Generator):
    support = np.sort(rng.choice(n, size=config.k, replace=False))
    true_part = rng.choice(support, size=config.g, replace=False)
    outside = np.setdiff1d(np.arange(n), support)
    wrong_part = rng.choice(outside, size=config.b, replace=False) if config.b else outside[:0]
    prior = np.sort(np.concatenate([true_part, wrong_part]).astype(int))
    return tuple(int(i) for i in support), tuple(int(i) for i in prior)


def _draw_values(model: SignalModel, k: int, rng: np.random.Generator) -> np.ndarray:
    signs = rng.choice([-1.0, 1.0], size=k)
    if isinstance(model, UnitMagnitudeRandomSign):
        return signs
    return signs * rng.uniform(model.lo, model.hi, size=k)


def _draw_noise(epsilon: float, m: int, rng: np.random.Generator, worst_case=None) -> np.ndarray:
    """Uniform direction on the sphere, radius uniform in [0, epsilon].

    ``worst_case`` (a unit vector) overrides the direction with a full
    epsilon radius, for stress tests aligned against a chosen column.
    """
    if epsilon == 0.0:
        return np.zeros(m)
    if worst_case is not None:
        return -epsilon * worst_case
    direction = rng.standard_normal(m)
    direction /= np.linalg.norm(direction)
    return epsilon * rng.uniform() * direction


def _tie_policy(name: str, support, prior) -> TieBreakPolicy:
    if name == "lowest":
        return LowestIndex()
    if name == "highest":
        return HighestIndex()
    return AdversarialOutside(tuple(support), tuple(prior))


def _check_feasible(spec: EnsembleSpec, config: TrialConfig) -> None:
    if config.k > min(spec.rows, spec.cols):
        raise ConfigInfeasibleError(
            f"k={config.k} exceeds min(rows, cols)={min(spec.rows, spec.cols)}"
        )
    if config.b > spec.cols - config.k:
        raise ConfigInfeasibleError(
            f"b={config.b} wrong indices do not fit outside a size-{config.k} "
            f"support in {spec.cols} columns"
        )


def run_trial(spec: EnsembleSpec, config: TrialConfig, config_index: int, trial_index: int) -> TrialRecord:
    """Run one independent trial; fully determined by the three indices."""
    rng = np.random.default_rng([spec.seed, config_index, trial_index])
    A = draw_matrix(spec, rng)
    support, prior_idx = _draw_supports(config, spec.cols, rng)
    values = _draw_values(config.signal_model, config.k, rng)
    truth = SparseSignal(spec.cols, support, tuple(values))
    prior = PriorSupport(prior_idx)
    noise = _draw_noise(config.noise_epsilon, spec.rows, rng)
    y = A @ truth.dense() + noise

    delta = None
    threshold_ok = None
    if config.verify_ric:
        delta = exact_ric(A, config.k + config.b + 1).value
        threshold_ok = delta < sharp_threshold(config.k, config.g, config.b)

    remaining = config.k - config.g
    if config.noise_epsilon == 0.0:
        stop = FixedIterations(remaining)
        magnitude_ok = True
    else:
        stop = ResidualThreshold(config.noise_epsilon)
        magnitude_ok = None
        if threshold_ok:
            floor = sufficient_min_magnitude(delta, config.k, config.g, config.noise_epsilon)
            remainder = [i for i in support if i not in set(prior_idx)]
            magnitude_ok = min(abs(truth.dense()[i]) for i in remainder) > floor

    trace = omp_prior(A, y, prior, stop, _tie_policy(config.tie, support, prior_idx))
    success = success_check(trace, truth, prior)
    exact = exact_recovery_check(trace, truth, EXACT_RECOVERY_TOL)
    diagnostics = support_estimate_diagnostics(trace, truth, prior)

    record = TrialRecord(
        trial_index=trial_index,
        support=support,
        prior=prior_idx,
        exact_delta=delta,
        threshold_satisfied=threshold_ok,
        magnitude_satisfied=magnitude_ok,
        success=success,
        exact_recovery=exact,
        error_l2=diagnostics.error_l2,
        iterations_run=trace.iterations_run,
        diagnostics=diagnostics,
    )
    if config.noise_epsilon == 0.0 and threshold_ok and not (success and exact):
        raise GuaranteeViolationError(_counterexample_dump(record, A, truth, config))
    return record


def _counterexample_dump(record: TrialRecord, A: np.ndarray, truth: SparseSignal, config: TrialConfig) -> str:
    rows = "\n".join(" ".join(f"{v:.17g}" for v in row) for row in A)
    return (
        "noiseless trial below the threshold failed to recover\n"
        f"config: {config}\nrecord: {record}\n"
        f"signal support={truth.support} values={truth.values}\n"
        f"matrix ({A.shape[0]} {A.shape[1]}):\n{rows}"
    )


def run_config_trials(spec: EnsembleSpec, config: TrialConfig, config_index: int = 0) -> list[TrialRecord]:
    """All trial records for one config, ordered by trial index."""
    _check_feasible(spec, config)
    if config.trials == 0:
        return []
    workers = min(_worker_count(), config.trials)
    if workers == 1:
        return [run_trial(spec, config, config_index, t) for t in range(config.trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(run_trial, spec, config, config_index, t) for t in range(config.trials)
        ]
        records = [f.result() for f in futures]
    records.sort(key=lambda r: r.trial_index)
    return records


def _aggregate(config: TrialConfig, records: list[TrialRecord]) -> SweepRow:
    n = len(records)
    if n == 0:
        return SweepRow(config.k, config.g, config.b, config.noise_epsilon, 0,
                        math.nan, math.nan, math.nan, math.nan)
    compliant = [r for r in records if r.threshold_satisfied]
    threshold_rate = len(compliant) / n if config.verify_ric else math.nan
    return SweepRow(
        k=config.k,
        g=config.g,
        b=config.b,
        epsilon=config.noise_epsilon,
        trials=n,
        threshold_rate=threshold_rate,
        success_rate=sum(r.success for r in records) / n,
        exact_rate=sum(r.exact_recovery for r in records) / n,
        mean_err_l2=sum(r.error_l2 for r in records) / n,
        compliant_trials=len(compliant),
        conditional_success_rate=(
            sum(r.success for r in compliant) / len(compliant) if compliant else math.nan
        ),
        conditional_exact_rate=(
            sum(r.exact_recovery for r in compliant) / len(compliant) if compliant else math.nan
        ),
    )


def run_sweep(spec: EnsembleSpec, configs: list[TrialConfig]) -> list[SweepRow]:
    """One aggregated row per config; reproducible from the ensemble seed."""
    return [
        _aggregate(config, run_config_trials(spec, config, index))
        for index, config in enumerate(configs)
    ]


def run_noisy_bound_check(
    spec: EnsembleSpec,
    config: TrialConfig,
    config_index: int = 0,
    floor_scale: float = 1.0,
    max_attempt_factor: int = 50,
) -> BoundCheckReport:
    """Count violations of the noisy support-recovery guarantees.

    Draws trials until ``config.trials`` threshold-compliant ones have
    been collected (matrix RIC below the recovery threshold); each
    compliant trial gets signal magnitudes strictly above the guarantee
    floor times ``floor_scale``, runs with the residual stopping rule at
    the noise level, and is checked against three claims: the remainder
    support comes out in exactly k-g iterations, the l2 error is at most
    eps/sqrt(1-delta), and the estimate magnitudes over wrong-prior /
    true-prior indices sit below / above that same level. With
    floor_scale >= 1 the trials satisfy all hypotheses, so any violation
    is a bug or a counterexample; with floor_scale < 1 failures are
    merely counted.
    """
    if config.noise_epsilon <= 0:
        raise ConfigInfeasibleError("bound check needs noise_epsilon > 0")
    if not config.verify_ric:
        raise ConfigInfeasibleError("bound check needs verify_ric")
    _check_feasible(spec, config)

    eps = config.noise_epsilon
    compliant = 0
    attempts = 0
    support_violations = 0
    error_violations = 0
    magnitude_violations = 0
    noncompliant_failures = 0
    max_attempts = max_attempt_factor * max(config.trials, 1)

    while compliant < config.trials and attempts < max_attempts:
        rng = np.random.default_rng([spec.seed, config_index, attempts])
        attempts += 1
        A = draw_matrix(spec, rng)
        support, prior_idx = _draw_supports(config, spec.cols, rng)
        delta = exact_ric(A, config.k + config.b + 1).value
        if delta >= sharp_threshold(config.k, config.g, config.b):
            continue

        floor = sufficient_min_magnitude(delta, config.k, config.g, eps)
        magnitudes = floor * floor_scale * rng.uniform(1.05, 2.0, size=config.k)
        signs = rng.choice([-1.0, 1.0], size=config.k)
        truth = SparseSignal(spec.cols, support, tuple(signs * magnitudes))
        prior = PriorSupport(prior_idx)
        noise = _draw_noise(eps, spec.rows, rng)
        y = A @ truth.dense() + noise

        trace = omp_prior(A, y, prior, ResidualThreshold(eps),
                          _tie_policy(config.tie, support, prior_idx))
        remainder = set(support) - set(prior_idx)
        recovered = (
            trace.iterations_run == len(remainder)
            and set(trace.selected_indices) == remainder
        )
        compliant += 1
        if floor_scale < 1.0:
            # hypotheses deliberately violated: observe, never assert
            if not recovered:
                noncompliant_failures += 1
            continue

        level = eps / math.sqrt(1.0 - delta)
        diag = support_estimate_diagnostics(trace, truth, prior)
        if not recovered:
            support_violations += 1
        if diag.error_l2 > level:
            error_violations += 1
        if diag.max_wrong_prior > level or not diag.min_true_prior > level:
            magnitude_violations += 1

    return BoundCheckReport(
        requested=config.trials,
        attempts=attempts,
        compliant=compliant,
        support_violations=support_violations,
        error_violations=error_violations,
        magnitude_violations=magnitude_violations,
        noncompliant_support_failures=noncompliant_failures,
    )


def prior_value_comparison(
    spec: EnsembleSpec,
    k: int,
    g_values: list[int],
    b: int,
    trials: int,
) -> list[PriorComparisonRow]:
    """Success rate as the number of known-true prior indices grows.

    The first row is the g = 0, b = 0 standard-pursuit baseline; one row
    follows per requested g at the fixed b. An empty ``g_values`` yields
    an empty table.
    """
    if not g_values:
        return []
    rows = []
    configs = [TrialConfig(k=k, g=0, b=0, trials=trials)]
    configs += [TrialConfig(k=k, g=g, b=b, trials=trials) for g in g_values]
    for index, config in enumerate(configs):
        records = run_config_trials(spec, config, index)
        n = max(len(records), 1)
        rows.append(
            PriorComparisonRow(
                g=config.g,
                b=config.b,
                trials=len(records),
                success_rate=sum(r.success for r in records) / n,
                exact_rate=sum(r.exact_recovery for r in records) / n,
            )
        )
    return rows
