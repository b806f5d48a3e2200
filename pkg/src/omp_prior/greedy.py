"""Orthogonal matching pursuit seeded with a partial support estimate.

The solver starts from the prior index set instead of the empty set: the
initial residual is the measurement projected off the prior columns, and
each iteration adds the not-yet-selected column most correlated with the
current residual, then re-solves least squares over everything selected so
far. With an empty prior this is exactly standard OMP.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyDictionaryError,
    PreconditionViolatedError,
)
from .linalg import as_matrix, as_vector, least_squares
from .signals import PriorSupport, SparseSignal, _as_index_tuple

# Two correlation magnitudes are considered tied when they differ by at
# most this much; the adversarial constructions produce exact ties that
# floating point perturbs at ~1e-16.
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FixedIterations:
    """Run exactly this many selection steps."""

    count: int

    def __post_init__(self):
        if self.count < 0:
            raise PreconditionViolatedError("iteration count must be >= 0")


@dataclass(frozen=True)
class ResidualThreshold:
    """Stop as soon as the residual 2-norm drops to ``epsilon`` or below.

    A hard cap of min(rows, cols) - |prior| iterations guarantees
    termination on inputs where the threshold is never reached.
    """

    epsilon: float

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise PreconditionViolatedError("epsilon must be finite and >= 0")


StoppingRule = Union[FixedIterations, ResidualThreshold]


@dataclass(frozen=True)
class LowestIndex:
    """Break correlation ties toward the smallest column index (default)."""


@dataclass(frozen=True)
class HighestIndex:
    """Break correlation ties toward the largest column index."""


@dataclass(frozen=True)
class AdversarialOutside:
    """Break ties toward a column outside both the true and prior supports.

    Exists to realize the failure mode of the threshold-attaining
    instances; falls back to the lowest tied index when no tied candidate
    lies outside.
    """

    true_support: tuple[int, ...]
    prior_support: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "true_support", _as_index_tuple(self.true_support))
        object.__setattr__(self, "prior_support", _as_index_tuple(self.prior_support))


TieBreakPolicy = Union[LowestIndex, HighestIndex, AdversarialOutside]


@dataclass(frozen=True)
class RecoveryTrace:
    """Full record of one solver run.

    ``selected_indices`` is the growth of the support beyond the prior, in
    selection order. ``residual_norms`` starts with the iteration-0 norm,
    so it has one more entry than ``selected_indices``. ``final_estimate``
    is dense over the whole dimension with exact zeros outside the final
    support.
    """

    dimension: int
    prior_indices: tuple[int, ...]
    selected_indices: tuple[int, ...]
    residual_norms: tuple[float, ...]
    tie_encountered: tuple[bool, ...]
    final_estimate: np.ndarray

    def __post_init__(self):
        self.final_estimate.setflags(write=False)

    @property
    def iterations_run(self) -> int:
        return len(self.selected_indices)

    @property
    def final_support(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.prior_indices) | set(self.selected_indices)))


@dataclass(frozen=True)
class EstimateDiagnostics:
    """Magnitude/error summary of an estimate against the truth.

    ``min_true_prior`` is min |x_hat_i| over prior indices that are truly
    in the support (+inf when that set is empty), ``max_wrong_prior`` is
    max |x_hat_i| over prior indices outside the support (0 when empty),
    and ``error_l2`` is ||x - x_hat||_2.
    """

    min_true_prior: float
    max_wrong_prior: float
    error_l2: float


def _pick_tied(tied: list[int], tie: TieBreakPolicy) -> int:
    if isinstance(tie, LowestIndex):
        return tied[0]
    if isinstance(tie, HighestIndex):
        return tied[-1]
    if isinstance(tie, AdversarialOutside):
        joint = set(tie.true_support) | set(tie.prior_support)
        outside = [i for i in tied if i not in joint]
        return outside[0] if outside else tied[0]
    raise TypeError(f"unknown tie-break policy: {tie!r}")


def omp_prior(
    A,
    y,
    prior: PriorSupport | None = None,
    stop: StoppingRule = ResidualThreshold(0.0),
    tie: TieBreakPolicy = LowestIndex(),
) -> RecoveryTrace:
    """Run the prior-seeded pursuit and return its full trace.

    Parameters
    ----------
    A : (m, n) array, the sensing matrix.
    y : (m,) array, the measurements.
    prior : PriorSupport or None, indices selected before iteration 1.
    stop : FixedIterations or ResidualThreshold.
    tie : tie-break policy for near-equal correlation maxima.

    Raises RankDeficientError when the selected columns (including the
    prior) lose full column rank, EmptyDictionaryError for a matrix with
    no columns.
    """
    A = as_matrix(A)
    y = as_vector(y)
    m, n = A.shape
    if n == 0:
        raise EmptyDictionaryError("sensing matrix has no columns")
    if y.shape[0] != m:
        raise DimensionMismatchError(f"y has length {y.shape[0]}, matrix has {m} rows")
    prior = prior or PriorSupport()
    if prior.indices and prior.indices[-1] >= n:
        raise PreconditionViolatedError("prior index out of range")

    active = list(prior.indices)
    coef = least_squares(A[:, active], y)
    residual = y - A[:, active] @ coef if active else y.copy()
    norms = [float(np.linalg.norm(residual))]
    selected: list[int] = []
    ties: list[bool] = []
    candidates = sorted(set(range(n)) - set(active))

    if isinstance(stop, FixedIterations):
        max_steps = stop.count
    else:
        max_steps = max(min(m, n) - len(active), 0)

    while len(selected) < max_steps and candidates:
        if isinstance(stop, ResidualThreshold) and norms[-1] <= stop.epsilon:
            break
        corr = np.abs(A[:, candidates].T @ residual)
        best = float(np.max(corr))
        tied = [c for c, v in zip(candidates, corr) if best - v <= TIE_TOLERANCE]
        ties.append(len(tied) > 1)
        j = _pick_tied(tied, tie)
        active.append(j)
        candidates.remove(j)
        coef = least_squares(A[:, active], y)
        residual = y - A[:, active] @ coef
        norms.append(float(np.linalg.norm(residual)))
        selected.append(j)

    estimate = np.zeros(n)
    if active:
        estimate[active] = coef
    return RecoveryTrace(
        dimension=n,
        prior_indices=prior.indices,
        selected_indices=tuple(selected),
        residual_norms=tuple(norms),
        tie_encountered=tuple(ties),
        final_estimate=estimate,
    )


def success_check(trace: RecoveryTrace, truth: SparseSignal, prior: PriorSupport) -> bool:
    """True iff the first k-g selections all land in the remainder support.

    k is the truth's sparsity and g the number of prior indices inside the
    true support; the run must have made at least k-g selections.
    """
    if trace.dimension != truth.dimension:
        raise DimensionMismatchError("trace and truth dimensions differ")
    true_set = set(truth.support)
    remainder = true_set - set(prior.indices)
    needed = len(remainder)
    if trace.iterations_run < needed:
        return False
    return all(j in remainder for j in trace.selected_indices[:needed])


def exact_recovery_check(trace: RecoveryTrace, truth: SparseSignal, tol: float) -> bool:
    """True iff the dense estimate matches the dense truth within max-norm tol."""
    if tol <= 0:
        raise PreconditionViolatedError("tolerance must be positive")
    if trace.dimension != truth.dimension:
        raise DimensionMismatchError("trace and truth dimensions differ")
    return bool(np.max(np.abs(trace.final_estimate - truth.dense())) <= tol)


def support_estimate_diagnostics(
    trace: RecoveryTrace, truth: SparseSignal, prior: PriorSupport
) -> EstimateDiagnostics:
    """Magnitude bounds of the estimate over the prior, plus the l2 error."""
    if trace.dimension != truth.dimension:
        raise DimensionMismatchError("trace and truth dimensions differ")
    true_set = set(truth.support)
    est = trace.final_estimate
    true_prior = [i for i in prior.indices if i in true_set]
    wrong_prior = [i for i in prior.indices if i not in true_set]
    min_true = min((abs(est[i]) for i in true_prior), default=np.inf)
    max_wrong = max((abs(est[i]) for i in wrong_prior), default=0.0)
    err = float(np.linalg.norm(truth.dense() - est))
    return EstimateDiagnostics(float(min_true), float(max_wrong), err)
