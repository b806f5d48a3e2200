"""Exact restricted isometry constants and the recovery-condition formulas.

The RIC of order s is computed exactly by enumerating every column subset
of that size and taking the worst Gram eigenvalue deviation from 1. That
is only viable at desk scale, so enumeration is guarded by a subset
budget and fails loudly beyond it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BudgetExceededError,
    EigenFailureError,
    InvalidCountsError,
    PreconditionViolatedError,
    ThresholdViolatedError,
)
from .linalg import as_matrix, least_squares
from .signals import PriorSupport, SparseSignal

DEFAULT_SUBSET_BUDGET = 10_000_000
_CHUNK = 16_384


@dataclass(frozen=True)
class RicReport:
    """Exact RIC of one order, with the subset attaining it.

    ``rip_holds`` is False when the value is >= 1, i.e. the matrix has no
    valid isometry certificate at this order; such values are reported
    rather than rejected because the computation doubles as a diagnostic
    on non-compliant matrices.
    """

    order: int
    value: float
    witness_subset: tuple[int, ...]
    subsets_evaluated: int

    @property
    def rip_holds(self) -> bool:
        return self.value < 1.0


@dataclass(frozen=True)
class CorrelationGapReport:
    """In-support vs out-of-support correlation maxima at one iteration.

    ``alpha1`` is the largest correlation magnitude between the noiseless
    residual and the still-missing true columns, ``beta1`` the largest
    over columns outside both supports, and ``lower_bound`` the guaranteed
    floor on their difference given the supplied isometry constant.
    """

    alpha1: float
    beta1: float
    lower_bound: float
    z_norm: float


def exact_ric(A, order: int, budget: int = DEFAULT_SUBSET_BUDGET) -> RicReport:
    """Exhaustive RIC of the given order over all column subsets.

    Raises BudgetExceededError (carrying the required count) when
    C(cols, order) exceeds ``budget``.
    """
    A = as_matrix(A)
    n = A.shape[1]
    if not 1 <= order <= n:
        raise InvalidCountsError(f"order must be in [1, {n}], got {order}")
    total = math.comb(n, order)
    if total > budget:
        raise BudgetExceededError(required=total, budget=budget)

    gram = A.T @ A
    best = -np.inf
    witness: tuple[int, ...] = ()
    combos = itertools.combinations(range(n), order)
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            break
        idx = np.array(chunk, dtype=np.intp)
        sub = gram[idx[:, :, None], idx[:, None, :]]
        try:
            eigs = np.linalg.eigvalsh(sub)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise EigenFailureError(str(exc)) from exc
        dev = np.maximum(eigs[:, -1] - 1.0, 1.0 - eigs[:, 0])
        i = int(np.argmax(dev))
        if dev[i] > best:
            best = float(dev[i])
            witness = tuple(int(j) for j in idx[i])
    return RicReport(order=order, value=best, witness_subset=witness, subsets_evaluated=total)


def sharp_threshold(k: int, g: int, b: int) -> float:
    """The RIC level 1/sqrt(k-g+1) below which recovery is guaranteed.

    The threshold depends on b only through the order k+b+1 of the RIC it
    is compared against; b is validated here so callers cannot build a
    nonsensical condition.
    """
    _check_counts(k, g, b)
    return 1.0 / math.sqrt(k - g + 1)


def sufficient_min_magnitude(delta: float, k: int, g: int, epsilon: float) -> float:
    """Magnitude floor on the remainder entries that guarantees recovery.

    max of sqrt(2(1+delta))*eps / (1 - sqrt(k-g+1)*delta) and
    2*eps / sqrt(1-delta); zero noise imposes no floor.
    """
    _check_bound_inputs(delta, k, g, epsilon)
    gap = 1.0 - math.sqrt(k - g + 1) * delta
    return max(
        math.sqrt(2.0 * (1.0 + delta)) * epsilon / gap,
        2.0 * epsilon / math.sqrt(1.0 - delta),
    )


def necessary_min_magnitude(delta: float, k: int, g: int, epsilon: float) -> float:
    """Magnitude floor below which recovery can provably fail.

    sqrt(1-delta)*eps / (1 - sqrt(k-g+1)*delta).
    """
    _check_bound_inputs(delta, k, g, epsilon)
    gap = 1.0 - math.sqrt(k - g + 1) * delta
    return math.sqrt(1.0 - delta) * epsilon / gap


def correlation_gap(
    A,
    truth: SparseSignal,
    prior: PriorSupport,
    current_support,
    delta: float,
) -> CorrelationGapReport:
    """Correlation-gap diagnostic at one intermediate iteration.

    ``current_support`` is the selected set so far (prior included); it
    must satisfy prior <= current <= true-union-prior with fewer steps
    taken than the remainder size. ``delta`` is the isometry constant of
    order k+b+1, supplied by the caller (use :func:`exact_ric` for the
    exact value); it is never computed implicitly here.
    """
    A = as_matrix(A)
    n = A.shape[1]
    if truth.dimension != n:
        raise PreconditionViolatedError("truth dimension does not match matrix")
    current = tuple(sorted(int(i) for i in current_support))
    t_set = set(truth.support)
    prior_set = set(prior.indices)
    cur_set = set(current)
    if len(cur_set) != len(current):
        raise PreconditionViolatedError("current support has duplicates")
    if not prior_set <= cur_set:
        raise PreconditionViolatedError("current support must contain the prior")
    if not cur_set <= (t_set | prior_set):
        raise PreconditionViolatedError("current support strays outside truth+prior")
    k = truth.sparsity
    g = prior.true_count(truth.support)
    t = len(cur_set) - len(prior_set)
    if t >= k - g:
        raise PreconditionViolatedError("all remainder indices already selected")

    remainder = sorted(t_set - cur_set)
    x_rem = truth.dense()[remainder]
    target = A[:, remainder] @ x_rem
    cur_list = list(current)
    coef = least_squares(A[:, cur_list], target) if cur_list else np.zeros(0)
    z_tilde = np.zeros(n)
    z_tilde[remainder] = x_rem
    if cur_list:
        z_tilde[cur_list] -= coef
    residual = A @ z_tilde

    corr = np.abs(A.T @ residual)
    alpha1 = float(np.max(corr[remainder]))
    outside = sorted(set(range(n)) - t_set - prior_set)
    beta1 = float(np.max(corr[outside])) if outside else 0.0
    z_norm = float(np.linalg.norm(z_tilde))
    steps_left = k - g - t
    lower = (1.0 - math.sqrt(steps_left + 1) * delta) / math.sqrt(steps_left) * z_norm
    return CorrelationGapReport(alpha1=alpha1, beta1=beta1, lower_bound=lower, z_norm=z_norm)


def comparison_regime(k: int, g: int, b: int, c: int) -> bool:
    """True when the prior-informed condition is provably weaker than the
    standard one at these counts.

    Checks, in exact integer arithmetic: k > 2c^2 - 1, then
    (1 - 1/c^2)(k+1) <= g < k, then 1 <= b <= (c-2)*ceil(k/2).
    """
    if c < 3:
        raise InvalidCountsError(f"c must be >= 3, got {c}")
    if k < 1 or g < 0 or b < 0:
        raise InvalidCountsError("k, g, b must be non-negative with k >= 1")
    if k <= 2 * c * c - 1:
        return False
    if not (c * c * g >= (c * c - 1) * (k + 1) and g < k):
        return False
    return 1 <= b <= (c - 2) * ((k + 1) // 2)


def _check_counts(k: int, g: int, b: int) -> None:
    if k < 1 or g < 0 or g >= k or b < 0:
        raise InvalidCountsError(f"need k >= 1, 0 <= g < k, b >= 0; got k={k}, g={g}, b={b}")


def _check_bound_inputs(delta: float, k: int, g: int, epsilon: float) -> None:
    _check_counts(k, g, 0)
    if not 0.0 <= delta:
        raise ThresholdViolatedError(f"delta must be >= 0, got {delta}")
    if delta >= 1.0 / math.sqrt(k - g + 1):
        raise ThresholdViolatedError(
            f"delta={delta} is not below 1/sqrt(k-g+1)={1.0 / math.sqrt(k - g + 1):.6f}"
        )
    if epsilon < 0:
        raise PreconditionViolatedError("epsilon must be >= 0")
