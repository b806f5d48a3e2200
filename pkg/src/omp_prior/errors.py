"""Exception types shared across the package."""


class OmpPriorError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(OmpPriorError):
    """Inputs have mutually inconsistent shapes or index ranges."""


class RankDeficientError(OmpPriorError):
    """A column subset is numerically rank deficient (invalid support set)."""


class EigenFailureError(OmpPriorError):
    """The symmetric eigensolver failed to converge (defective input)."""


class EmptyDictionaryError(OmpPriorError):
    """The sensing matrix has no columns to select from."""


class BudgetExceededError(OmpPriorError):
    """Exhaustive subset enumeration would exceed the configured budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"enumeration needs {required} subsets, budget is {budget}; "
            "reduce the column count or the order"
        )


class InvalidCountsError(OmpPriorError):
    """Sparsity/prior counts (k, g, b, c) violate their constraints."""


class ThresholdViolatedError(OmpPriorError):
    """A RIC value is at or above 1/sqrt(k-g+1), so a bound denominator dies."""


class PreconditionViolatedError(OmpPriorError):
    """A structured input (e.g. a partial support set) is malformed."""


class SelfCheckFailedError(OmpPriorError):
    """A constructed instance failed its own spectrum/orthogonality checks."""


class ZeroVectorError(OmpPriorError):
    """An operation that needs a direction received the zero vector."""


class ConfigInfeasibleError(OmpPriorError):
    """A trial configuration cannot be realized at the ensemble dimensions."""


class GuaranteeViolationError(OmpPriorError):
    """A theorem-backed invariant failed on a concrete trial.

    This aborts the run: it means either a bug or a genuine counterexample,
    and the offending instance is embedded in the message for inspection.
    """
