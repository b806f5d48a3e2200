"""Sparse recovery by orthogonal matching pursuit with partial support
information, with exact restricted isometry constants, adversarial
instance generators, and a Monte Carlo experiment harness."""

from .constructions import (
    NecessaryInstance,
    SharpInstance,
    build_near_sharp,
    build_necessary,
    build_sharp,
    orthonormal_completion,
)
from .errors import (
    BudgetExceededError,
    ConfigInfeasibleError,
    DimensionMismatchError,
    EigenFailureError,
    EmptyDictionaryError,
    GuaranteeViolationError,
    InvalidCountsError,
    OmpPriorError,
    PreconditionViolatedError,
    RankDeficientError,
    SelfCheckFailedError,
    ThresholdViolatedError,
    ZeroVectorError,
)
from .greedy import (
    AdversarialOutside,
    EstimateDiagnostics,
    FixedIterations,
    HighestIndex,
    LowestIndex,
    RecoveryTrace,
    ResidualThreshold,
    exact_recovery_check,
    omp_prior,
    success_check,
    support_estimate_diagnostics,
)
from .harness import (
    BoundCheckReport,
    EnsembleSpec,
    PriorComparisonRow,
    SweepRow,
    TrialConfig,
    TrialRecord,
    UniformMagnitude,
    UnitMagnitudeRandomSign,
    prior_value_comparison,
    run_noisy_bound_check,
    run_sweep,
)
from .linalg import gram_extremes, least_squares, projection_residual
from .ric import (
    CorrelationGapReport,
    RicReport,
    comparison_regime,
    correlation_gap,
    exact_ric,
    necessary_min_magnitude,
    sharp_threshold,
    sufficient_min_magnitude,
)
from .signals import PriorSupport, SparseSignal

__version__ = "0.1.0"

__all__ = [
    "AdversarialOutside",
    "BoundCheckReport",
    "BudgetExceededError",
    "ConfigInfeasibleError",
    "CorrelationGapReport",
    "DimensionMismatchError",
    "EigenFailureError",
    "EmptyDictionaryError",
    "EnsembleSpec",
    "EstimateDiagnostics",
    "FixedIterations",
    "GuaranteeViolationError",
    "HighestIndex",
    "InvalidCountsError",
    "LowestIndex",
    "NecessaryInstance",
    "OmpPriorError",
    "PreconditionViolatedError",
    "PriorComparisonRow",
    "PriorSupport",
    "RankDeficientError",
    "RecoveryTrace",
    "ResidualThreshold",
    "RicReport",
    "SelfCheckFailedError",
    "SharpInstance",
    "SparseSignal",
    "SweepRow",
    "ThresholdViolatedError",
    "TrialConfig",
    "TrialRecord",
    "UniformMagnitude",
    "UnitMagnitudeRandomSign",
    "ZeroVectorError",
    "build_near_sharp",
    "build_necessary",
    "build_sharp",
    "comparison_regime",
    "correlation_gap",
    "exact_recovery_check",
    "exact_ric",
    "gram_extremes",
    "least_squares",
    "necessary_min_magnitude",
    "omp_prior",
    "orthonormal_completion",
    "prior_value_comparison",
    "projection_residual",
    "run_noisy_bound_check",
    "run_sweep",
    "sharp_threshold",
    "success_check",
    "sufficient_min_magnitude",
    "support_estimate_diagnostics",
]
