"""Sparse signals and partial support sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionMismatchError, PreconditionViolatedError


def _as_index_tuple(indices: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(i) for i in indices)
    if any(i < 0 for i in out):
        raise PreconditionViolatedError("indices must be non-negative")
    if any(a >= b for a, b in zip(out, out[1:])):
        raise PreconditionViolatedError("indices must be strictly increasing")
    return out


@dataclass(frozen=True)
class SparseSignal:
    """A vector given by its support and the nonzero values on it."""

    dimension: int
    support: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", _as_index_tuple(self.support))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.dimension < 0:
            raise PreconditionViolatedError("dimension must be non-negative")
        if len(self.support) != len(self.values):
            raise PreconditionViolatedError("support and values lengths differ")
        if self.support and self.support[-1] >= self.dimension:
            raise PreconditionViolatedError("support index out of range")
        if any(v == 0.0 for v in self.values):
            raise PreconditionViolatedError("support values must be nonzero")
        if any(not np.isfinite(v) for v in self.values):
            raise PreconditionViolatedError("support values must be finite")

    @property
    def sparsity(self) -> int:
        return len(self.support)

    def dense(self) -> np.ndarray:
        x = np.zeros(self.dimension)
        if self.support:
            x[list(self.support)] = self.values
        return x

    @classmethod
    def from_dense(cls, x) -> "SparseSignal":
        arr = np.asarray(x, dtype=float)
        if arr.ndim != 1:
            raise DimensionMismatchError("dense signal must be 1-d")
        support = tuple(int(i) for i in np.flatnonzero(arr))
        return cls(len(arr), support, tuple(float(arr[i]) for i in support))


@dataclass(frozen=True)
class PriorSupport:
    """An index set believed to contain signal support; may be partly wrong.

    The true/wrong counts g and b are derived against a given support on
    demand and never stored.
    """

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "indices", _as_index_tuple(self.indices))

    def __len__(self) -> int:
        return len(self.indices)

    def true_count(self, support: Iterable[int]) -> int:
        """g = |T intersect T0| for the given true support T."""
        t = set(support)
        return sum(1 for i in self.indices if i in t)

    def wrong_count(self, support: Iterable[int]) -> int:
        """b = |T0 \\ T| for the given true support T."""
        t = set(support)
        return sum(1 for i in self.indices if i not in t)
