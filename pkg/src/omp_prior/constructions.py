"""Exact generators for the two adversarial recovery instances.

Both constructors verify their own advertised spectra and identities
before returning, so a returned instance is a certificate: the sharp
instance attains the recovery threshold exactly and produces an exact
first-iteration correlation tie between true and outside columns; the
necessary-condition instance does the same in the noisy setting, with the
signal magnitude sitting exactly at the floor below which recovery can
fail.

Index convention: everything here is 0-based. The true support of a
(k, g, b) instance is {0..k-1} and the prior is {k-g..k+b-1}, so the
prior holds g true and b wrong indices, and the single column outside
both supports is the last one, index k+b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidCountsError,
    SelfCheckFailedError,
    ThresholdViolatedError,
    ZeroVectorError,
)
from .linalg import as_vector
from .ric import exact_ric
from .signals import PriorSupport, SparseSignal

_SPECTRUM_TOL = 1e-10


@dataclass(frozen=True)
class SharpInstance:
    """Threshold-attaining instance: delta at order k+b+1 equals
    1/sqrt(k-g+1) exactly and the first greedy selection ties between the
    remainder support and the lone outside column."""

    matrix: np.ndarray
    signal: SparseSignal
    prior: PriorSupport
    advertised_delta: float
    advertised_spectrum: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)
        self.advertised_spectrum.setflags(write=False)


@dataclass(frozen=True)
class NecessaryInstance:
    """Noisy instance witnessing the magnitude-floor necessity: the
    remainder entries equal theta, the largest value at which the first
    selection can be pulled outside the true support."""

    matrix: np.ndarray
    signal: SparseSignal
    noise: np.ndarray
    prior: PriorSupport
    theta: float
    eta: float
    delta: float
    epsilon: float

    def __post_init__(self):
        self.matrix.setflags(write=False)
        self.noise.setflags(write=False)

    def measurement(self) -> np.ndarray:
        return self.matrix @ self.signal.dense() + self.noise


def _check_counts(k: int, g: int, b: int) -> None:
    if k < 1 or g < 0 or g >= k or b < 0:
        raise InvalidCountsError(f"need k >= 1, 0 <= g < k, b >= 0; got k={k}, g={g}, b={b}")


def _sharp_layout(k: int, g: int, b: int, scale: float, coupling: float) -> np.ndarray:
    q = k - g
    n = k + b + 1
    A = np.zeros((n, n))
    A[:q, :q] = scale * np.eye(q)
    A[q:, q:] = np.eye(g + b + 1)
    A[:q, n - 1] = coupling
    return A


def build_sharp(k: int, g: int, b: int) -> SharpInstance:
    """Construct the instance attaining the recovery threshold exactly.

    The matrix is (k+b+1) x (k+b+1): a scaled identity sqrt((k-g)/(k-g+1))
    on the first k-g coordinates, an identity on the rest, and a last
    column whose first k-g entries couple the two blocks. The signal is
    all-ones on the first k indices.
    """
    _check_counts(k, g, b)
    q = k - g
    n = k + b + 1
    A = _sharp_layout(k, g, b, math.sqrt(q / (q + 1)), 1.0 / math.sqrt((q + 1) * q))
    delta = 1.0 / math.sqrt(q + 1)
    spectrum = np.sort(
        np.array([q / (q + 1)] * (q - 1) + [1.0] * (g + b) + [1.0 - delta, 1.0 + delta])
    )

    measured = np.sort(np.linalg.eigvalsh(A.T @ A))
    if np.max(np.abs(measured - spectrum)) > _SPECTRUM_TOL:
        raise SelfCheckFailedError("sharp instance spectrum does not match its closed form")
    report = exact_ric(A, n)
    if abs(report.value - delta) > _SPECTRUM_TOL:
        raise SelfCheckFailedError("sharp instance RIC does not attain the threshold")

    signal = SparseSignal(n, tuple(range(k)), (1.0,) * k)
    prior = PriorSupport(tuple(range(q, k + b)))
    return SharpInstance(
        matrix=A,
        signal=signal,
        prior=prior,
        advertised_delta=delta,
        advertised_spectrum=spectrum,
    )


def build_near_sharp(k: int, g: int, b: int, margin: float) -> np.ndarray:
    """Same layout as :func:`build_sharp` but with the isometry constant
    dialed to margin/sqrt(k-g+1), strictly below the threshold for
    margin < 1.

    The top-left scale becomes sqrt(1 - margin^2/(k-g+1)) and the coupling
    entries shrink by the margin factor; margin = 1 reproduces the sharp
    matrix exactly.
    """
    _check_counts(k, g, b)
    if not 0.0 < margin <= 1.0:
        raise InvalidCountsError(f"margin must be in (0, 1], got {margin}")
    q = k - g
    scale = math.sqrt(1.0 - margin * margin / (q + 1))
    coupling = margin / math.sqrt(q * (q + 1))
    return _sharp_layout(k, g, b, scale, coupling)


def orthonormal_completion(v) -> np.ndarray:
    """Rows that extend v/||v|| to an orthonormal basis of its space.

    Returns a (d-1) x d matrix built by deterministically orthogonalizing
    the coordinate basis against v, skipping the coordinate most aligned
    with it; d = 1 yields an empty (0 x 1) matrix.
    """
    v = as_vector(v)
    d = v.shape[0]
    norm = np.linalg.norm(v)
    if d == 0 or norm == 0.0:
        raise ZeroVectorError("cannot complete the zero vector")
    u = v / norm
    if d == 1:
        return np.zeros((0, 1))
    skip = int(np.argmax(np.abs(u)))
    rows: list[np.ndarray] = []
    for j in range(d):
        if j == skip:
            continue
        w = np.zeros(d)
        w[j] = 1.0
        # two Gram-Schmidt passes for orthogonality near machine precision
        for _ in range(2):
            w -= (u @ w) * u
            for r in rows:
                w -= (r @ w) * r
        w /= np.linalg.norm(w)
        rows.append(w)
    return np.array(rows)


def build_necessary(k: int, g: int, b: int, delta: float, epsilon: float) -> NecessaryInstance:
    """Construct the noisy instance showing the magnitude floor is necessary.

    The sensing matrix is D @ U for an orthogonal U mixing the all-ones
    remainder direction with the last coordinate, and a diagonal D equal
    to sqrt(1+delta) everywhere except sqrt(1-delta) on the mixed row, so
    its isometry constant at order k+b+1 is exactly ``delta``. The signal
    carries theta on the remainder support and 1 on the true prior part;
    the noise is chosen orthogonal to the prior columns so that the first
    residual's correlation maxima over remainder and outside columns tie
    exactly.
    """
    _check_counts(k, g, b)
    if epsilon <= 0:
        raise InvalidCountsError(f"epsilon must be > 0, got {epsilon}")
    q = k - g
    threshold = 1.0 / math.sqrt(q + 1)
    if not 0.0 <= delta < threshold:
        raise ThresholdViolatedError(
            f"delta must satisfy 0 <= delta < 1/sqrt(k-g+1)={threshold:.6f}, got {delta}"
        )
    n = k + b + 1
    eta = (math.sqrt(q + 1) - 1.0) / math.sqrt(q)
    mix = math.sqrt(eta * eta + 1.0)

    U = np.zeros((n, n))
    U[: q - 1, :q] = orthonormal_completion(np.ones(q))
    U[q - 1, :q] = 1.0 / (math.sqrt(q) * mix)
    U[q - 1, n - 1] = eta / mix
    U[q : n - 1, q : n - 1] = np.eye(g + b)
    U[n - 1, :q] = eta / (math.sqrt(q) * mix)
    U[n - 1, n - 1] = -1.0 / mix
    d = np.full(n, math.sqrt(1.0 + delta))
    d[q - 1] = math.sqrt(1.0 - delta)
    A = d[:, None] * U

    theta = math.sqrt(1.0 - delta) * epsilon / (1.0 - math.sqrt(q + 1) * delta)
    values = (theta,) * q + (1.0,) * g
    signal = SparseSignal(n, tuple(range(k)), values)
    prior = PriorSupport(tuple(range(q, k + b)))
    noise = np.zeros(n)
    noise[q - 1] = -eta * epsilon / mix
    noise[n - 1] = math.sqrt((1.0 - delta) / ((eta * eta + 1.0) * (1.0 + delta))) * epsilon

    _verify_necessary(A, U, signal, noise, prior, delta, epsilon, n)
    return NecessaryInstance(
        matrix=A,
        signal=signal,
        noise=noise,
        prior=prior,
        theta=theta,
        eta=eta,
        delta=delta,
        epsilon=epsilon,
    )


def _verify_necessary(A, U, signal, noise, prior, delta, epsilon, n) -> None:
    if np.max(np.abs(U.T @ U - np.eye(n))) > _SPECTRUM_TOL:
        raise SelfCheckFailedError("mixing matrix is not orthogonal")
    report = exact_ric(A, n)
    if abs(report.value - delta) > 1e-9:
        raise SelfCheckFailedError("instance RIC does not equal the requested delta")
    if np.linalg.norm(noise) > epsilon * (1.0 + 1e-12):
        raise SelfCheckFailedError("noise exceeds its advertised bound")
    prior_cols = A[:, list(prior.indices)]
    remainder = [i for i in signal.support if i not in set(prior.indices)]
    remainder_part = A[:, remainder] @ signal.dense()[remainder]
    if prior_cols.size and np.max(np.abs(prior_cols.T @ remainder_part)) > _SPECTRUM_TOL:
        raise SelfCheckFailedError("remainder measurement is not orthogonal to prior columns")
    if prior_cols.size and np.max(np.abs(prior_cols.T @ noise)) > _SPECTRUM_TOL:
        raise SelfCheckFailedError("noise is not orthogonal to prior columns")
