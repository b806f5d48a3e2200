import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omp_prior import (
    BudgetExceededError,
    InvalidCountsError,
    PreconditionViolatedError,
    PriorSupport,
    SparseSignal,
    ThresholdViolatedError,
    build_near_sharp,
    build_sharp,
    comparison_regime,
    correlation_gap,
    exact_ric,
    necessary_min_magnitude,
    sharp_threshold,
    sufficient_min_magnitude,
)

from conftest import gaussian_instance


class TestExactRic:
    def test_identity_is_zero(self):
        for order in (1, 3, 5):
            report = exact_ric(np.eye(5), order)
            assert report.value == pytest.approx(0.0, abs=1e-14)
            assert report.rip_holds

    def test_sharp_instance_attains_threshold(self, sharp_411):
        report = exact_ric(sharp_411.matrix, 6)
        assert report.value == pytest.approx(0.5, abs=1e-12)
        assert report.subsets_evaluated == 1

    def test_duplicated_columns_give_one(self):
        # gram of a duplicated unit column is [[1,1],[1,1]]: eigenvalues 0, 2
        A = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        report = exact_ric(A, 2)
        assert report.value == pytest.approx(1.0, abs=1e-12)
        assert not report.rip_holds
        assert report.witness_subset == (0, 1)

    def test_budget_exceeded_carries_required_count(self):
        A = np.ones((2, 80))
        with pytest.raises(BudgetExceededError) as err:
            exact_ric(A, 10)
        assert err.value.required == math.comb(80, 10)

    def test_order_bounds(self):
        with pytest.raises(InvalidCountsError):
            exact_ric(np.eye(3), 0)
        with pytest.raises(InvalidCountsError):
            exact_ric(np.eye(3), 4)

    def test_matches_brute_force_per_subset(self):
        # independent oracle: plain python loop over subsets with eigvalsh
        A, _ = gaussian_instance(7, 6, 8)
        order = 3
        best = -np.inf
        for subset in itertools.combinations(range(8), order):
            eigs = np.linalg.eigvalsh(A[:, list(subset)].T @ A[:, list(subset)])
            best = max(best, max(eigs[-1] - 1.0, 1.0 - eigs[0]))
        report = exact_ric(A, order)
        assert report.value == pytest.approx(best, abs=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_order_monotonicity(self, seed):
        A, _ = gaussian_instance(seed, 6, 7)
        values = [exact_ric(A, order).value for order in range(1, 6)]
        assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 10_000))
    def test_rayleigh_quotient_oracle(self, seed):
        A, rng = gaussian_instance(seed, 8, 10)
        order = 3
        delta = exact_ric(A, order).value + 1e-10
        for _ in range(1000):
            support = rng.choice(10, size=order, replace=False)
            u = np.zeros(10)
            u[support] = rng.standard_normal(order)
            u /= np.linalg.norm(u)
            energy = np.linalg.norm(A @ u) ** 2
            assert 1.0 - delta <= energy <= 1.0 + delta


class TestThresholdFormulas:
    def test_sharp_threshold_values(self):
        assert sharp_threshold(5, 0, 0) == pytest.approx(1.0 / math.sqrt(6))
        assert sharp_threshold(4, 1, 1) == pytest.approx(0.5)
        assert sharp_threshold(3, 2, 5) == pytest.approx(1.0 / math.sqrt(2))

    def test_sharp_threshold_invalid_counts(self):
        with pytest.raises(InvalidCountsError):
            sharp_threshold(3, 3, 0)
        with pytest.raises(InvalidCountsError):
            sharp_threshold(3, 1, -1)

    def test_sufficient_zero_noise_is_zero(self):
        assert sufficient_min_magnitude(0.2, 4, 1, 0.0) == 0.0

    def test_sufficient_zero_delta(self):
        assert sufficient_min_magnitude(0.0, 4, 1, 1.0) == pytest.approx(2.0)

    def test_sufficient_derived_value(self):
        # both branches at delta=0.25, (k,g)=(4,1), eps=0.1, evaluated with
        # 40-digit arithmetic: sqrt(2.5)*0.1/0.5 = 0.3162277660168379331...
        # and 0.2/sqrt(0.75) = 0.2309401076758503058...; the max is the first
        assert sufficient_min_magnitude(0.25, 4, 1, 0.1) == pytest.approx(
            0.31622776601683794, abs=1e-15
        )

    def test_necessary_values(self):
        assert necessary_min_magnitude(0.2, 4, 1, 0.0) == 0.0
        assert necessary_min_magnitude(0.0, 4, 1, 1.0) == pytest.approx(1.0)
        # sqrt(0.75)*0.1/0.5 with 40-digit arithmetic
        assert necessary_min_magnitude(0.25, 4, 1, 0.1) == pytest.approx(
            0.17320508075688773, abs=1e-15
        )

    def test_threshold_violated(self):
        with pytest.raises(ThresholdViolatedError):
            sufficient_min_magnitude(0.5, 4, 1, 0.1)
        with pytest.raises(ThresholdViolatedError):
            necessary_min_magnitude(0.6, 4, 1, 0.1)

    @settings(max_examples=200, deadline=None)
    @given(
        st.integers(1, 12),
        st.integers(0, 11),
        st.floats(0.0, 0.999),
        st.floats(1e-6, 10.0),
    )
    def test_sufficient_dominates_necessary(self, k, g, frac, eps):
        # admissible region: delta strictly below the threshold; there the
        # first sufficient branch already dominates the necessary floor
        # because sqrt(2(1+d)) > sqrt(1-d)
        if g >= k:
            g = k - 1
        delta = frac / math.sqrt(k - g + 1)
        if delta >= 1.0 / math.sqrt(k - g + 1):
            return
        assert sufficient_min_magnitude(delta, k, g, eps) >= necessary_min_magnitude(
            delta, k, g, eps
        )


class TestCorrelationGap:
    def test_sharp_prior_start_is_exact_tie_with_zero_bound(self, sharp_411):
        inst = sharp_411
        report = correlation_gap(
            inst.matrix, inst.signal, inst.prior, inst.prior.indices, inst.advertised_delta
        )
        assert report.alpha1 == pytest.approx(0.75, abs=1e-12)
        assert report.beta1 == pytest.approx(0.75, abs=1e-12)
        assert report.lower_bound == pytest.approx(0.0, abs=1e-12)

    def test_last_step_structure(self, sharp_411):
        # one remaining index: the bound carries the sqrt(2) factor and
        # alpha1 is that column's correlation with the residual
        inst = sharp_411
        current = tuple(sorted(set(inst.prior.indices) | {0, 1}))
        delta = inst.advertised_delta
        report = correlation_gap(inst.matrix, inst.signal, inst.prior, current, delta)
        assert report.lower_bound == pytest.approx(
            (1.0 - math.sqrt(2.0) * delta) * report.z_norm, abs=1e-12
        )
        A = inst.matrix
        active = list(current)
        x = inst.signal.dense()
        rem = [2]
        target = A[:, rem] @ x[rem]
        resid = target - A[:, active] @ np.linalg.lstsq(A[:, active], target, rcond=None)[0]
        assert report.alpha1 == pytest.approx(abs(A[:, 2] @ resid), abs=1e-12)

    def test_gaussian_compliant_gap_positive(self):
        # find a compliant random instance, then the gap must clear the bound
        found = False
        for seed in range(200):
            A, rng = gaussian_instance(seed, 30, 8)
            k, g, b = 3, 1, 1
            delta = exact_ric(A, k + b + 1).value
            if delta >= sharp_threshold(k, g, b):
                continue
            found = True
            truth = SparseSignal(8, (0, 1, 2), (1.0, -1.0, 0.5))
            prior = PriorSupport((2, 5))
            report = correlation_gap(A, truth, prior, prior.indices, delta)
            assert report.lower_bound > 0.0
            assert report.alpha1 - report.beta1 >= report.lower_bound - 1e-9
            break
        assert found

    def test_precondition_violations(self, sharp_411):
        inst = sharp_411
        with pytest.raises(PreconditionViolatedError):
            correlation_gap(inst.matrix, inst.signal, inst.prior, (0, 1), 0.5)
        with pytest.raises(PreconditionViolatedError):
            correlation_gap(
                inst.matrix, inst.signal, inst.prior,
                tuple(sorted(set(inst.prior.indices) | {5})), 0.5,
            )
        full = tuple(sorted(set(inst.prior.indices) | {0, 1, 2}))
        with pytest.raises(PreconditionViolatedError):
            correlation_gap(inst.matrix, inst.signal, inst.prior, full, 0.5)


class TestComparisonRegime:
    def test_spot_values(self):
        assert comparison_regime(19, 18, 1, 3) is True
        assert comparison_regime(10, 9, 1, 3) is False
        assert comparison_regime(19, 10, 1, 3) is False

    def test_invalid_c(self):
        with pytest.raises(InvalidCountsError):
            comparison_regime(19, 18, 1, 2)

    def test_against_fraction_oracle_grid(self):
        # independent oracle in exact rational arithmetic
        def oracle(k, g, b, c):
            first = k > 2 * c * c - 1
            second = Fraction(g) >= (1 - Fraction(1, c * c)) * (k + 1) and g < k
            third = 1 <= b <= (c - 2) * math.ceil(k / 2)
            return first and second and third

        count = 0
        for c in (3, 4):
            for k in (15, 17, 18, 19, 26, 31, 33, 40):
                for g in (k - 1, k - 2, (8 * (k + 1)) // 9, k // 2):
                    for b in (0, 1, (c - 2) * ((k + 1) // 2), 50):
                        assert comparison_regime(k, g, b, c) == oracle(k, g, b, c)
                        count += 1
        assert count >= 200
