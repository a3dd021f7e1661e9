"""Slice construction and per-slice statistics tests.

Oracles: the pairwise-difference identity
cov = sum_{l<j} (z_l - z_j)(z_l - z_j)^T / (c (c-1)) for the unbiased
within-slice covariance, evaluated by an explicit double loop, and the
law-of-total-variance pooling identity at the sample level.
"""

import numpy as np
import pytest

from slicesdr import slice_discrete, slice_equal_count, slice_stats
from slicesdr.errors import DegenerateResponse, SingletonSlice, TooManySlices


class TestEqualCount:
    def test_exact_division(self):
        y = np.arange(1.0, 13.0)
        a = slice_equal_count(y, 3)
        assert a.H == 3 and a.mode == "equal-count"
        np.testing.assert_array_equal(a.counts, [4, 4, 4])
        np.testing.assert_array_equal(np.sort(a.flat_order()), np.arange(12))
        for h, idx in enumerate(a.slices):
            np.testing.assert_array_equal(np.sort(y[idx]), y[4 * h : 4 * h + 4])

    def test_remainder_goes_to_last_slice(self):
        a = slice_equal_count(np.arange(1.0, 11.0), 3)
        np.testing.assert_array_equal(a.counts, [3, 3, 4])

    def test_slices_ordered_by_response(self):
        rng = np.random.default_rng(0)
        y = rng.standard_normal(100)
        a = slice_equal_count(y, 7)
        tops = [y[idx].max() for idx in a.slices]
        bottoms = [y[idx].min() for idx in a.slices]
        for h in range(a.H - 1):
            assert tops[h] <= bottoms[h + 1]

    def test_stable_tie_break(self):
        a = slice_equal_count(np.array([2.0, 2.0, 1.0, 1.0]), 2)
        np.testing.assert_array_equal(a.slices[0], [2, 3])  # both 1s, file order
        np.testing.assert_array_equal(a.slices[1], [0, 1])

    def test_too_many_slices(self):
        with pytest.raises(TooManySlices):
            slice_equal_count(np.arange(9.0), 5)


class TestDiscrete:
    def test_by_value(self):
        a = slice_discrete(np.array([1.0, 1.0, 2.0, 2.0, 2.0]))
        assert a.H == 2 and a.mode == "discrete"
        np.testing.assert_array_equal(a.counts, [2, 3])
        np.testing.assert_array_equal(a.slices[0], [0, 1])
        np.testing.assert_array_equal(a.slices[1], [2, 3, 4])

    def test_single_value_rejected(self):
        with pytest.raises(DegenerateResponse):
            slice_discrete(np.array([5.0, 5.0, 5.0, 5.0]))

    def test_singleton_value_rejected(self):
        with pytest.raises(SingletonSlice, match="1.0"):
            slice_discrete(np.array([1.0, 2.0, 2.0]))


class TestSliceStats:
    def test_two_point_closed_form(self):
        z = np.array([[-1.0], [1.0]])
        a = slice_equal_count(np.array([0.0, 1.0]), 1)
        unbiased = slice_stats(z, a, divisor="c-1")
        ml = slice_stats(z, a, divisor="c")
        assert unbiased.means[0, 0] == pytest.approx(0.0)
        assert unbiased.covs[0, 0, 0] == pytest.approx(2.0)
        assert ml.covs[0, 0, 0] == pytest.approx(1.0)

    def test_constant_slice_has_zero_cov(self):
        z = np.ones((4, 2))
        a = slice_equal_count(np.arange(4.0), 2)
        st = slice_stats(z, a)
        np.testing.assert_allclose(st.covs, np.zeros((2, 2, 2)), atol=1e-14)

    def test_weights_sum_to_one(self):
        rng = np.random.default_rng(1)
        a = slice_equal_count(rng.standard_normal(23), 4)
        st = slice_stats(rng.standard_normal((23, 2)), a)
        assert st.weights.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_array_equal(st.counts, [5, 5, 5, 8])

    def test_pairwise_difference_identity(self):
        # cov (divisor c-1) equals the double-loop pairwise-difference form
        rng = np.random.default_rng(2)
        z = rng.standard_normal((6, 2))
        a = slice_equal_count(np.arange(6.0), 1)
        st = slice_stats(z, a, divisor="c-1")
        c = 6
        acc = np.zeros((2, 2))
        for l in range(1, c):
            for j in range(l):
                d = z[l] - z[j]
                acc += np.outer(d, d)
        oracle = acc / (c * (c - 1))
        np.testing.assert_allclose(st.covs[0], oracle, rtol=1e-10)

    def test_matches_direct_definition(self):
        rng = np.random.default_rng(3)
        z = rng.standard_normal((12, 3))
        y = rng.standard_normal(12)
        a = slice_equal_count(y, 3)
        st = slice_stats(z, a, divisor="c-1")
        for h, idx in enumerate(a.slices):
            rows = z[idx]
            mean = rows.mean(axis=0)
            acc = sum(np.outer(r - mean, r - mean) for r in rows)
            np.testing.assert_allclose(st.covs[h], acc / (len(idx) - 1), atol=1e-12)
            np.testing.assert_allclose(st.means[h], mean, atol=1e-14)

    def test_weighted_pooling_identity(self):
        # sum_h p_h (cov_c(h) + mean_h mean_h') = second moment with divisor n
        rng = np.random.default_rng(4)
        z = rng.standard_normal((40, 3))
        y = rng.standard_normal(40)
        a = slice_equal_count(y, 6)
        st = slice_stats(z, a, divisor="c")
        pooled = np.einsum("h,hij->ij", st.weights, st.covs) + np.einsum(
            "h,hi,hj->ij", st.weights, st.means, st.means
        )
        np.testing.assert_allclose(pooled, z.T @ z / 40, atol=1e-10)

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(5)
        z = rng.standard_normal((30, 2))
        y = rng.standard_normal(30)  # continuous, no ties
        st = slice_stats(z, slice_equal_count(y, 5))
        perm = rng.permutation(30)
        st_p = slice_stats(z[perm], slice_equal_count(y[perm], 5))
        np.testing.assert_allclose(st.means, st_p.means, atol=1e-12)
        np.testing.assert_allclose(st.covs, st_p.covs, atol=1e-12)

    def test_singleton_assignment_rejected(self):
        from slicesdr.slicing import SliceAssignment

        with pytest.raises(SingletonSlice):
            SliceAssignment(
                H=2, slices=(np.array([0, 1]), np.array([2])), mode="equal-count"
            )
