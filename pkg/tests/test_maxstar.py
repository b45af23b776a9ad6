import math

import numpy as np
import pytest

from lteturbo.maxstar import (METRIC_NEG_INF, CorrectionParams, MaxStarMode,
                              max_star, max_star_reduce)

ALL_MODES = list(MaxStarMode)


class TestPointValues:
    def test_max_log_is_plain_max(self):
        assert max_star(1.0, 2.0, MaxStarMode.MAX_LOG) == 2.0

    def test_log_map_equal_arguments(self):
        assert max_star(0.0, 0.0, MaxStarMode.LOG_MAP) == pytest.approx(math.log(2), abs=1e-12)

    def test_constant_mode(self):
        p = CorrectionParams(c=0.5, t=1.5)
        assert max_star(0.0, 1.0, MaxStarMode.CONSTANT_LOG, p) == 1.5
        assert max_star(0.0, 2.0, MaxStarMode.CONSTANT_LOG, p) == 2.0

    def test_linear_mode(self):
        # -0.24904 * (0 - 2.5068) evaluated directly
        p = CorrectionParams(a=-0.24904, t_lin=2.5068)
        assert max_star(0.0, 0.0, MaxStarMode.LINEAR_LOG, p) == pytest.approx(
            0.624293472, abs=1e-9)

    def test_log_map_matches_closed_form(self):
        rng = np.random.default_rng(0)
        x, y = rng.normal(0, 5, (2, 1000))
        got = max_star(x, y, MaxStarMode.LOG_MAP)
        want = np.maximum(x, y) + np.log1p(np.exp(-np.abs(x - y)))
        np.testing.assert_allclose(got, want, atol=1e-12)


class TestProperties:
    @pytest.mark.parametrize("mode", ALL_MODES)
    def test_symmetry(self, mode):
        rng = np.random.default_rng(1)
        x, y = rng.normal(0, 10, (2, 500))
        assert np.array_equal(max_star(x, y, mode), max_star(y, x, mode))

    @pytest.mark.parametrize("mode", ALL_MODES)
    def test_bounded_correction(self, mode):
        # max <= max* <= max + ln 2 (+ eps); with default params every
        # mode's correction peaks at or below ln 2
        rng = np.random.default_rng(2)
        x, y = rng.normal(0, 10, (2, 2000))
        ms = max_star(x, y, mode)
        m = np.maximum(x, y)
        assert (ms >= m).all()
        assert (ms <= m + math.log(2) + 1e-12).all()

    @pytest.mark.parametrize("mode", ALL_MODES)
    def test_shift_equivariance(self, mode):
        rng = np.random.default_rng(3)
        # dyadic inputs and shifts; MAX_LOG and CONSTANT corrections are
        # dyadic too, so those modes commute with shifts bit-exactly.
        # LOG_MAP and LINEAR corrections are transcendental: the identity
        # holds in exact arithmetic, here to float addition error.
        x = np.round(rng.normal(0, 8, 500) * 64) / 64
        y = np.round(rng.normal(0, 8, 500) * 64) / 64
        for d in (0.5, -4.0, 1024.0):
            shifted = max_star(x + d, y + d, mode)
            reference = max_star(x, y, mode) + d
            if mode in (MaxStarMode.MAX_LOG, MaxStarMode.CONSTANT_LOG):
                assert np.array_equal(shifted, reference)
            else:
                np.testing.assert_allclose(shifted, reference, atol=1e-12)

    def test_max_log_positive_homogeneity(self):
        rng = np.random.default_rng(4)
        x, y = rng.normal(0, 5, (2, 500))
        for c in (0.5, 3.7):
            np.testing.assert_allclose(
                max_star(c * x, c * y, MaxStarMode.MAX_LOG),
                c * max_star(x, y, MaxStarMode.MAX_LOG), rtol=1e-15)

    @pytest.mark.parametrize("mode", ALL_MODES)
    def test_sentinel_is_absorbing(self, mode):
        # either argument at the -inf sentinel: result is the other one,
        # correction suppressed, no NaN anywhere
        x = np.array([0.0, -3.5, 17.25])
        out = max_star(x, METRIC_NEG_INF, mode)
        assert np.array_equal(out, x)
        out = max_star(METRIC_NEG_INF, x, mode)
        assert np.array_equal(out, x)
        both = max_star(METRIC_NEG_INF, METRIC_NEG_INF, mode)
        assert both <= -1e12 and np.isfinite(both)


class TestReduce:
    def test_max_log_list(self):
        assert max_star_reduce([1.0, 7.0, 3.0], MaxStarMode.MAX_LOG) == 7.0

    def test_log_map_equal_terms(self):
        assert max_star_reduce([0.0, 0.0, 0.0, 0.0], MaxStarMode.LOG_MAP) == pytest.approx(
            math.log(4), abs=1e-12)

    @pytest.mark.parametrize("mode", ALL_MODES)
    def test_singleton_identity(self, mode):
        assert max_star_reduce([4.25], mode) == 4.25

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            max_star_reduce([], MaxStarMode.MAX_LOG)

    def test_log_map_reduce_is_logsumexp(self):
        rng = np.random.default_rng(5)
        for length in range(2, 17):
            v = rng.normal(0, 5, length)
            want = np.logaddexp.reduce(np.sort(v))  # independent order
            got = max_star_reduce(v, MaxStarMode.LOG_MAP)
            assert got == pytest.approx(want, abs=1e-9)

    def test_max_log_reduce_order_free(self):
        rng = np.random.default_rng(6)
        v = rng.normal(0, 5, (100, 8))
        got = max_star_reduce(v, MaxStarMode.MAX_LOG, axis=-1)
        assert np.array_equal(got, v.max(axis=-1))

    def test_left_fold_order_for_approximate_modes(self):
        # constant-mode corrections are not associative; the contract is a
        # left fold, checked against a hand-rolled fold
        p = CorrectionParams()
        v = [0.0, 0.4, -0.2, 5.0]
        acc = v[0]
        for item in v[1:]:
            acc = max_star(acc, item, MaxStarMode.CONSTANT_LOG, p)
        assert max_star_reduce(v, MaxStarMode.CONSTANT_LOG, p) == acc


class TestCorrectionParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            CorrectionParams(c=-0.1)
        with pytest.raises(ValueError):
            CorrectionParams(t=0.0)
        with pytest.raises(ValueError):
            CorrectionParams(a=0.1)
        with pytest.raises(ValueError):
            CorrectionParams(t_lin=-1.0)

    def test_logmap_lut_variant(self):
        # 8-entry piecewise-constant correction stays within 0.13 of the
        # exact term and is exact-mode-equal far from the threshold
        p = CorrectionParams(logmap_lut=True)
        d = np.linspace(0, 10, 2001)
        lut = max_star(d, 0.0, MaxStarMode.LOG_MAP, p) - d
        exact = np.log1p(np.exp(-d))
        assert np.abs(lut - exact).max() < 0.13
        assert max_star(10.0, 0.0, MaxStarMode.LOG_MAP, p) == 10.0
