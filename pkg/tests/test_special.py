import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphmix.special import digamma, lgamma, log_rising

POINTS = [0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.7, 9.99, 10.0, 10.01, 47.3, 500.5, 1e4, 1e6 + 0.3]


class TestLgamma:
    @pytest.mark.parametrize("x", POINTS)
    def test_matches_mpmath(self, x):
        ref = float(mpmath.loggamma(mpmath.mpf(x)))
        assert lgamma(x) == pytest.approx(ref, rel=1e-12, abs=1e-13)


class TestDigamma:
    @pytest.mark.parametrize("x", POINTS)
    def test_matches_mpmath(self, x):
        ref = float(mpmath.digamma(mpmath.mpf(x)))
        assert digamma(x) == pytest.approx(ref, rel=1e-12, abs=1e-13)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=0.1, max_value=1e7, allow_nan=False))
    def test_random_arguments(self, x):
        ref = float(mpmath.digamma(mpmath.mpf(x)))
        assert digamma(x) == pytest.approx(ref, rel=1e-12, abs=1e-13)

    def test_known_values(self):
        assert digamma(1.0) == pytest.approx(-0.5772156649015329, rel=1e-14)
        assert digamma(0.5) == pytest.approx(-0.5772156649015329 - 2 * np.log(2), rel=1e-14)

    def test_recurrence(self):
        for x in (0.3, 2.2, 17.0):
            assert digamma(x + 1) - digamma(x) == pytest.approx(1 / x, rel=1e-12)

    def test_vectorized(self):
        xs = np.array([0.5, 1.0, 20.0])
        assert np.allclose(digamma(xs), [digamma(float(x)) for x in xs], rtol=0, atol=0)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_nonpositive_rejected(self, x):
        with pytest.raises(ValueError):
            digamma(x)


class TestLogRising:
    @pytest.mark.parametrize("x,n", [(0.1, 3), (2.0, 0), (9.99, 4), (10.0, 1e6), (12.5, 1000), (2e11, 9), (1e6, 3e5), (50.0, 0.5)])
    def test_matches_mpmath(self, x, n):
        with mpmath.workdps(50):
            ref = float(mpmath.loggamma(mpmath.mpf(x) + n) - mpmath.loggamma(mpmath.mpf(x)))
        assert log_rising(x, n) == pytest.approx(ref, rel=1e-12, abs=1e-13)

    def test_no_cancellation_at_huge_concentration(self):
        # lnB(9 + a, 21 + b) - lnB(a, b) tends to 9 log p + 21 log(1 - p)
        a, b = 2e11, 4.5e11
        p = a / (a + b)
        val = log_rising(a, 9) + log_rising(b, 21) - log_rising(a + b, 30)
        assert val == pytest.approx(9 * np.log(p) + 21 * np.log1p(-p), abs=1e-8)

    def test_vectorized(self):
        x = np.array([0.5, 15.0, 1e9])
        n = np.array([3.0, 0.0, 7.0])
        assert np.array_equal(log_rising(x, n), [log_rising(a, b) for a, b in zip(x, n)])
