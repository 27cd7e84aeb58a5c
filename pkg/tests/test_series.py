import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rauzy.series import (
    SeriesParams,
    a_k,
    a_values,
    b_k,
    b_values,
    second_factor,
    series_terms,
    telescoped_product,
)

LAM = 1.5 - 3**-0.5


def exact_second_factor(m, delta):
    """Independent high-precision oracle: the series summed by mpmath."""
    with mpmath.workdps(30):
        lam = mpmath.mpf(3) / 2 - 1 / mpmath.sqrt(3)
        d = mpmath.mpf(delta)
        p, q = 3 * d + lam * (1 - d), lam * (1 - d)

        def term(k):
            r = (k + 1) / (2 * k + 1)
            return (r**p + 8 ** (-d) * r**q) * ((m + 2) / (k + 2)) ** p

        # the default acceleration misjudges this slowly decaying series by ~1e-6
        return mpmath.nsum(term, [m, mpmath.inf], method="euler-maclaurin")


def test_small_delta_limit():
    params = SeriesParams(3, 1e-12)
    for k in (1, 5, 50):
        assert a_k(params, k, "nearest") == pytest.approx(2 * ((k + 1) / (2 * k + 1)) ** LAM, rel=1e-9)


def test_large_k_limit():
    params = SeriesParams(4, 0.7)
    limit = 0.5**params.p + 8**-0.7 * 0.5**params.q
    assert a_k(params, 10**6) == pytest.approx(limit, rel=1e-5)


def test_a_decreasing():
    params = SeriesParams(2, 0.8)
    vals = np.array([a_k(params, k, "nearest") for k in range(1, 10_001)])
    assert np.all(np.diff(vals) < 0)


def test_b_at_delta_one():
    params = SeriesParams(2, 1.0)
    for k in (1, 2, 10, 1000):
        assert b_k(params, k, "nearest") == pytest.approx(((k + 2) / (k + 3)) ** 3, rel=1e-15)


def test_b_below_one_and_tends_to_one():
    params = SeriesParams(5, 0.75)
    assert all(b_k(params, k) < 1 for k in (1, 10, 10**4))
    assert b_k(params, 10**9, "nearest") == pytest.approx(1.0, abs=1e-8)


def test_directed_values():
    params = SeriesParams(3, 0.8)
    with mpmath.workdps(40):
        lam = mpmath.mpf(3) / 2 - 1 / mpmath.sqrt(3)
        d = mpmath.mpf(0.8)
        p, q = 3 * d + lam * (1 - d), lam * (1 - d)
        for k in (1, 3, 17, 1000):
            r = mpmath.mpf(k + 1) / (2 * k + 1)
            a = r**p + 8 ** (-d) * r**q
            b = (mpmath.mpf(k + 2) / (k + 3)) ** p
            assert a_k(params, k, "down") <= a <= a_k(params, k, "up")
            assert b_k(params, k, "down") <= b <= b_k(params, k, "up")
    ks = np.arange(1, 200)
    assert np.all(a_values(params, ks) >= [a_k(params, int(k), "nearest") for k in ks])
    assert np.all(b_values(params, ks) >= [b_k(params, int(k), "nearest") for k in ks])


def test_telescoping():
    params = SeriesParams(3, 0.8)
    prod = 1.0
    for k in range(params.m + 1, 10_001):
        prod *= b_k(params, k - 1, "nearest")
        if k % 97 == 0 or k == 10_000:
            assert prod == pytest.approx(telescoped_product(params, k, "nearest"), rel=1e-10)
    assert telescoped_product(params, params.m) == pytest.approx(1.0)


def test_term_decay():
    for m, delta in ((2, 0.83), (9, 0.7415), (5, 0.5)):
        params = SeriesParams(m, delta)
        ks = np.arange(m, 10_001)
        terms = series_terms(params, ks)
        p = params.p
        # r_k <= 1 gives term(k) <= (1 + 8^-d)(m+2)^p (k+2)^-p <= C k^-p
        C = (1 + 8**-delta) * (m + 2) ** p * (1 + 1e-12)
        assert np.all(terms <= C * ks.astype(float) ** -p)


def test_second_factor_exceeds_first_term():
    params = SeriesParams(3, 0.8)
    assert second_factor(params).value > a_k(params, 3)


@pytest.mark.parametrize("m,delta", [(2, 0.8285), (3, 0.7982), (9, 0.7415), (4, 0.3)])
def test_second_factor_against_mpmath(m, delta):
    sf = second_factor(SeriesParams(m, delta), tolerance=1e-8)
    exact = float(exact_second_factor(m, delta))
    assert exact <= sf.value <= exact + 1e-8


def test_doubling_cutoff():
    params = SeriesParams(4, 0.77)
    a = second_factor(params, cutoff=2000)
    b = second_factor(params, cutoff=4000)
    assert abs(a.value - b.value) <= a.tail_bound
    assert b.value <= a.value + 1e-15


def test_non_increasing_in_delta():
    for m in (2, 6):
        vals = [second_factor(SeriesParams(m, d)).value for d in np.linspace(0.5, 0.99, 15)]
        assert all(x >= y for x, y in zip(vals, vals[1:]))


def test_certified_tolerance_random():
    rng = np.random.default_rng(11)
    for _ in range(20):
        m = int(rng.integers(2, 10))
        delta = float(rng.uniform(0.5, 0.95))
        t = 1e-6
        params = SeriesParams(m, delta)
        assert second_factor(params, t).value - second_factor(params, t / 100).value <= t


def test_not_summable_rejected():
    assert not SeriesParams(2, 0.0372).summable
    assert SeriesParams(2, 0.0373).summable
    with pytest.raises(ValueError):
        second_factor(SeriesParams(2, 0.03))
    with pytest.raises(ValueError):
        SeriesParams(2, 0.0)
    with pytest.raises(ValueError):
        a_k(SeriesParams(2, 0.5), 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 9), st.floats(0.2, 0.99))
def test_value_brackets_partial(m, delta):
    sf = second_factor(SeriesParams(m, delta), tolerance=1e-7)
    assert sf.partial <= sf.value
    assert sf.value - sf.partial <= sf.tail_bound * (1 + 1e-9) + 1e-15
    assert sf.tail_width <= 0.5e-7 * (1 + 1e-9)
