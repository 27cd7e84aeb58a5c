import math
import random
from fractions import Fraction

import mpmath
import numpy as np

from rauzy.rounding import (
    LAMBDA,
    down,
    exponents,
    fraction_to_float,
    ratio_array,
    sqrt_fraction,
    threshold_interval,
    up,
)


def test_up_down_bracket():
    for x in (1e-300, 0.1, 1.0, 3.5, 1e300):
        assert down(x) < x < up(x)
        assert down(-x) < -x < up(-x)


def test_fraction_to_float_directed():
    rng = random.Random(1)
    for _ in range(500):
        q = Fraction(rng.randrange(1, 10**30), rng.randrange(1, 10**30))
        lo, hi = fraction_to_float(q, "down"), fraction_to_float(q, "up")
        assert Fraction(lo) <= q <= Fraction(hi)
        assert hi == lo or math.nextafter(lo, math.inf) == hi


def test_sqrt_fraction_directed():
    rng = random.Random(2)
    for _ in range(300):
        q = Fraction(rng.randrange(0, 10**12), rng.randrange(1, 10**12))
        lo, hi = sqrt_fraction(q, "down"), sqrt_fraction(q, "up")
        assert Fraction(lo) ** 2 <= q <= Fraction(hi) ** 2
    assert sqrt_fraction(Fraction(4), "up") >= 2.0 >= sqrt_fraction(Fraction(4), "down")


def test_ratio_array_directed():
    num = np.array([1, 2, 7, 10**15])
    den = np.array([3, 3, 11, 3 * 10**15 + 1])
    lo, hi = ratio_array(num, den, "down"), ratio_array(num, den, "up")
    for a, b, l, h in zip(num, den, lo, hi):
        assert Fraction(float(l)) <= Fraction(int(a), int(b)) <= Fraction(float(h))


def test_lambda_interval_contains_exact():
    mpmath.mp.dps = 60
    exact = mpmath.mpf(3) / 2 - 1 / mpmath.sqrt(3)
    lo, hi = LAMBDA.interval()
    assert mpmath.mpf(lo.numerator) / lo.denominator <= exact <= mpmath.mpf(hi.numerator) / hi.denominator
    assert hi - lo < Fraction(1, 10**39)
    assert LAMBDA.value("down") <= LAMBDA.value() <= LAMBDA.value("up")
    mpmath.mp.dps = 15


def test_threshold_value():
    lo, hi = threshold_interval()
    assert lo <= hi
    assert Fraction(372350, 10**7) < lo and hi < Fraction(372351, 10**7)
    # 0.037235: rounds up to 0.0373 at four places, the same rounding used for delta
    assert math.ceil(hi * 10**4) == math.ceil(lo * 10**4) == 373


def test_exponents_directed():
    for d in (0.1, 0.5, 0.8285, 0.99):
        p_lo, q_lo = exponents(d, "down")
        p_hi, q_hi = exponents(d, "up")
        lam = 1.5 - 3**-0.5
        assert p_lo <= 3 * d + lam * (1 - d) <= p_hi
        assert q_lo <= lam * (1 - d) <= q_hi
