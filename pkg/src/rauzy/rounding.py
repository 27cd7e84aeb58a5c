"""Directed rounding helpers.

Floating-point results are pushed outward with ``nextafter`` plus a small
relative bump, which covers the (sub-ulp) error of libm ``pow``/``exp``/``log``.
Rational inputs are converted exactly in the requested direction.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Literal

import numpy as np

Rounding = Literal["up", "down", "nearest"]

INF = math.inf
#: relative bump applied after one transcendental libm call (~4 ulps)
ULP_BUMP = 2.0**-50
#: relative bump for compound float expressions (a few chained libm calls)
COMPOUND_BUMP = 2.0**-40


def _check(rounding: str) -> None:
    if rounding not in ("up", "down", "nearest"):
        raise ValueError(f"unknown rounding direction {rounding!r}")


def up(x: float, rel: float = ULP_BUMP) -> float:
    if math.isinf(x) or math.isnan(x):
        return x
    return math.nextafter(x + abs(x) * rel, INF)


def down(x: float, rel: float = ULP_BUMP) -> float:
    if math.isinf(x) or math.isnan(x):
        return x
    return math.nextafter(x - abs(x) * rel, -INF)


def directed(x: float, rounding: Rounding, rel: float = ULP_BUMP) -> float:
    _check(rounding)
    if rounding == "up":
        return up(x, rel)
    if rounding == "down":
        return down(x, rel)
    return x


def up_array(x: np.ndarray, rel: float = ULP_BUMP) -> np.ndarray:
    return np.nextafter(x + np.abs(x) * rel, INF)


def down_array(x: np.ndarray, rel: float = ULP_BUMP) -> np.ndarray:
    return np.nextafter(x - np.abs(x) * rel, -INF)


def directed_array(x: np.ndarray, rounding: Rounding, rel: float = ULP_BUMP) -> np.ndarray:
    _check(rounding)
    if rounding == "up":
        return up_array(x, rel)
    if rounding == "down":
        return down_array(x, rel)
    return x


def fraction_to_float(q: Fraction | int, rounding: Rounding = "nearest") -> float:
    """Exactly directed conversion of a rational to a double."""
    _check(rounding)
    q = Fraction(q)
    f = float(q)  # correctly rounded to nearest
    if rounding == "up" and Fraction(f) < q:
        f = math.nextafter(f, INF)
    elif rounding == "down" and Fraction(f) > q:
        f = math.nextafter(f, -INF)
    return f


def ratio_array(num: np.ndarray, den: np.ndarray, rounding: Rounding) -> np.ndarray:
    """Directed num/den for integer arrays whose entries are exact in float64 (< 2**53)."""
    if num.size and (np.abs(num).max() >= 2**53 or np.abs(den).max() >= 2**53):
        raise OverflowError("integer operands exceed exact float64 range")
    q = num.astype(np.float64) / den.astype(np.float64)  # IEEE division: correctly rounded
    if rounding == "nearest":
        return q
    return np.nextafter(q, INF if rounding == "up" else -INF)


def sqrt_fraction(q: Fraction, rounding: Rounding = "nearest", bits: int = 64) -> float:
    """Directed square root of a nonnegative rational, via integer square roots."""
    _check(rounding)
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative argument")
    if q == 0:
        return 0.0
    # sqrt(a/b) = sqrt(a*b)/b; scale so the integer root carries `bits` bits
    a, b = q.numerator, q.denominator
    shift = max(0, bits - ((a * b).bit_length() // 2)) + 2
    r = math.isqrt((a * b) << (2 * shift))
    lo = Fraction(r, b << shift)
    hi = Fraction(r + 1, b << shift)
    if rounding == "up":
        return fraction_to_float(hi, "up")
    if rounding == "down":
        return fraction_to_float(lo, "down")
    return float(lo)


def pow_directed(base: float, exponent: float, rounding: Rounding) -> float:
    return directed(base**exponent, rounding)


class Lambda:
    """The contraction exponent 3/2 - 1/sqrt(3), kept symbolic.

    Bounds are materialized from integer square roots of 3 at a chosen number
    of decimal digits; nothing is cached as a decimal literal.
    """

    def interval(self, digits: int = 40) -> tuple[Fraction, Fraction]:
        scale = 10**digits
        s = math.isqrt(3 * scale * scale)  # floor(sqrt(3) * scale)
        # 1/sqrt(3) = sqrt(3)/3
        lo = Fraction(3, 2) - Fraction(s + 1, 3 * scale)
        hi = Fraction(3, 2) - Fraction(s, 3 * scale)
        return lo, hi

    def value(self, rounding: Rounding = "nearest") -> float:
        lo, hi = self.interval()
        if rounding == "up":
            return fraction_to_float(hi, "up")
        if rounding == "down":
            return fraction_to_float(lo, "down")
        return float((lo + hi) / 2)

    def fraction(self, rounding: Rounding) -> Fraction:
        lo, hi = self.interval()
        return hi if rounding == "up" else lo if rounding == "down" else (lo + hi) / 2

    def __repr__(self) -> str:
        return "Lambda(3/2 - 3**-0.5)"


LAMBDA = Lambda()


def threshold_interval() -> tuple[Fraction, Fraction]:
    """Bounds on (1 - lambda)/(3 - lambda); increasing in lambda's complement."""
    lo, hi = LAMBDA.interval()
    # d/dl [(1-l)/(3-l)] = -2/(3-l)^2 < 0, so the map is decreasing in lambda
    return (1 - hi) / (3 - hi), (1 - lo) / (3 - lo)


def exponents(delta: float, rounding: Rounding) -> tuple[float, float]:
    """(p, q) = (3d + lambda(1-d), lambda(1-d)) rounded in the given direction, for d < 1."""
    d = Fraction(delta)
    lam = LAMBDA.fraction(rounding)
    q = lam * (1 - d)
    p = 3 * d + q
    if rounding == "nearest":
        return float(p), float(q)
    return fraction_to_float(p, rounding), fraction_to_float(q, rounding)
