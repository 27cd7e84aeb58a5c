"""The scalar chain weights a_k, b_k and the certified renewal tail sum.

With ``p = 3d + lam(1-d)`` and ``q = lam(1-d)``::

    a_k = r_k**p + 8**-d * r_k**q,    r_k = (k+1)/(2k+1)
    b_k = ((k+2)/(k+3))**p

and the products of b telescope: ``prod_{i=m}^{k-1} b_i = ((m+2)/(k+2))**p``.
The second factor ``sum_{k>=m} a_k prod b_i`` is a partial sum plus an
integral-comparison tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from rauzy.rounding import (
    Rounding,
    down,
    exponents,
    fraction_to_float,
    threshold_interval,
    up,
    up_array,
)

#: smallest cutoff examined by the adaptive tail search
MIN_CUTOFF = 1024
#: hard cap on the cutoff; beyond it the requested tolerance is refused
MAX_CUTOFF = 1 << 27


@dataclass(frozen=True)
class SeriesParams:
    m: int
    delta: float
    p_lo: float = field(init=False)
    p_hi: float = field(init=False)
    q_lo: float = field(init=False)
    q_hi: float = field(init=False)

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("m must be positive")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        p_lo, q_lo = exponents(self.delta, "down")
        p_hi, q_hi = exponents(self.delta, "up")
        object.__setattr__(self, "p_lo", p_lo)
        object.__setattr__(self, "p_hi", p_hi)
        object.__setattr__(self, "q_lo", q_lo)
        object.__setattr__(self, "q_hi", q_hi)

    @property
    def p(self) -> float:
        return exponents(self.delta, "nearest")[0]

    @property
    def q(self) -> float:
        return exponents(self.delta, "nearest")[1]

    @property
    def summable(self) -> bool:
        """True when delta certainly exceeds (1 - lam)/(3 - lam), i.e. p > 1."""
        return Fraction(self.delta) > threshold_interval()[1]

    def exponent(self, which: str, rounding: Rounding) -> float:
        """Exponent giving a bound in `rounding` direction for a base in (0, 1)."""
        lo, hi = (self.p_lo, self.p_hi) if which == "p" else (self.q_lo, self.q_hi)
        if rounding == "up":
            return lo
        if rounding == "down":
            return hi
        return self.p if which == "p" else self.q


def _ratio(num: int, den: int, rounding: Rounding) -> float:
    return fraction_to_float(Fraction(num, den), rounding)


def _eight_pow(delta: float, rounding: Rounding) -> float:
    v = 8.0 ** (-delta)
    return up(v) if rounding == "up" else down(v) if rounding == "down" else v


def a_k(params: SeriesParams, k: int, rounding: Rounding = "up") -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    p = params.exponent("p", rounding)
    q = params.exponent("q", rounding)
    r = _ratio(k + 1, 2 * k + 1, rounding)
    if rounding == "nearest":
        return r**p + 8.0 ** (-params.delta) * r**q
    d = up if rounding == "up" else down
    return d(d(r**p) + d(_eight_pow(params.delta, rounding) * d(r**q)))


def b_k(params: SeriesParams, k: int, rounding: Rounding = "up") -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    p = params.exponent("p", rounding)
    r = _ratio(k + 2, k + 3, rounding)
    if rounding == "nearest":
        return r**p
    return up(r**p) if rounding == "up" else down(r**p)


def a_values(params: SeriesParams, ks: np.ndarray) -> np.ndarray:
    """Upward-rounded a_k for an array of k."""
    ks = np.asarray(ks, dtype=np.float64)
    r = np.nextafter((ks + 1) / (2 * ks + 1), math.inf)
    t1 = up_array(np.power(r, params.p_lo))
    t2 = up_array(_eight_pow(params.delta, "up") * up_array(np.power(r, params.q_lo)))
    return up_array(t1 + t2)


def b_values(params: SeriesParams, ks: np.ndarray) -> np.ndarray:
    ks = np.asarray(ks, dtype=np.float64)
    r = np.nextafter((ks + 2) / (ks + 3), math.inf)
    return up_array(np.power(r, params.p_lo))


def telescoped_product(params: SeriesParams, k: int, rounding: Rounding = "up") -> float:
    """prod_{i=m}^{k-1} b_i in closed form ((m+2)/(k+2))**p."""
    if k < params.m:
        raise ValueError("k must be >= m")
    g = _ratio(params.m + 2, k + 2, rounding)
    p = params.exponent("p", rounding)
    v = g**p
    return up(v) if rounding == "up" else down(v) if rounding == "down" else v


def series_terms(params: SeriesParams, ks: np.ndarray) -> np.ndarray:
    """Upward-rounded a_k * prod_{i=m}^{k-1} b_i, using the telescoped product."""
    ks = np.asarray(ks, dtype=np.float64)
    m = params.m
    r = np.nextafter((ks + 1) / (2 * ks + 1), math.inf)
    g = np.nextafter((m + 2) / (ks + 2), math.inf)
    rg = up_array(r * g)
    gp = up_array(np.power(g, params.p_lo))
    t1 = up_array(np.power(rg, params.p_lo))
    t2 = up_array(_eight_pow(params.delta, "up") * up_array(up_array(np.power(r, params.q_lo)) * gp))
    return up_array(t1 + t2)


def _tail_bounds(params: SeriesParams, K: int) -> tuple[float, float]:
    """(upper, lower) bounds on sum_{k>K} a_k prod b_i.

    For k > K: r_k <= r_{K+1}, r_k > 1/2 and the term is
    (r_k (m+2))**p (k+2)**-p + 8**-d r_k**q (m+2)**p (k+2)**-p; the sums of
    (k+2)**-p are bracketed by integrals from K+3 and from K+2.
    """
    m = params.m
    p, q = params.p_lo, params.q_lo
    r = _ratio(K + 2, 2 * K + 3, "up")
    c = up(up(up(r * (m + 2)) ** p) + up(_eight_pow(params.delta, "up") * up(up(r**q) * up(float(m + 2) ** p))))
    integral = up(up(float(K + 2) ** (1 - p)) / down(p - 1))
    upper = up(c * integral)
    pn = params.p
    c_lo = ((m + 2) / 2) ** pn + 8.0 ** (-params.delta) * 2.0 ** (-params.q) * (m + 2) ** pn
    lower = c_lo * (K + 3) ** (1 - pn) / (pn - 1)
    return upper, lower


@dataclass(frozen=True)
class SecondFactor:
    value: float  # certified upper bound
    partial: float
    tail_bound: float
    tail_width: float  # tail_bound minus a lower bound on the true tail
    cutoff: int


def second_factor(params: SeriesParams, tolerance: float = 1e-8, cutoff: int | None = None) -> SecondFactor:
    """Certified upper bound on sum_{k>=m} a_k prod_{i=m}^{k-1} b_i.

    The cutoff K doubles until the tail certificate overshoots the true tail
    by at most tolerance/2, so value - exact <= tolerance/2 + rounding.
    """
    if not params.summable or params.p_lo <= 1:
        raise ValueError("series not summable: delta must exceed (1 - lam)/(3 - lam)")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if cutoff is None:
        K = max(MIN_CUTOFF, params.m)
        while True:
            ub, lb = _tail_bounds(params, K)
            if ub - lb <= tolerance / 2:
                break
            if K >= MAX_CUTOFF:
                raise ValueError(f"tolerance {tolerance} needs a cutoff beyond {MAX_CUTOFF}")
            K *= 2
    else:
        K = max(int(cutoff), params.m)
        ub, lb = _tail_bounds(params, K)
    ks = np.arange(params.m, K + 1, dtype=np.float64)
    partial = up(math.fsum(series_terms(params, ks)), rel=0.0)
    return SecondFactor(
        value=up(partial + ub, rel=0.0),
        partial=partial,
        tail_bound=ub,
        tail_width=ub - lb,
        cutoff=K,
    )
