"""The one-variable functions behind the diameter exponent lam and their checks.

    alpha(t) = sqrt(t^2 - 5t + 7)
    f(t)     = (2t^2 - 7t + 8 + 2(1-t) alpha(t)) / (3 (2-t)^4)
    g(t)     = f(t) (2-t)^(2 lam)
    h(t)     = the numerator of g'(t), a polynomial in t, alpha(t), sqrt(3)

Each evaluator takes an mpmath context: ``mpmath.mp`` for plain
multiprecision values, ``mpmath.iv`` for rigorous enclosures.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import iv

from rauzy.oracle import LemmaReport

DPS = 30


@contextmanager
def _iv_dps(dps: int):
    saved = iv.dps
    iv.dps = dps
    try:
        yield
    finally:
        iv.dps = saved


def _ctx_num(ctx, t):
    if isinstance(t, Fraction):
        return ctx.mpf(t.numerator) / t.denominator
    return ctx.mpf(t)


def lam(ctx=mpmath.mp):
    return ctx.mpf(3) / 2 - 1 / ctx.sqrt(3)


def alpha(t, ctx=mpmath.mp):
    t = _ctx_num(ctx, t)
    return ctx.sqrt(t * t - 5 * t + 7)


def f(t, ctx=mpmath.mp):
    t = _ctx_num(ctx, t)
    return (2 * t * t - 7 * t + 8 + 2 * (1 - t) * alpha(t, ctx)) / (3 * (2 - t) ** 4)


def g(t, ctx=mpmath.mp):
    t = _ctx_num(ctx, t)
    return f(t, ctx) * (2 - t) ** (2 * lam(ctx))


def g_closed(t, ctx=mpmath.mp):
    """The same function written with the exponent -1 - 2/sqrt(3) collected."""
    t = _ctx_num(ctx, t)
    return (2 - t) ** (-1 - 2 / ctx.sqrt(3)) * (2 * t * t - 7 * t + 8 + 2 * (1 - t) * alpha(t, ctx)) / 3


def h(t, ctx=mpmath.mp):
    t = _ctx_num(ctx, t)
    r3 = ctx.sqrt(3)
    a = alpha(t, ctx)
    return ((6 - 4 * r3) * t**3
            + ((4 * r3 - 6) * a + 24 * r3 - 39) * t**2
            + ((24 - 14 * r3) * a - 48 * r3 + 87) * t
            + (16 * r3 - 18) * a
            + 28 * r3 - 72)


def h_lower_unscaled(t, ctx=mpmath.mp):
    """(5 sqrt3 + 8 + (2 - sqrt3) t^2 (t+1) - 3 (sqrt3 + 2) t) (1-t)^2."""
    t = _ctx_num(ctx, t)
    r3 = ctx.sqrt(3)
    return (5 * r3 + 8 + (2 - r3) * t * t * (t + 1) - 3 * (r3 + 2) * t) * (1 - t) ** 2


#: h/(1-t)^2 tends to 1/8 of the unscaled polynomial as t -> 1; without the
#: factor the bound already fails at t = 0 (h(0) ~ 2.195 < 5 sqrt3 + 8)
H_LOWER_SCALE = Fraction(1, 8)


def h_lower(t, ctx=mpmath.mp):
    """Polynomial minorant of h on [0, 1]."""
    return h_lower_unscaled(t, ctx) * H_LOWER_SCALE.numerator / H_LOWER_SCALE.denominator


def g_prime(t, ctx=mpmath.mp):
    t = _ctx_num(ctx, t)
    return h(t, ctx) / alpha(t, ctx) / 9 * (2 - t) ** (-2 - 2 / ctx.sqrt(3))


def g_at_zero(ctx=mpmath.mp):
    """((8 + 2 sqrt7)/48) 2^(2 lam)."""
    return (8 + 2 * ctx.sqrt(7)) / 48 * ctx.mpf(2) ** (2 * lam(ctx))


# Taylor polynomials of alpha at t = 1, with sqrt(3) cleared
def taylor_lower_sq(t: Fraction) -> Fraction:
    """((t^3 - t^2 - 25t + 73)/(16 sqrt3))^2, exactly."""
    return Fraction((t**3 - t**2 - 25 * t + 73) ** 2, 768)


def taylor_upper_sq(t: Fraction) -> Fraction:
    """((t^2 - 14t + 37)/(8 sqrt3))^2, exactly."""
    return Fraction((t**2 - 14 * t + 37) ** 2, 192)


def alpha_sq(t: Fraction) -> Fraction:
    return t * t - 5 * t + 7


@dataclass(frozen=True)
class AppendixFunctions:
    """Evaluators of f, g, h, alpha in a chosen mpmath context."""

    ctx: object = mpmath.mp

    def __getattr__(self, name: str) -> Callable:
        fn = {"f": f, "g": g, "h": h, "alpha": alpha, "h_lower": h_lower}.get(name)
        if fn is None:
            raise AttributeError(name)
        return lambda t: fn(t, self.ctx)


class _QSqrt3:
    """a + b sqrt(3) with rational a, b: exact arithmetic at t = 1, where alpha = sqrt(3)."""

    def __init__(self, a, b=0):
        self.a, self.b = Fraction(a), Fraction(b)

    def __add__(self, o):
        o = o if isinstance(o, _QSqrt3) else _QSqrt3(o)
        return _QSqrt3(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = o if isinstance(o, _QSqrt3) else _QSqrt3(o)
        return _QSqrt3(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return _QSqrt3(o) - self

    def __mul__(self, o):
        o = o if isinstance(o, _QSqrt3) else _QSqrt3(o)
        return _QSqrt3(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = _QSqrt3(1)
        for _ in range(e):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0


def h_at_one_exact() -> _QSqrt3:
    r3 = _QSqrt3(0, 1)
    t = _QSqrt3(1)
    a = r3  # alpha(1) = sqrt(1 - 5 + 7)
    return ((6 - 4 * r3) * t**3 + ((4 * r3 - 6) * a + 24 * r3 - 39) * t**2
            + ((24 - 14 * r3) * a - 48 * r3 + 87) * t + (16 * r3 - 18) * a + 28 * r3 - 72)


def g_at_one_exact() -> Fraction:
    """At t = 1 the alpha term carries the factor (1 - t) and (2 - t)^(2 lam) = 1."""
    t = Fraction(1)
    return (2 * t * t - 7 * t + 8) / (3 * (2 - t) ** 4)


def verify_g_monotone(samples: int = 10_000) -> LemmaReport:
    """g(t_i) < g(t_{i+1}) on an even grid, with interval enclosures, and g <= g(1) = 1."""
    if samples < 1000:
        raise ValueError("at least 10^3 samples are required")
    rep = LemmaReport("appendix-g", samples, None, None)
    with _iv_dps(DPS):
        prev = None
        worst = float("inf")
        for i in range(samples):
            gi = g(Fraction(i, samples - 1), iv)
            if gi.b > 1:
                rep.violations.append({"case": f"t={i}/{samples - 1}", "lhs": float(gi.b), "rhs": 1.0})
            if prev is not None:
                gap = gi.a - prev.b
                worst = min(worst, float(gap))
                if not gap > 0:
                    rep.violations.append({"case": f"t={i}/{samples - 1}", "lhs": float(prev.b), "rhs": float(gi.a)})
            rep.checked_count += 1
            prev = gi
        g0 = g_at_zero(iv)
        rep.info.update(g0_lower=float(g0.a), g0_upper=float(g0.b))
    g1 = g_at_one_exact()
    rep.info["g1"] = str(g1)
    if g1 != 1:
        rep.violations.append({"case": "t=1", "lhs": float(g1), "rhs": 1.0})
    rep.worst_slack = worst
    return rep


def verify_taylor_sandwich(points: int = 1000) -> LemmaReport:
    """Lower and upper Taylor bounds on alpha at rational t = i/(points-1), squared and exact."""
    rep = LemmaReport("appendix-taylor", points, None, None)
    worst = Fraction(10**9)
    for i in range(points):
        t = Fraction(i, points - 1)
        # both polynomials are positive on [0, 1], so squaring preserves order
        lo_poly = t**3 - t**2 - 25 * t + 73
        hi_poly = t**2 - 14 * t + 37
        a2 = alpha_sq(t)
        for name, ok, gap in (
            ("lower", lo_poly > 0 and taylor_lower_sq(t) <= a2, a2 - taylor_lower_sq(t)),
            ("upper", hi_poly > 0 and a2 <= taylor_upper_sq(t), taylor_upper_sq(t) - a2),
        ):
            rep.checked_count += 1
            worst = min(worst, gap)
            if not ok:
                rep.violations.append({"case": f"{name} t={t}", "lhs": float(a2), "rhs": float(gap)})
    rep.worst_slack = float(worst)
    rep.info["equal_at_one"] = taylor_lower_sq(Fraction(1)) == alpha_sq(Fraction(1)) == taylor_upper_sq(Fraction(1))
    return rep


def verify_h_bound(points: int = 1000) -> LemmaReport:
    """h(t) >= polynomial minorant on [0, 1) by intervals, and h(1) = 0 exactly."""
    rep = LemmaReport("appendix-h", points, None, None)
    worst = float("inf")
    unscaled_fails = 0
    with _iv_dps(DPS):
        for i in range(points):
            t = Fraction(i, points)
            lhs, rhs = h(t, iv), h_lower(t, iv)
            rep.checked_count += 1
            gap = lhs.a - rhs.b
            worst = min(worst, float(gap))
            if not gap >= 0:
                rep.violations.append({"case": f"t={t}", "lhs": float(lhs.a), "rhs": float(rhs.b)})
            if not rhs.a > 0:
                rep.violations.append({"case": f"minorant t={t}", "lhs": float(rhs.a), "rhs": 0.0})
            unscaled_fails += bool(lhs.b < h_lower_unscaled(t, iv).a)
    h1 = h_at_one_exact()
    rep.checked_count += 1
    if not h1.is_zero():
        rep.violations.append({"case": "t=1", "lhs": float(h1.a), "rhs": 0.0})
    rep.worst_slack = worst
    rep.info.update(scale=str(H_LOWER_SCALE), unscaled_failures=unscaled_fails)
    return rep


def verify_appendix(samples: int = 10_000, points: int = 1000) -> list[LemmaReport]:
    return [verify_g_monotone(samples), verify_taylor_sandwich(points), verify_h_bound(points)]
