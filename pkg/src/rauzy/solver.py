"""Certified evaluation of the renewal condition and bisection for delta_m."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from decimal import ROUND_CEILING, Decimal
from fractions import Fraction

from rauzy import jsonio
from rauzy.rounding import threshold_interval, up
from rauzy.series import SeriesParams, second_factor
from rauzy.transition import DEFAULT_SLACK, NeumannDivergence, build_B, first_factor


class BracketError(ValueError):
    """The delta bracket does not straddle the condition boundary."""


class MonotonicityError(RuntimeError):
    """Two probes contradict the expected decrease of the LHS in delta."""


def threshold() -> float:
    """(1 - lam)/(3 - lam), the summability threshold for the tail series."""
    lo, hi = threshold_interval()
    return float((lo + hi) / 2)


def check_admissible(delta: float) -> None:
    if not (Fraction(delta) > threshold_interval()[1]):
        raise ValueError(f"delta={delta} is not above the threshold (1-lam)/(3-lam) ~ {threshold():.6f}")
    if not delta < 1:
        raise ValueError("delta must be < 1")


@dataclass(frozen=True)
class BoundConfig:
    m: int
    lo: float = 0.5
    hi: float = 0.99
    places: int = 4
    series_tol: float = 1e-8
    slack: float = DEFAULT_SLACK

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ValueError("m must be at least 2")
        if not self.lo < self.hi:
            raise ValueError("bracket must satisfy lo < hi")
        if not Fraction(self.lo) > threshold_interval()[1]:
            raise ValueError("bracket lower end must exceed (1-lam)/(3-lam)")
        if self.hi > 1:
            raise ValueError("bracket upper end must be <= 1")
        if self.places < 0:
            raise ValueError("places must be nonnegative")
        if self.series_tol <= 0 or self.slack < 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class Probe:
    m: int
    delta: float
    factor1: float
    factor2: float
    lhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= 1.0


def evaluate(m: int, delta: float, series_tol: float = 1e-8, slack: float = DEFAULT_SLACK) -> Probe:
    """Both certified factors and their upward-rounded product at (m, delta)."""
    check_admissible(delta)
    f2 = second_factor(SeriesParams(m, delta), series_tol).value
    try:
        f1 = first_factor(build_B(m, delta, slack=slack)).value
    except NeumannDivergence:
        return Probe(m, delta, math.inf, f2, math.inf)
    return Probe(m, delta, f1, f2, up(f1 * f2, rel=0.0))


def condition_lhs(m: int, delta: float, series_tol: float = 1e-8, slack: float = DEFAULT_SLACK) -> float:
    """Upper bound on the renewal LHS; +inf when the Neumann series diverges."""
    return evaluate(m, delta, series_tol, slack).lhs


@dataclass
class BoundReport:
    m: int
    delta: float  # probed delta, or delta_m rounded up to `places`
    factor1: float
    factor2: float
    lhs: float
    verdict: str  # "holds" | "fails"
    places: int | None = None
    iterations: int = 0
    bracket: tuple[float, float] | None = None
    wall_time: float = field(default=0.0, compare=False)

    @property
    def dimension_bound(self) -> float:
        return 1.0 + self.delta

    def bound_text(self) -> str:
        if self.places is None:
            return str(Decimal(1) + Decimal(repr(self.delta)))
        return str(Decimal(1) + Decimal(repr(self.delta)).quantize(Decimal(1).scaleb(-self.places)))

    def to_dict(self) -> dict:
        ann = jsonio.annotate
        return {
            "m": self.m,
            "delta": ann(self.delta, "up" if self.places is not None else "nearest"),
            "dimension_bound": self.bound_text(),
            "factor1": ann(self.factor1, "up"),
            "factor2": ann(self.factor2, "up"),
            "lhs": ann(self.lhs, "up"),
            "verdict": self.verdict,
            "places": self.places,
            "iterations": self.iterations,
            "bracket": None if self.bracket is None else [ann(x, "nearest") for x in self.bracket],
            "wall_time": ann(self.wall_time, "nearest"),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        d = jsonio.decode(d)
        return cls(
            m=d["m"],
            delta=d["delta"],
            factor1=d["factor1"],
            factor2=d["factor2"],
            lhs=d["lhs"],
            verdict=d["verdict"],
            places=d["places"],
            iterations=d["iterations"],
            bracket=None if d["bracket"] is None else tuple(d["bracket"]),
            wall_time=d["wall_time"],
        )


def probe_report(m: int, delta: float, series_tol: float = 1e-8, slack: float = DEFAULT_SLACK) -> BoundReport:
    t0 = time.perf_counter()
    pr = evaluate(m, delta, series_tol, slack)
    return BoundReport(
        m, delta, pr.factor1, pr.factor2, pr.lhs, "holds" if pr.holds else "fails",
        iterations=1, wall_time=time.perf_counter() - t0,
    )


class _Monotone:
    """Records probes and rejects any pair where the LHS grows with delta."""

    def __init__(self, rtol: float):
        self.rtol = rtol
        self.seen: list[tuple[float, float]] = []

    def add(self, delta: float, lhs: float) -> None:
        for d, v in self.seen:
            lo_d, lo_v, hi_d, hi_v = (d, v, delta, lhs) if d < delta else (delta, lhs, d, v)
            if lo_d == hi_d or math.isinf(lo_v):
                continue
            if hi_v > lo_v * (1 + self.rtol):
                raise MonotonicityError(
                    f"LHS({hi_d}) = {hi_v} exceeds LHS({lo_d}) = {lo_v}; expected a decreasing LHS"
                )
        self.seen.append((delta, lhs))


def _ceil_decimal(x: float, places: int) -> Decimal:
    return Decimal(x).quantize(Decimal(1).scaleb(-places), rounding=ROUND_CEILING)


def _float_at_most(d: Decimal) -> float:
    f = float(d)
    if Decimal(f) > d:
        f = math.nextafter(f, -math.inf)
    return f


def solve_delta(config: BoundConfig | int, places: int | None = None, progress=None) -> BoundReport:
    """Smallest certified delta, by bisection, rounded up to `places` decimals.

    The returned delta is re-certified: the LHS at (the largest double not
    above) the rounded value is <= 1.
    """
    if isinstance(config, int):
        config = BoundConfig(config) if places is None else BoundConfig(config, places=places)
    elif places is not None and places != config.places:
        config = BoundConfig(**{**asdict(config), "places": places})
    t0 = time.perf_counter()
    m = config.m
    mono = _Monotone(rtol=max(10 * config.series_tol, 1e-9))

    def lhs(d: float) -> Probe:
        pr = evaluate(m, d, config.series_tol, config.slack)
        mono.add(d, pr.lhs)
        if progress is not None:
            progress(m, d, pr.lhs)
        return pr

    lo, hi = config.lo, config.hi
    p_hi = lhs(hi)
    if not p_hi.holds:
        raise BracketError(f"m={m}: condition fails at upper end delta={hi} (LHS={p_hi.lhs:.6g}); widen the bracket")
    p_lo = lhs(lo)
    if p_lo.holds:
        raise BracketError(f"m={m}: condition already holds at lower end delta={lo} (LHS={p_lo.lhs:.6g}); lower the bracket")
    width = 10.0 ** -(config.places + 2)
    iters = 2
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if lhs(mid).holds:
            hi = mid
        else:
            lo = mid
        iters += 1
    rounded = _ceil_decimal(hi, config.places)
    d_cert = _float_at_most(rounded)
    final = lhs(d_cert) if d_cert != hi else evaluate(m, hi, config.series_tol, config.slack)
    iters += 1
    if not final.holds:
        raise BracketError(f"m={m}: rounded delta {rounded} failed re-certification (LHS={final.lhs!r})")
    return BoundReport(
        m=m,
        delta=float(rounded),
        factor1=final.factor1,
        factor2=final.factor2,
        lhs=final.lhs,
        verdict="holds",
        places=config.places,
        iterations=iters,
        bracket=(lo, hi),
        wall_time=time.perf_counter() - t0,
    )


def dimension_bound(m: int, places: int = 4) -> float:
    """Certified upper bound 1 + delta_m on the Hausdorff dimension."""
    return float(solve_delta(m, places).bound_text())
