"""Brute-force verification of the triangle and cover-sum inequalities at small depth.

Every word of a level is enumerated through the int64 kernels.  Column sums
of a length-n word are at most 2**n, so for n <= 12 all squared-distance
numerators stay below 2**53 and the float evaluations below start from exact
operands.  Exact comparisons use Python integers.  Directed rounding always
favours the inequality under test being reported as *violated*, and
violations of the transcendental checks are re-examined in mpmath before
being surfaced.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np

from rauzy import jsonio, kernels
from rauzy.geometry import area_ratio, diameter_squared, triangle_of
from rauzy.rounding import (
    COMPOUND_BUMP,
    LAMBDA,
    Rounding,
    down,
    down_array,
    fraction_to_float,
    ratio_array,
    sqrt_fraction,
    up,
    up_array,
)
from rauzy.series import SeriesParams, a_k, b_k
from rauzy.transition import build_B
from rauzy.words import StateSpace, Tag

#: default enumeration depth; 3**12 = 531441 words
ENUMERATION_CAP = 12
#: int64/float64 exactness limit of the vectorized path (see module docstring)
HARD_CAP = 12

_EPS = 2.0**-52


class CapExceeded(ValueError):
    pass


def enumeration_cost(n: int) -> str:
    words = 3**n
    mem = words * 9 * 8 * 2
    return f"{words:,} words, ~{mem / 2**20:,.0f} MiB of matrices"


def check_cap(n: int, cap: int = ENUMERATION_CAP) -> None:
    if n < 0:
        raise ValueError("level must be nonnegative")
    limit = min(cap, HARD_CAP)
    if n > limit:
        raise CapExceeded(f"level n={n} exceeds enumeration cap {limit} ({enumeration_cost(n)})")


def _simplex_area(rounding: Rounding) -> float:
    return sqrt_fraction(Fraction(3, 4), rounding)


# --------------------------------------------------------------------------- levels

_PAIRS = ((0, 1), (1, 2), (0, 2))


@dataclass(frozen=True)
class Level:
    """All 3**n word matrices of one length, in packed-code order."""

    n: int
    mats: np.ndarray  # (3**n, 3, 3) int64
    sums: np.ndarray  # (3**n, 3) column sums

    @classmethod
    def build(cls, n: int, threads: int = 1, cap: int = ENUMERATION_CAP) -> "Level":
        check_cap(n, cap)
        if threads <= 1 or n < 2:
            mats = kernels.level_matrices(n)
        else:
            # split by leading symbols; blocks are concatenated in code order
            depth = 1 if threads <= 3 else 2
            block = 3 ** (n - depth)
            starts = range(0, 3**n, block)
            codes = [np.arange(s, s + block, dtype=np.int64) for s in starts]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda c: kernels.word_matrices(c, n), codes))
            mats = np.concatenate(parts)
        return cls(n, mats, mats.sum(axis=1))

    @property
    def size(self) -> int:
        return self.mats.shape[0]

    @property
    def area_den(self) -> np.ndarray:
        """area ratio = 1/area_den (every word matrix has determinant 1)."""
        return self.sums.prod(axis=1)

    def area(self, rounding: Rounding) -> np.ndarray:
        den = self.area_den.astype(np.float64)  # < 2**36, exact
        if rounding == "nearest":
            return _simplex_area("nearest") / den
        step = math.inf if rounding == "up" else -math.inf
        return np.nextafter(_simplex_area(rounding) / den, step)

    def pair_distance2(self, a: int, b: int) -> tuple[np.ndarray, np.ndarray]:
        """Squared side between vertices a, b as num/den**2 with integer arrays."""
        sa, sb = self.sums[:, a], self.sums[:, b]
        diff = self.mats[:, :, a] * sb[:, None] - self.mats[:, :, b] * sa[:, None]
        return (diff * diff).sum(axis=1), sa * sb

    def diameter(self, rounding: Rounding) -> np.ndarray:
        """Longest side, each pair evaluated in the requested direction."""
        best = np.zeros(self.size)
        step = {"up": math.inf, "down": -math.inf}.get(rounding)
        for a, b in _PAIRS:
            num, den = self.pair_distance2(a, b)
            root = np.sqrt(num.astype(np.float64))
            if step is not None:
                root = np.nextafter(root, step)
            d = root / den.astype(np.float64)
            if step is not None:
                d = np.nextafter(d, step)
            best = np.maximum(best, d)
        return best

    def terms(self, delta: float, rounding: Rounding) -> np.ndarray:
        """area**delta * diam**(1-delta) per word, directed."""
        area = self.area(rounding)
        diam = self.diameter(rounding)
        with np.errstate(divide="ignore"):
            raw = np.power(area, delta) * np.power(diam, 1.0 - delta)
        if rounding == "up":
            return up_array(raw, COMPOUND_BUMP)
        if rounding == "down":
            return down_array(raw, COMPOUND_BUMP)
        return raw

    def vertex_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """(num, den) with coordinate j of vertex c equal to num[:, j, c] / den[:, c]."""
        return self.mats, self.sums


@lru_cache(maxsize=6)
def level(n: int) -> Level:
    return Level.build(n)


def _directed_sum(values: np.ndarray, rounding: Rounding) -> float:
    s = math.fsum(values.tolist())  # correctly rounded
    if rounding == "up":
        return math.nextafter(s, math.inf)
    if rounding == "down":
        return math.nextafter(s, -math.inf)
    return s


def _class_sums(tags: np.ndarray, values: np.ndarray, size: int, rounding: Rounding) -> np.ndarray:
    """Per-class sums with the recursive-summation error bound folded in."""
    sums = np.bincount(tags, weights=values, minlength=size)
    if rounding == "nearest":
        return sums
    counts = np.bincount(tags, minlength=size)
    rel = 1.01 * (counts + 1) * _EPS
    if rounding == "up":
        return np.nextafter(sums * (1 + rel), math.inf)
    return np.maximum(np.nextafter(sums * (1 - rel), -math.inf), 0.0)


# --------------------------------------------------------------------------- cover sums


def tag_labels(n: int, m: int) -> list[Tag]:
    """Tag of each integer class id produced by ``kernels.classify_level(n, m)``."""
    space = StateSpace(m)
    labels = [Tag("word", space.word(i)) for i in range(space.n_words)]
    labels += [Tag("run", k) for k in range(m, n)]
    labels += [Tag("constant", j) for j in (1, 2, 3)]
    return labels


@dataclass
class CoverSum:
    n: int
    delta: float
    m: int | None
    total: float  # upper bound on X_n
    total_down: float
    components: dict[str, float] = field(default_factory=dict)  # upper bounds, keyed by tag

    @property
    def partition_gap(self) -> float:
        """|sum of components - X_n| (both nearest-ish); zero up to summation error."""
        if not self.components:
            return 0.0
        return abs(math.fsum(self.components.values()) - 0.5 * (self.total + self.total_down))


def compute_cover_sums(n: int, delta: float, m: int | None = None, cap: int = ENUMERATION_CAP,
                       threads: int = 1) -> CoverSum:
    """X_n and, when n > m, its partition into components X_{n,alpha}."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    check_cap(n, cap)
    lev = Level.build(n, threads=threads, cap=cap)
    up_terms = lev.terms(delta, "up")
    out = CoverSum(n, delta, m, _directed_sum(up_terms, "up"), _directed_sum(lev.terms(delta, "down"), "down"))
    if m is not None and n > m:
        tags = kernels.classify_level(n, m)
        labels = tag_labels(n, m)
        sums = np.bincount(tags, weights=up_terms, minlength=len(labels))
        out.components = {str(t): float(v) for t, v in zip(labels, sums) if t.kind != "run" or t.value < n}
    return out


def xn_series(ns: Iterable[int], delta: float, cap: int = ENUMERATION_CAP) -> list[tuple[int, float, float]]:
    """(n, lower, upper) bounds on X_n."""
    rows = []
    for n in ns:
        cs = compute_cover_sums(n, delta, cap=cap)
        rows.append((n, cs.total_down, cs.total))
    return rows


def write_xn_csv(rows: Sequence[tuple[int, float, float]], target) -> None:
    own = isinstance(target, (str, bytes)) or hasattr(target, "__fspath__")
    fh = open(target, "w", newline="") if own else target
    try:
        w = csv.writer(fh)
        w.writerow(["n", "X_n_lower", "X_n_upper"])
        for n, lo, hi in rows:
            w.writerow([n, repr(lo), repr(hi)])
    finally:
        if own:
            fh.close()


# --------------------------------------------------------------------------- reports


@dataclass
class LemmaReport:
    """Outcome of one exhaustive check; slack is (rhs - lhs)/rhs, minimized over cases."""

    lemma: str
    n: int | None
    m: int | None
    delta: float | None
    checked_count: int = 0
    worst_slack: float = math.inf
    violations: list[dict] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, lhs: np.ndarray, rhs: np.ndarray, where: Sequence[str] | None = None,
               refine=None) -> None:
        """Fold a batch of lhs <= rhs comparisons into the report.

        ``refine(i) -> (lhs, rhs, holds)`` re-decides case i exactly or at high
        precision; it is consulted only for apparent violations.
        """
        lhs = np.asarray(lhs, dtype=np.float64)
        rhs = np.asarray(rhs, dtype=np.float64)
        self.checked_count += lhs.size
        if not lhs.size:
            return
        with np.errstate(divide="ignore", invalid="ignore"):
            slack = np.where(rhs > 0, (rhs - lhs) / rhs, np.where(lhs <= 0, 0.0, -np.inf))
        bad = np.flatnonzero(lhs > rhs)
        refined = 0
        for i in bad:
            lo, hi = float(lhs[i]), float(rhs[i])
            if refine is not None:
                lo, hi, holds = refine(int(i))
                refined += 1
                if holds:
                    slack[i] = (hi - lo) / hi if hi > 0 else 0.0
                    continue
            self.violations.append({"case": where[i] if where is not None else int(i), "lhs": lo, "rhs": hi})
        if refined:
            self.info["refined"] = self.info.get("refined", 0) + refined
        self.worst_slack = min(self.worst_slack, float(slack.min()))

    def to_dict(self) -> dict:
        d = jsonio.encode(asdict(self), jsonio.rounding_by_name)
        d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "LemmaReport":
        d = jsonio.decode(d)
        return cls(d["lemma"], d["n"], d["m"], d["delta"], d["checked_count"], d["worst_slack"],
                   list(d["violations"]), dict(d.get("info", {})))


def _word_str(code: int, n: int) -> str:
    if n == 0:
        return "()"
    return "".join(str(int(c) + 1) for c in np.base_repr(code, 3).zfill(n))


# --------------------------------------------------------------------------- single triangles


def _prefixed(parent: Level, child: Level, j: int) -> np.ndarray:
    """Rows of the child level holding the words j + i for every parent word i."""
    return np.arange(parent.size, dtype=np.int64) + (j - 1) * parent.size


def _max_coordinate(lev: Level, j: int) -> tuple[np.ndarray, np.ndarray]:
    num, den = kernels.vertex_max(lev.mats)
    return num[:, j - 1], den[:, j - 1]


def verify_area_contraction(n: int, cap: int = ENUMERATION_CAP) -> LemmaReport:
    """area(j i)/area(i) <= max over the triangle of (2 - x_j)**-3, exactly."""
    check_cap(n + 1, cap)
    rep = LemmaReport("area-contraction", n, None, None)
    par, ch = level(n), level(n + 1)
    p_par = par.area_den.astype(object)
    for j in (1, 2, 3):
        num, den = _max_coordinate(par, j)
        p_ch = ch.area_den[_prefixed(par, ch, j)].astype(object)
        gap, den = (2 * den - num).astype(object), den.astype(object)
        # p_par/p_ch <= den**3/gap**3
        lhs = p_par * gap**3
        rhs = p_ch * den**3
        ok = lhs <= rhs
        rep.checked_count += par.size
        diff = np.array([float(Fraction(int(r - l), int(r))) for l, r in zip(lhs, rhs)])
        rep.worst_slack = min(rep.worst_slack, float(diff.min()))
        for i in np.flatnonzero(~ok.astype(bool)):
            rep.violations.append({"case": f"j={j} i={_word_str(int(i), n)}", "lhs": float(lhs[i]), "rhs": float(rhs[i])})
    return rep


def _refine_diameter(word: tuple[int, ...], j: int) -> tuple[float, float]:
    with mpmath.workdps(50):
        big = triangle_of((j,) + word)
        small = triangle_of(word)
        ratio = mpmath.sqrt(mpmath.mpf(diameter_squared(big).numerator) / diameter_squared(big).denominator) / \
            mpmath.sqrt(mpmath.mpf(diameter_squared(small).numerator) / diameter_squared(small).denominator)
        x = max(v[j] for v in small.vertices)
        lam = mpmath.mpf(3) / 2 - 1 / mpmath.sqrt(3)
        bound = (2 - mpmath.mpf(x.numerator) / x.denominator) ** (-lam)
        return float(ratio), float(bound), bool(ratio <= bound)


def verify_diameter_contraction(n: int, cap: int = ENUMERATION_CAP) -> LemmaReport:
    """diam(j i)/diam(i) <= max over the triangle of (2 - x_j)**-lam, directed."""
    check_cap(n + 1, cap)
    rep = LemmaReport("diameter-contraction", n, None, None)
    par, ch = level(n), level(n + 1)
    d_par = par.diameter("down")
    d_ch_all = ch.diameter("up")
    lam_up = LAMBDA.value("up")
    for j in (1, 2, 3):
        num, den = _max_coordinate(par, j)
        lhs = up_array(d_ch_all[_prefixed(par, ch, j)] / d_par, 0.0)
        base = ratio_array(den, 2 * den - num, "down")  # (2 - x)**-1 <= 1
        rhs = down_array(np.power(base, lam_up))

        def refine(i, j=j):
            word = tuple(int(c) + 1 for c in np.base_repr(i, 3).zfill(n)) if n else ()
            return _refine_diameter(word, j)

        names = None
        if (lhs > rhs).any():
            names = [f"j={j} i={_word_str(i, n)}" for i in range(par.size)]
        rep.record(lhs, rhs, names, refine)
    return rep


def verify_lemma33(n: int, delta: float = 0.7415, cap: int = ENUMERATION_CAP) -> LemmaReport:
    """The three coordinate bounds on A_{n,k} for every k in [1, n-1]."""
    check_cap(n, cap)
    rep = LemmaReport("coordinate-bound", n, None, delta)
    if n < 2:
        return rep
    lev = level(n)
    runs = kernels.leading_runs(np.arange(lev.size, dtype=np.int64), n)
    first = np.arange(lev.size, dtype=np.int64) // 3 ** (n - 1) + 1
    vnum, vden = kernels.vertex_max(lev.mats)
    inner = runs < n
    ks = runs[inner]
    sym = first[inner]
    idx = np.flatnonzero(inner)
    names = [_word_str(int(i), n) for i in idx]
    rows = np.arange(idx.size)
    # (a) own coordinate: den/(2den - num) <= (k+2)/(k+3)
    num = vnum[idx, sym - 1]
    den = vden[idx, sym - 1]
    lhs = den * (ks + 3)
    rhs = (ks + 2) * (2 * den - num)
    a_rep = LemmaReport("coordinate-bound-a", n, None, None)
    a_rep.record(lhs.astype(np.float64), rhs.astype(np.float64), names)
    # (b) each other coordinate: den/(2den - num) <= (k+1)/(2k+1)
    b_rep = LemmaReport("coordinate-bound-b", n, None, None)
    others = [((sym % 3) + 1), (((sym + 1) % 3) + 1)]
    for oth in others:
        num = vnum[idx, oth - 1]
        den = vden[idx, oth - 1]
        b_rep.record((den * (2 * ks + 1)).astype(np.float64), ((ks + 1) * (2 * den - num)).astype(np.float64), names)
    # (c) max over vertices of (2-x_j)^-3d + (2-x_l)^-3d, convex so attained at a vertex
    e_lo = fraction_to_float(3 * Fraction(delta), "down")
    e_hi = fraction_to_float(3 * Fraction(delta), "up")
    mats, sums = lev.mats[idx], lev.sums[idx]
    worst = np.zeros(idx.size)
    for c in range(3):
        s = sums[:, c]
        tot = np.zeros(idx.size)
        for oth in others:
            m_jc = mats[rows, oth - 1, c]
            base = ratio_array(s, 2 * s - m_jc, "up")
            tot = tot + up_array(np.power(base, e_lo))
        worst = np.maximum(worst, up_array(tot))
    r = ratio_array(ks + 1, 2 * ks + 1, "down")
    rhs_c = down_array(down_array(np.power(r, e_hi)) + down(8.0 ** (-delta)))
    def refine(i):
        # exact dominance: sorted vertex bases below ((k+1)/(2k+1), 1/2) settle ties
        k = int(ks[i])
        r_exact = Fraction(k + 1, 2 * k + 1)
        dominated = True
        for c in range(3):
            s = int(sums[i, c])
            u = sorted((Fraction(s, 2 * s - int(mats[i, oth[i] - 1, c])) for oth in others), reverse=True)
            dominated &= u[0] <= r_exact and u[1] <= Fraction(1, 2)
        if dominated:
            return float(worst[i]), float(rhs_c[i]), True
        with mpmath.workdps(60):
            e = 3 * mpmath.mpf(delta)
            lhs_mp = max(
                sum((mpmath.mpf(int(sums[i, c])) / (2 * int(sums[i, c]) - int(mats[i, oth[i] - 1, c]))) ** e
                    for oth in others)
                for c in range(3)
            )
            rhs_mp = (mpmath.mpf(k + 1) / (2 * k + 1)) ** e + mpmath.mpf(8) ** (-mpmath.mpf(delta))
            return float(lhs_mp), float(rhs_mp), bool(lhs_mp <= rhs_mp)

    c_rep = LemmaReport("coordinate-bound-c", n, None, delta)
    c_rep.record(worst, rhs_c, names, refine)
    rep.info.update({k: v for k, v in c_rep.info.items()})
    for part in (a_rep, b_rep, c_rep):
        rep.checked_count += part.checked_count
        rep.worst_slack = min(rep.worst_slack, part.worst_slack)
        rep.violations.extend({**v, "bound": part.lemma[-1]} for v in part.violations)
        rep.info[f"worst_slack_{part.lemma[-1]}"] = part.worst_slack
    return rep


# --------------------------------------------------------------------------- class sums


def _run_sums(lev: Level, delta: float, rounding: Rounding) -> np.ndarray:
    """X_{n,k} for k = 0..n (k = n collects the constant words), directed."""
    runs = kernels.leading_runs(np.arange(lev.size, dtype=np.int64), lev.n)
    return _class_sums(runs, lev.terms(delta, rounding), lev.n + 1, rounding)


def verify_number_lemma(n: int, delta: float, m: int | None = None, k_min: int = 1,
                        cap: int = ENUMERATION_CAP) -> LemmaReport:
    """X_{n+1,k+1} <= b_k X_{n,k} for k_min <= k <= n-1."""
    check_cap(n + 1, cap)
    rep = LemmaReport("number-lemma", n, m, delta)
    if n < 2:
        return rep
    lower = _run_sums(level(n), delta, "down")
    upper = _run_sums(level(n + 1), delta, "up")
    params = SeriesParams(max(m or 2, 1), delta)
    ks = list(range(max(k_min, 1), n))
    lhs = np.array([upper[k + 1] for k in ks])
    rhs = np.array([down(b_k(params, k, "down") * lower[k]) for k in ks])
    rep.record(lhs, rhs, [f"k={k}" for k in ks])
    return rep


def c_n(n: int, delta: float, rounding: Rounding = "down") -> float:
    """6 area**delta diam**(1-delta) of the triangle of (2, 1^n), from exact vertices."""
    word = (2,) + (1,) * n
    with mpmath.workdps(40):
        ar = area_ratio(word)
        d2 = diameter_squared(triangle_of(word))
        area = mpmath.sqrt(mpmath.mpf(3)) / 2 * mpmath.mpf(ar.numerator) / ar.denominator
        diam = mpmath.sqrt(mpmath.mpf(d2.numerator) / d2.denominator)
        v = float(6 * area**delta * diam ** (1 - mpmath.mpf(delta)))
    return up(v, COMPOUND_BUMP) if rounding == "up" else down(v, COMPOUND_BUMP) if rounding == "down" else v


def verify_word_lemma(n: int, delta: float, m: int, cap: int = ENUMERATION_CAP) -> LemmaReport:
    """Both Word Lemma inequalities for the class sums of level n + 1."""
    if n <= m:
        raise ValueError("the Word Lemma needs n > m")
    check_cap(n + 1, cap)
    rep = LemmaReport("word-lemma", n, m, delta)
    space = StateSpace(m)
    nw, N = space.n_words, space.size
    par, ch = level(n), level(n + 1)
    x_par = _class_sums(kernels.classify_level(n, m), par.terms(delta, "down"), nw + (n - m) + 3, "down")
    x_ch = _class_sums(kernels.classify_level(n + 1, m), ch.terms(delta, "up"), nw + (n + 1 - m) + 3, "up")
    # first inequality: renewal word
    params = SeriesParams(m, delta)
    cn = c_n(n, delta, "down")
    acc = [cn] + [down(a_k(params, k, "down") * x_par[nw + (k - m)]) for k in range(m, n)]
    rhs_star = down(math.fsum(acc), (len(acc) + 1) * _EPS)
    rep.record(np.array([x_ch[0]]), np.array([rhs_star]), ["star"])
    rep.info["c_n"] = cn
    # second inequality: every other state, including the m-state
    B = build_B(m, delta, rounding="down").matrix
    width = int(np.diff(B.tocsr().indptr).max())
    rhs = B @ x_par[:N]
    rhs = np.maximum(down_array(rhs, 1.01 * (width + 2) * _EPS), 0.0)
    lhs = x_ch[1:N]
    names = ["".join(map(str, space.word(v))) if v < nw else "m-state" for v in range(1, N)]
    rep.record(lhs, rhs[1:N], names)
    return rep


def cn_ratio(n: int, delta: float) -> float:
    """c_n / c_{2n}; tends to 2**(1+delta) since c_n ~ n**(-1-delta)."""
    return c_n(n, delta, "nearest") / c_n(2 * n, delta, "nearest")


# --------------------------------------------------------------------------- covers and decay


def _ceil_sqrt_ratio(a: int, b: int) -> int:
    """Smallest integer c >= 0 with c*c*b >= a."""
    c = math.isqrt(a // b)
    while c * c * b < a:
        c += 1
    return c


def verify_cover_construction(n: int, delta: float, cap: int = ENUMERATION_CAP) -> LemmaReport:
    """The disk cover of each level-n triangle and its (1+delta)-cost.

    A triangle with longest side d and area A sits in a d x (2A/d) rectangle
    (the altitude foot lies on the longest side), which ceil(d**2/A) disks of
    diameter 4A/d cover.  Since the count is rounded up, the cost is bounded
    by 4**(1+delta) X_n plus one extra disk per triangle.
    """
    check_cap(n, cap)
    rep = LemmaReport("cover", n, None, delta)
    lev = level(n)
    P = lev.area_den
    mats, sums = lev.mats, lev.sums
    pair = [lev.pair_distance2(a, b) for a, b in _PAIRS]
    counts = np.empty(lev.size, dtype=np.int64)
    longest = np.empty(lev.size, dtype=np.int64)
    geometry_ok = 0
    for i in range(lev.size):
        # exact longest side: compare num/den**2 across pairs
        best = 0
        for t in (1, 2):
            nb, db = int(pair[best][0][i]), int(pair[best][1][i])
            nt, dt = int(pair[t][0][i]), int(pair[t][1][i])
            if nt * db * db > nb * dt * dt:
                best = t
        longest[i] = best
        num, den = int(pair[best][0][i]), int(pair[best][1][i])
        p = int(P[i])
        # d**2/A = 2 num p / (sqrt(3) den**2); its ceiling via squares
        counts[i] = _ceil_sqrt_ratio(4 * num * num * p * p, 3 * den**4)
        # altitude foot inside the longest side: both adjacent angles non-obtuse
        a, b = _PAIRS[best]
        c = 3 - a - b
        s = [int(x) for x in sums[i]]
        col = [[int(mats[i, r, k]) for r in range(3)] for k in range(3)]

        def rel(u, v):
            return [col[u][r] * s[v] - col[v][r] * s[u] for r in range(3)]

        dot_a = sum(x * y for x, y in zip(rel(c, a), rel(b, a)))
        dot_b = sum(x * y for x, y in zip(rel(c, b), rel(a, b)))
        # one disk per cell: spacing d/N must satisfy (d/N)**2 <= 3 (2A/d)**2, i.e. d**2 P <= 3N
        cell_ok = num * p <= 3 * int(counts[i]) * den * den
        geometry_ok += dot_a >= 0 and dot_b >= 0 and cell_ok
        if not (dot_a >= 0 and dot_b >= 0 and cell_ok):
            rep.violations.append({"case": _word_str(i, n), "lhs": float("nan"), "rhs": float("nan"),
                                   "bound": "geometry"})
    rep.checked_count += lev.size
    # disk diameters 4A/d and cost inequality
    e = 1.0 + delta
    w_up = up_array(np.power(up_array(4.0 * lev.area("up") / lev.diameter("down")), e), COMPOUND_BUMP)
    w_dn = down_array(np.power(down_array(4.0 * lev.area("down") / lev.diameter("up")), e), COMPOUND_BUMP)
    four = down(4.0**e)
    terms_dn = lev.terms(delta, "down")
    lhs = up_array(counts * w_up, 0.0)
    rhs = down_array(down_array(four * terms_dn, 0.0) + w_dn, 0.0)
    rep.record(lhs, rhs, [_word_str(i, n) for i in range(lev.size)] if (lhs > rhs).any() else None)
    # identity (d**2/A) (4A/d)**(1+delta) = 4**(1+delta) A**delta d**(1-delta)
    area, diam = lev.area("nearest"), lev.diameter("nearest")
    frac = diam**2 / area * np.power(4 * area / diam, e)
    ident = np.abs(frac / (4.0**e * lev.terms(delta, "nearest")) - 1.0)
    cost_up = _directed_sum(lhs, "up")
    xn_dn = _directed_sum(terms_dn, "down")
    rep.info.update(
        disks=int(counts.sum()),
        cover_cost=cost_up,
        bound=down(four * xn_dn),
        ceiling_overhead=_directed_sum(w_up, "up"),
        literal_bound_holds=bool(cost_up <= down(four * xn_dn)),
        identity_rel_error=float(ident.max()),
        geometry_checked=int(geometry_ok),
    )
    return rep


def verify_decay(delta: float, ns: Iterable[int] = range(1, 11), cap: int = ENUMERATION_CAP) -> LemmaReport:
    """X_{n+1} < X_n strictly, with upper/lower bounds on the two sides."""
    rows = xn_series(ns, delta, cap)
    rep = LemmaReport("decay", rows[-1][0] if rows else None, None, delta)
    lhs = np.array([r[2] for r in rows[1:]])
    rhs = np.array([r[1] for r in rows[:-1]])
    rep.record(lhs, rhs, [f"n={r[0]}" for r in rows[1:]])
    strict = lhs < rhs
    for i in np.flatnonzero(~strict & (lhs <= rhs)):
        rep.violations.append({"case": f"n={rows[i + 1][0]}", "lhs": float(lhs[i]), "rhs": float(rhs[i])})
    rep.info["series"] = [{"n": n, "lower": lo, "upper": hi} for n, lo, hi in rows]
    return rep


def verify_renewal_constant(n: int, delta: float, m: int, cap: int = ENUMERATION_CAP) -> LemmaReport:
    """Informational: X_{n+m+1, star} >= K**((1+delta)(m+1)) X_n with K = 2**(lam-3)."""
    check_cap(n + m + 1, cap)
    rep = LemmaReport("renewal-constant", n, m, delta)
    top = n + m + 1
    lev = level(top)
    star = _class_sums(kernels.classify_level(top, m), lev.terms(delta, "down"), 1, "down")[0] \
        if top > m else 0.0
    K = 2.0 ** (LAMBDA.value("down") - 3)
    C = down(K ** ((1 + delta) * (m + 1)), COMPOUND_BUMP)
    xn = compute_cover_sums(n, delta, cap=cap).total
    rep.record(np.array([up(C * xn)]), np.array([star]), ["star"])
    rep.info.update(C=C, X_n=xn, X_star=float(star))
    return rep


# --------------------------------------------------------------------------- suites

LEMMA_SUITE_DELTAS = (0.5, 0.7415, 0.9)
LEMMA_SUITE_MS = (2, 3)


def _combine(name: str, parts: list[LemmaReport], m=None, delta=None) -> LemmaReport:
    rep = LemmaReport(name, max((p.n for p in parts if p.n is not None), default=None), m, delta)
    for p in parts:
        rep.checked_count += p.checked_count
        rep.worst_slack = min(rep.worst_slack, p.worst_slack)
        rep.violations.extend({**v, "n": p.n} for v in p.violations)
        if p.info.get("refined"):
            rep.info["refined"] = rep.info.get("refined", 0) + p.info["refined"]
    return rep


def lemma_suite(max_len: int = 7, deltas: Sequence[float] = LEMMA_SUITE_DELTAS,
                ms: Sequence[int] = LEMMA_SUITE_MS, cap: int = ENUMERATION_CAP) -> list[LemmaReport]:
    """Exhaustive triangle and class-sum lemmas for every word of length <= max_len.

    The contraction checks compare i with j i for |i| < max_len, the
    coordinate bounds cover |i| <= max_len, and the number and word lemmas
    compare levels n and n + 1 <= max_len.
    """
    check_cap(max_len, cap)
    out = [
        _combine("area-contraction", [verify_area_contraction(n, cap) for n in range(0, max_len)]),
        _combine("diameter-contraction", [verify_diameter_contraction(n, cap) for n in range(0, max_len)]),
    ]
    for d in deltas:
        out.append(_combine("coordinate-bound", [verify_lemma33(n, d, cap) for n in range(2, max_len + 1)], delta=d))
    for m in ms:
        for d in deltas:
            out.append(_combine("number-lemma", [verify_number_lemma(n, d, m, cap=cap) for n in range(2, max_len)],
                                m=m, delta=d))
            out.append(_combine("word-lemma", [verify_word_lemma(n, d, m, cap) for n in range(m + 1, max_len)],
                                m=m, delta=d))
    return out
