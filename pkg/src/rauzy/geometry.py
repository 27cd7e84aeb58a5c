"""Exact geometry of the maps T1, T2, T3 and the triangles they generate.

Each ``T_j`` lifts to an integer 3x3 matrix ``M_j``: ``T_j(x)`` is ``M_j x``
rescaled to coordinate sum 1.  A word ``(i1, ..., in)`` acts as
``T_i1 o ... o T_in`` with matrix ``M_i1 @ ... @ M_in``; the vertices of its
image triangle are the normalized columns of that product.

Areas are reported as ratios to the area of the full simplex; lengths use the
Euclidean metric of R^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from rauzy.rounding import Rounding, fraction_to_float, sqrt_fraction

Word = tuple[int, ...]

#: area of the simplex {x >= 0, x1 + x2 + x3 = 1} in R^3 (side sqrt 2)
SIMPLEX_AREA = math.sqrt(3) / 2


def as_word(word: Iterable[int]) -> Word:
    w = tuple(int(s) for s in word)
    for s in w:
        if s not in (1, 2, 3):
            raise ValueError(f"invalid symbol {s!r}; symbols are 1, 2, 3")
    return w


@dataclass(frozen=True)
class BarycentricPoint:
    x1: Fraction
    x2: Fraction
    x3: Fraction

    def __post_init__(self) -> None:
        for name in ("x1", "x2", "x3"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.x1 + self.x2 + self.x3 != 1:
            raise ValueError("barycentric coordinates must sum to 1")
        if min(self.x1, self.x2, self.x3) < 0:
            raise ValueError("barycentric coordinates must be nonnegative")

    @property
    def coords(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.x1, self.x2, self.x3)

    def __getitem__(self, j: int) -> Fraction:
        """1-based coordinate access, matching symbol labels."""
        return self.coords[j - 1]

    @classmethod
    def normalize(cls, v: Sequence[int | Fraction]) -> "BarycentricPoint":
        s = sum(v)
        if s <= 0:
            raise ValueError("vector has no positive normalization")
        return cls(*(Fraction(c) / s for c in v))


@dataclass(frozen=True)
class IntegerMatrix3:
    rows: tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]

    def __matmul__(self, other: "IntegerMatrix3") -> "IntegerMatrix3":
        a, b = self.rows, other.rows
        return IntegerMatrix3(
            tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3))
        )

    def apply(self, v: Sequence) -> tuple:
        return tuple(sum(self.rows[i][k] * v[k] for k in range(3)) for i in range(3))

    def column(self, c: int) -> tuple[int, int, int]:
        return (self.rows[0][c], self.rows[1][c], self.rows[2][c])

    def column_sums(self) -> tuple[int, int, int]:
        return tuple(sum(self.rows[i][c] for i in range(3)) for c in range(3))

    def det(self) -> int:
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


IDENTITY = IntegerMatrix3(((1, 0, 0), (0, 1, 0), (0, 0, 1)))


def generator_matrix(j: int) -> IntegerMatrix3:
    """Linear lift of T_j: row j is all ones, the rest is the identity."""
    if j not in (1, 2, 3):
        raise ValueError(f"invalid symbol {j!r}; symbols are 1, 2, 3")
    rows = [[int(r == c) for c in range(3)] for r in range(3)]
    rows[j - 1] = [1, 1, 1]
    return IntegerMatrix3(tuple(tuple(r) for r in rows))


_GENERATORS = {j: generator_matrix(j) for j in (1, 2, 3)}


def apply_map(j: int, x: BarycentricPoint) -> BarycentricPoint:
    """T_j evaluated with its closed-form rational expression."""
    if j not in (1, 2, 3):
        raise ValueError(f"invalid symbol {j!r}")
    denom = 2 - x[j]
    return BarycentricPoint(*((1 if c == j else x[c]) / denom for c in (1, 2, 3)))


def word_matrix(word: Iterable[int]) -> IntegerMatrix3:
    m = IDENTITY
    for s in as_word(word):
        m = m @ _GENERATORS[s]
    return m


@dataclass(frozen=True)
class Triangle:
    v1: BarycentricPoint
    v2: BarycentricPoint
    v3: BarycentricPoint
    word: Word = ()

    @property
    def vertices(self) -> tuple[BarycentricPoint, BarycentricPoint, BarycentricPoint]:
        return (self.v1, self.v2, self.v3)


def triangle_of(word: Iterable[int]) -> Triangle:
    w = as_word(word)
    m = word_matrix(w)
    return Triangle(*(BarycentricPoint.normalize(m.column(c)) for c in range(3)), word=w)


def area_ratio(word: Iterable[int]) -> Fraction:
    """area(Delta_word)/area(Delta) = |det M| / (product of column sums of M)."""
    m = word_matrix(word)
    c1, c2, c3 = m.column_sums()
    return Fraction(abs(m.det()), c1 * c2 * c3)


def shoelace_area_ratio(tri: Triangle) -> Fraction:
    """Area ratio from the planar chart (x1, x2); the reference simplex has chart area 1/2."""
    (a1, a2), (b1, b2), (c1, c2) = ((v.x1, v.x2) for v in tri.vertices)
    twice = abs((b1 - a1) * (c2 - a2) - (c1 - a1) * (b2 - a2))
    return twice  # (twice / 2) / (1/2)


def _dist2(p: BarycentricPoint, q: BarycentricPoint) -> Fraction:
    return sum((a - b) ** 2 for a, b in zip(p.coords, q.coords))


def diameter_squared(tri: Triangle) -> Fraction:
    a, b, c = tri.vertices
    return max(_dist2(a, b), _dist2(b, c), _dist2(a, c))


def diameter(tri: Triangle, rounding: Rounding = "up") -> float:
    """Longest side in R^3, rounded in the requested direction."""
    return sqrt_fraction(diameter_squared(tri), rounding)


def max_coordinate(tri: Triangle, j: int) -> Fraction:
    if j not in (1, 2, 3):
        raise ValueError(f"invalid coordinate {j!r}")
    return max(v[j] for v in tri.vertices)


def contains_point(tri: Triangle, p: BarycentricPoint) -> bool:
    """Exact containment test by solving for barycentric weights w.r.t. the triangle."""
    cols = [v.coords for v in tri.vertices]

    def det3(a, b, c):
        return (a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1])
                + c[0] * (a[1] * b[2] - a[2] * b[1]))

    d = det3(*cols)
    if d == 0:
        raise ValueError("degenerate triangle")
    x = p.coords
    weights = (det3(x, cols[1], cols[2]) / d, det3(cols[0], x, cols[2]) / d, det3(cols[0], cols[1], x) / d)
    return all(w >= 0 for w in weights)


def contains(outer: Triangle, inner: Triangle) -> bool:
    return all(contains_point(outer, v) for v in inner.vertices)


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def triangle_record(word: Iterable[int]) -> dict:
    """JSON-ready description of one triangle; rationals as 'num/den' strings."""
    tri = triangle_of(word)
    return {
        "word": list(tri.word),
        "vertices": [[_frac_str(c) for c in v.coords] for v in tri.vertices],
        "area_ratio": _frac_str(area_ratio(tri.word)),
        "diameter": {"value": diameter(tri, "up"), "rounding": "up"},
    }


def area(word: Iterable[int], rounding: Rounding = "nearest") -> float:
    """Absolute area, with the simplex normalized to sqrt(3)/2."""
    ratio = area_ratio(word)
    # sqrt(3)/2 * ratio = sqrt(3 * ratio**2 / 4)
    return sqrt_fraction(3 * ratio * ratio / 4, rounding)


def max_coordinate_float(tri: Triangle, j: int, rounding: Rounding) -> float:
    return fraction_to_float(max_coordinate(tri, j), rounding)
