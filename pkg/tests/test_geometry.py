import itertools
import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rauzy.geometry import (
    BarycentricPoint,
    IntegerMatrix3,
    apply_map,
    area,
    area_ratio,
    contains,
    diameter,
    diameter_squared,
    generator_matrix,
    max_coordinate,
    shoelace_area_ratio,
    triangle_of,
    triangle_record,
    word_matrix,
)

CORNERS = [BarycentricPoint(1, 0, 0), BarycentricPoint(0, 1, 0), BarycentricPoint(0, 0, 1)]
words = st.lists(st.integers(1, 3), min_size=1, max_size=12).map(tuple)


def t_formula(j, x):
    """T_j written out by hand: coordinate j becomes 1/(2 - x_j), the others x_c/(2 - x_j)."""
    d = 2 - x.coords[j - 1]
    return tuple((Fraction(1) if c == j - 1 else x.coords[c]) / d for c in range(3))


def random_point(rng):
    a, b = sorted(Fraction(rng.randrange(0, 1000), 1000) for _ in range(2))
    return BarycentricPoint(a, b - a, 1 - b)


def test_generator_rows():
    assert generator_matrix(1).rows == ((1, 1, 1), (0, 1, 0), (0, 0, 1))
    assert generator_matrix(2).rows == ((1, 0, 0), (1, 1, 1), (0, 0, 1))
    assert generator_matrix(3).rows == ((1, 0, 0), (0, 1, 0), (1, 1, 1))


@pytest.mark.parametrize("j", [1, 2, 3])
def test_generator_matches_map_formula(j):
    rng = random.Random(j)
    pts = [random_point(rng) for _ in range(20)] + CORNERS
    for x in pts:
        lifted = BarycentricPoint.normalize(generator_matrix(j).apply(x.coords))
        assert lifted.coords == t_formula(j, x)
        assert apply_map(j, x).coords == t_formula(j, x)


def test_fixed_point_of_first_map():
    assert BarycentricPoint.normalize(generator_matrix(1).apply((1, 0, 0))).coords == (1, 0, 0)


def test_invalid_symbol():
    with pytest.raises(ValueError):
        generator_matrix(4)
    with pytest.raises(ValueError):
        word_matrix((1, 0))
    with pytest.raises(ValueError):
        BarycentricPoint(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))


def test_word_matrix_composition():
    assert word_matrix((1,)) == generator_matrix(1)
    rng = random.Random(3)
    for _ in range(20):
        w = tuple(rng.choice((1, 2, 3)) for _ in range(rng.randrange(1, 9)))
        x = random_point(rng)
        # composition order: the last symbol acts first
        y = x
        for s in reversed(w):
            y = BarycentricPoint(*t_formula(s, y))
        assert BarycentricPoint.normalize(word_matrix(w).apply(x.coords)) == y


def test_square_of_first_map():
    tri = triangle_of((1, 1))
    assert all(v.x1 >= Fraction(2, 3) for v in tri.vertices)


def test_noncommutative():
    assert set(triangle_of((2, 1)).vertices) != set(triangle_of((1, 2)).vertices)


def test_triangle_of_first_symbol():
    h = Fraction(1, 2)
    assert triangle_of((1,)).vertices == (
        BarycentricPoint(1, 0, 0), BarycentricPoint(h, h, 0), BarycentricPoint(h, 0, h))


@pytest.mark.parametrize("k", range(1, 8))
def test_power_region(k):
    tri = triangle_of((1,) * k)
    assert min(v.x1 for v in tri.vertices) == Fraction(k, k + 1)
    assert max_coordinate(tri, 1) == 1


def test_empty_word_is_simplex():
    tri = triangle_of(())
    assert tri.vertices == tuple(CORNERS)
    assert area_ratio(()) == 1
    assert diameter_squared(tri) == 2
    assert all(max_coordinate(tri, j) == 1 for j in (1, 2, 3))


def test_area_examples():
    assert area_ratio((1,)) == Fraction(1, 4)
    assert area_ratio((1, 1)) == Fraction(1, 9)
    assert shoelace_area_ratio(triangle_of((1,))) == Fraction(1, 4)
    assert shoelace_area_ratio(triangle_of((1, 1))) == Fraction(1, 9)
    s3 = math.sqrt(3) / 2
    assert area((1,), "down") <= s3 / 4 <= area((1,), "up")


def test_diameter_examples():
    assert diameter(triangle_of(()), "down") <= math.sqrt(2) <= diameter(triangle_of(()), "up")
    tri = triangle_of((1,))
    a, b, c = tri.vertices
    sides = {sum((p - q) ** 2 for p, q in zip(u.coords, v.coords)) for u, v in ((a, b), (b, c), (a, c))}
    assert sides == {Fraction(1, 2)}
    assert diameter(tri, "down") <= math.sqrt(2) / 2 <= diameter(tri, "up")


def test_diameter_permutation_invariant():
    for w in itertools.product((1, 2, 3), repeat=4):
        d = diameter_squared(triangle_of(w))
        for perm in itertools.permutations((1, 2, 3)):
            pw = tuple(perm[s - 1] for s in w)
            assert diameter_squared(triangle_of(pw)) == d


@pytest.mark.parametrize("k", [1, 2, 3])
def test_max_coordinate_in_run_class(k):
    # words 1^k 2 ... : the first coordinate never exceeds (k+1)/(k+2)
    for tail in itertools.product((1, 2, 3), repeat=3):
        for second in (2, 3):
            w = (1,) * k + (second,) + tail
            assert max_coordinate(triangle_of(w), 1) <= Fraction(k + 1, k + 2)


def test_nesting():
    for n in range(0, 4):
        for i in itertools.product((1, 2, 3), repeat=n):
            for j in (1, 2, 3):
                assert contains(triangle_of((j,)), triangle_of((j,) + i))
                assert contains(triangle_of(i), triangle_of(i + (j,)))


def test_column_sums_grow():
    for w in itertools.product((1, 2, 3), repeat=4):
        base = word_matrix(w).column_sums()
        for j in (1, 2, 3):
            ext = word_matrix(w + (j,)).column_sums()
            assert ext[j - 1] == base[j - 1]
            assert all(ext[c] > base[c] for c in range(3) if c != j - 1)
            assert area_ratio(w + (j,)) < area_ratio(w)


def test_triangle_record_json():
    rec = json.loads(json.dumps(triangle_record((1, 2))))
    verts = [tuple(Fraction(c) for c in v) for v in rec["vertices"]]
    assert verts == [v.coords for v in triangle_of((1, 2)).vertices]
    assert Fraction(rec["area_ratio"]) == area_ratio((1, 2))
    assert rec["diameter"]["rounding"] == "up"
    assert rec["diameter"]["value"] ** 2 >= diameter_squared(triangle_of((1, 2)))


@settings(max_examples=200, deadline=None)
@given(words)
def test_area_formula_property(w):
    m = word_matrix(w)
    assert m.det() == 1
    assert area_ratio(w) == shoelace_area_ratio(triangle_of(w))
    assert min(min(r) for r in m.rows) >= 0


@settings(max_examples=100, deadline=None)
@given(words, words)
def test_composition_associative(a, b):
    assert word_matrix(a + b) == word_matrix(a) @ word_matrix(b)
    assert isinstance(word_matrix(a), IntegerMatrix3)
