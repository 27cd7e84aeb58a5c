import os
import subprocess
import sys

import numpy as np
import pytest

from rauzy import _pykernels, kernels
from rauzy.geometry import max_coordinate, triangle_of, word_matrix
from rauzy.words import StateSpace, classify, pack, unpack

try:
    from rauzy import _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def test_level_matrices_match_exact():
    n = 5
    mats = _pykernels.level_matrices(n)
    for code in range(0, 3**n, 7):
        assert tuple(map(tuple, mats[code].tolist())) == word_matrix(unpack(code, n)).rows


def test_vertex_max_matches_exact():
    n = 4
    num, den = _pykernels.vertex_max(_pykernels.level_matrices(n))
    for code in range(3**n):
        tri = triangle_of(unpack(code, n))
        for j in (1, 2, 3):
            assert num[code, j - 1] * max_coordinate(tri, j).denominator == \
                den[code, j - 1] * max_coordinate(tri, j).numerator


def test_leading_runs_and_classify():
    n, m = 6, 3
    runs = _pykernels.leading_runs(np.arange(3**n), n)
    tags = _pykernels.classify_level(n, m)
    space = StateSpace(m)
    for code in range(3**n):
        w = unpack(code, n)
        tag = classify(w, m)
        if tag.kind == "word":
            assert tags[code] == space.index(tag.value)
        elif tag.kind == "run":
            assert tags[code] == space.n_words + tag.value - m
            assert runs[code] == tag.value
        else:
            assert tags[code] == space.n_words + (n - m) + tag.value - 1
            assert runs[code] == n


def test_state_codes():
    for m in (2, 3, 4):
        space = StateSpace(m)
        assert _pykernels.state_codes(m).tolist() == [pack(w) for w in space.words()]


def test_length_guard():
    with pytest.raises(ValueError):
        _pykernels.word_matrices([0], _pykernels.MAX_LEN + 1)


@needs_c
@pytest.mark.parametrize("n", [1, 3, 6])
def test_backend_parity_levels(n):
    a, b = _pykernels.level_matrices(n), _ckernels.level_matrices(n)
    assert np.array_equal(a, b)
    for x, y in zip(_pykernels.vertex_max(a), _ckernels.vertex_max(b)):
        assert np.array_equal(x, y)
    codes = np.arange(3**n)
    assert np.array_equal(_pykernels.leading_runs(codes, n), _ckernels.leading_runs(codes, n))


@needs_c
@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_backend_parity_states(m):
    assert np.array_equal(_pykernels.successor_table(m), _ckernels.successor_table(m))
    assert np.array_equal(_pykernels.state_codes(m), _ckernels.state_codes(m))
    for n in range(m + 1, m + 4):
        assert np.array_equal(_pykernels.classify_level(n, m), _ckernels.classify_level(n, m))


@needs_c
def test_backend_parity_random_words():
    rng = np.random.default_rng(5)
    n = 20
    codes = rng.integers(0, 3**n, size=200)
    assert np.array_equal(_pykernels.word_matrices(codes, n), _ckernels.word_matrices(codes, n))


def test_backend_selection():
    assert kernels.BACKEND in ("python", "cython")
    env = dict(os.environ, RAUZY_KERNELS="python")
    out = subprocess.run([sys.executable, "-c", "from rauzy import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
