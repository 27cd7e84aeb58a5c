"""Reference (interpreted) implementation of the bulk word kernels.

Word codes are base-3 integers with the first symbol most significant.
Matrix entries and column sums of a length-n word are bounded by 2**n, so
int64 is exact for n <= 60; callers keep n well below that.
"""

from __future__ import annotations

import numpy as np

MAX_LEN = 60


def _check_len(n: int) -> None:
    if not 0 <= n <= MAX_LEN:
        raise ValueError(f"word length {n} outside exact int64 range [0, {MAX_LEN}]")


def word_matrices(codes, n: int) -> np.ndarray:
    """Integer matrices of the given words, shape (K, 3, 3)."""
    _check_len(n)
    codes = np.asarray(codes, dtype=np.int64)
    mats = np.zeros((codes.size, 3, 3), dtype=np.int64)
    mats[:, 0, 0] = mats[:, 1, 1] = mats[:, 2, 2] = 1
    for pos in range(n):
        digit = (codes // 3 ** (n - 1 - pos)) % 3
        for j in range(3):
            sel = digit == j
            if not sel.any():
                continue
            colj = mats[sel, :, j]
            for c in range(3):
                if c != j:
                    mats[sel, :, c] += colj
    return mats


def level_matrices(n: int) -> np.ndarray:
    return word_matrices(np.arange(3**n, dtype=np.int64), n)


def vertex_max(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per word and coordinate j, the largest vertex coordinate as (num, den).

    Vertex c has coordinates M[:, c] / s_c with s_c the column sum.
    """
    sums = mats.sum(axis=1)  # (K, 3) column sums
    num = np.empty((mats.shape[0], 3), dtype=np.int64)
    den = np.empty((mats.shape[0], 3), dtype=np.int64)
    for j in range(3):
        bn = mats[:, j, 0].copy()
        bd = sums[:, 0].copy()
        for c in (1, 2):
            cn = mats[:, j, c]
            cd = sums[:, c]
            better = cn * bd > bn * cd
            bn = np.where(better, cn, bn)
            bd = np.where(better, cd, bd)
        num[:, j] = bn
        den[:, j] = bd
    return num, den


def _digits(codes: np.ndarray, n: int) -> np.ndarray:
    pows = 3 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (codes[:, None] // pows[None, :]) % 3


def leading_runs(codes, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    d = _digits(codes, n)
    differs = d != d[:, :1]
    run = np.where(differs.any(axis=1), differs.argmax(axis=1), n)
    return run.astype(np.int64)


def classify_level(n: int, m: int) -> np.ndarray:
    """Partition tag of every word of length n > m.

    Tags: state index for index-word cells, ``n_words + (k - m)`` for a
    leading run k >= m (k = m coincides with the m-state), and
    ``n_words + (n - m) + (j - 1)`` for the constant word of symbol j.
    """
    from rauzy.words import StateSpace, canonicalize, leading_run, unpack

    if n <= m:
        raise ValueError("classification needs n > m")
    space = StateSpace(m)
    nw = space.n_words
    out = np.empty(3**n, dtype=np.int64)
    cache: dict[int, int] = {}
    shift = 3 ** (n - m - 1)
    for code in range(3**n):
        prefix = code // shift
        tag = cache.get(prefix)
        if tag is None:
            w = unpack(prefix, m + 1)
            k = leading_run(w)
            tag = -1 - k if k >= m else space.index(canonicalize(w))
            cache[prefix] = tag
        if tag < 0:
            # leading run of the prefix is >= m; finish it on the whole word
            w = unpack(code, n)
            k = leading_run(w)
            tag = nw + (n - m) + (w[0] - 1) if k == n else nw + (k - m)
        out[code] = tag
    return out


def successor_table(m: int) -> np.ndarray:
    """(n_words, 3) array: target state index for each source state and symbol."""
    from rauzy.words import StateSpace, successor

    space = StateSpace(m)
    table = np.empty((space.n_words, 3), dtype=np.int64)
    for idx in range(space.n_words):
        w = space.word(idx)
        for j in (1, 2, 3):
            table[idx, j - 1] = space.index_or_m(successor(w, j, m))
    return table


def state_codes(m: int) -> np.ndarray:
    """Packed codes (length m+1) of the index words in state order."""
    from rauzy.words import StateSpace, pack

    space = StateSpace(m)
    return np.array([pack(space.word(i)) for i in range(space.n_words)], dtype=np.int64)
