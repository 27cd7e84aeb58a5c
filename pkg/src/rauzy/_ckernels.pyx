# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled bulk word kernels; same contract as ``rauzy._pykernels``."""

import numpy as np
from libc.stdint cimport int64_t

MAX_LEN = 60
cdef enum:
    MAXW = 64


def _check_len(int n):
    if not 0 <= n <= MAX_LEN:
        raise ValueError(f"word length {n} outside exact int64 range [0, {MAX_LEN}]")


cdef inline int64_t _pow3(int e) nogil:
    cdef int64_t r = 1
    cdef int i
    for i in range(e):
        r *= 3
    return r


def word_matrices(codes, int n):
    _check_len(n)
    cdef const int64_t[::1] cv = np.ascontiguousarray(codes, dtype=np.int64)
    cdef Py_ssize_t K = cv.shape[0], idx
    out = np.empty((K, 3, 3), dtype=np.int64)
    cdef int64_t[:, :, ::1] o = out
    cdef int64_t M[3][3]
    cdef int64_t top = _pow3(n - 1) if n > 0 else 1
    cdef int64_t p, code, v
    cdef int pos, r, c, d
    with nogil:
        for idx in range(K):
            for r in range(3):
                for c in range(3):
                    M[r][c] = 1 if r == c else 0
            p = top
            code = cv[idx]
            for pos in range(n):
                d = <int>((code // p) % 3)
                p = p // 3
                for r in range(3):
                    v = M[r][d]
                    for c in range(3):
                        if c != d:
                            M[r][c] += v
            for r in range(3):
                for c in range(3):
                    o[idx, r, c] = M[r][c]
    return out


def level_matrices(int n):
    return word_matrices(np.arange(3 ** n, dtype=np.int64), n)


def vertex_max(mats):
    cdef const int64_t[:, :, ::1] mv = np.ascontiguousarray(mats, dtype=np.int64)
    cdef Py_ssize_t K = mv.shape[0], idx
    num = np.empty((K, 3), dtype=np.int64)
    den = np.empty((K, 3), dtype=np.int64)
    cdef int64_t[:, ::1] nv = num
    cdef int64_t[:, ::1] dv = den
    cdef int64_t s[3]
    cdef int64_t bn, bd, cn, cd
    cdef int j, c
    with nogil:
        for idx in range(K):
            for c in range(3):
                s[c] = mv[idx, 0, c] + mv[idx, 1, c] + mv[idx, 2, c]
            for j in range(3):
                bn = mv[idx, j, 0]
                bd = s[0]
                for c in range(1, 3):
                    cn = mv[idx, j, c]
                    cd = s[c]
                    if cn * bd > bn * cd:
                        bn = cn
                        bd = cd
                nv[idx, j] = bn
                dv[idx, j] = bd
    return num, den


def leading_runs(codes, int n):
    cdef const int64_t[::1] cv = np.ascontiguousarray(codes, dtype=np.int64)
    cdef Py_ssize_t K = cv.shape[0], idx
    out = np.empty(K, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef int dig[MAXW]
    cdef int k
    with nogil:
        for idx in range(K):
            _digits(cv[idx], n, dig)
            k = 1
            while k < n and dig[k] == dig[0]:
                k += 1
            ov[idx] = k if n > 0 else 0
    return out


cdef inline void _digits(int64_t code, int n, int* dig) nogil:
    cdef int i
    for i in range(n - 1, -1, -1):
        dig[i] = <int>(code % 3)
        code = code // 3


cdef inline void _canon(int* w, int length) nogil:
    cdef int relabel[3]
    cdef int nxt = 0, i
    relabel[0] = relabel[1] = relabel[2] = -1
    for i in range(length):
        if relabel[w[i]] < 0:
            relabel[w[i]] = nxt
            nxt += 1
        w[i] = relabel[w[i]]


cdef inline int64_t _hash(const int* w, int m, const int64_t* offsets, int64_t star_rank) nogil:
    # w: canonical digits (0-based symbols), length m+1, leading run k < m
    cdef int k = 1, i
    cdef int64_t r = 0
    while w[k] == 0:
        k += 1
    for i in range(k + 1, m + 1):
        r = 3 * r + w[i]
    r += offsets[k]
    if r == star_rank:
        return 0
    return r + 1 if r < star_rank else r


cdef class _Space:
    cdef public int m
    cdef int64_t offsets[MAXW]
    cdef public int64_t star_rank, n_words

    def __init__(self, int m):
        if m < 2 or m + 2 >= MAXW:
            raise ValueError("m out of range")
        self.m = m
        cdef int k
        self.offsets[0] = 0
        self.offsets[1] = 0
        for k in range(1, m):
            self.offsets[k + 1] = self.offsets[k] + _pow3(m - k)
        self.n_words = (_pow3(m) - 3) // 2
        # star = (1, 2^m): k = 1, tail all 2s (digit 1)
        cdef int64_t t = 0
        for k in range(m - 1):
            t = 3 * t + 1
        self.star_rank = self.offsets[1] + t


def classify_level(int n, int m):
    if n <= m:
        raise ValueError("classification needs n > m")
    if n >= MAXW:
        raise ValueError("n too large")
    cdef _Space sp = _Space(m)
    cdef int64_t K = _pow3(n), code
    out = np.empty(K, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef int dig[MAXW]
    cdef int k
    cdef int64_t nw = sp.n_words
    with nogil:
        for code in range(K):
            _digits(code, n, dig)
            k = 1
            while k < n and dig[k] == dig[0]:
                k += 1
            if k == n:
                ov[code] = nw + (n - m) + dig[0]
            elif k >= m:
                ov[code] = nw + (k - m)
            else:
                _canon(dig, m + 1)
                ov[code] = _hash(dig, m, sp.offsets, sp.star_rank)
    return out


cdef inline void _unhash(int64_t idx, int m, const int64_t* offsets, int64_t star_rank, int* w) nogil:
    cdef int64_t r
    cdef int k, i
    if idx == 0:
        r = star_rank
    elif idx <= star_rank:
        r = idx - 1
    else:
        r = idx
    k = 1
    while k + 1 <= m - 1 and offsets[k + 1] <= r:
        k += 1
    r -= offsets[k]
    for i in range(k):
        w[i] = 0
    w[k] = 1
    for i in range(m, k, -1):
        w[i] = <int>(r % 3)
        r = r // 3


def successor_table(int m):
    cdef _Space sp = _Space(m)
    cdef int64_t nw = sp.n_words, idx
    table = np.empty((nw, 3), dtype=np.int64)
    cdef int64_t[:, ::1] tv = table
    cdef int w[MAXW]
    cdef int t[MAXW]
    cdef int k, i, j
    with nogil:
        for idx in range(nw):
            _unhash(idx, m, sp.offsets, sp.star_rank, w)
            k = 1
            while w[k] == 0:
                k += 1
            if k == m - 1:
                tv[idx, 0] = nw
            else:
                for i in range(k + 1):
                    t[i] = 0
                t[k + 1] = 1
                for i in range(k + 2, m + 1):
                    t[i] = w[i - 1]
                tv[idx, 0] = _hash(t, m, sp.offsets, sp.star_rank)
            for j in range(1, 3):
                t[0] = j
                for i in range(1, m + 1):
                    t[i] = w[i - 1]
                _canon(t, m + 1)
                tv[idx, j] = _hash(t, m, sp.offsets, sp.star_rank)
    return table


def state_codes(int m):
    cdef _Space sp = _Space(m)
    cdef int64_t nw = sp.n_words, idx, code
    out = np.empty(nw, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef int w[MAXW]
    cdef int i
    with nogil:
        for idx in range(nw):
            _unhash(idx, m, sp.offsets, sp.star_rank, w)
            code = 0
            for i in range(m + 1):
                code = 3 * code + w[i]
            ov[idx] = code
    return out
