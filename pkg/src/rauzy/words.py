"""Prefix classes of words over {1, 2, 3}.

For a depth ``m >= 2`` the index set consists of the canonical words
``(1^k, 2, t)`` with ``1 <= k <= m-1`` and ``t`` in ``{1,2,3}^(m-k)``.  Two
words are equivalent when a permutation of the symbols maps one to the other;
the canonical representative relabels symbols in order of first occurrence.

States are numbered densely: the renewal word ``(1, 2^m)`` is 0, the other
words follow by leading-run length and then lexicographic tail, and the
``m``-state (leading run >= m) is last.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, NamedTuple

from rauzy.geometry import Word, as_word


def canonicalize(word: Iterable[int]) -> Word:
    w = as_word(word)
    if not w:
        raise ValueError("empty word")
    relabel: dict[int, int] = {}
    out = []
    for s in w:
        if s not in relabel:
            relabel[s] = len(relabel) + 1
        out.append(relabel[s])
    return tuple(out)


def leading_run(word: Word) -> int:
    k = 1
    while k < len(word) and word[k] == word[0]:
        k += 1
    return k


def pack(word: Iterable[int]) -> int:
    """Base-3 code with the first symbol most significant."""
    code = 0
    for s in word:
        code = 3 * code + (s - 1)
    return code


def unpack(code: int, n: int) -> Word:
    out = []
    for _ in range(n):
        code, d = divmod(code, 3)
        out.append(d + 1)
    return tuple(reversed(out))


def star(m: int) -> Word:
    return (1,) + (2,) * m


def enumerate_V(m: int) -> list[Word]:
    """Canonical index words in deterministic order: k ascending, then tail lexicographic."""
    if m < 2:
        raise ValueError("m must be at least 2")
    out = []
    for k in range(1, m):
        for tail in itertools.product((1, 2, 3), repeat=m - k):
            out.append((1,) * k + (2,) + tail)
    return out


class StateIndex(NamedTuple):
    """A node of the transition graph: a canonical word, or a number-state k >= m."""

    word: Word | None = None
    k: int | None = None

    @property
    def is_number(self) -> bool:
        return self.word is None


@dataclass(frozen=True)
class StateSpace:
    """Dense indexing of the index words plus the terminal m-state."""

    m: int

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ValueError("m must be at least 2")

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        # offsets[k] = number of words with leading run < k (k = 1..m)
        offs = [0, 0]
        for k in range(1, self.m):
            offs.append(offs[-1] + 3 ** (self.m - k))
        return tuple(offs)

    @property
    def n_words(self) -> int:
        return (3**self.m - 3) // 2

    @property
    def size(self) -> int:
        """N: number of words plus one for the m-state."""
        return self.n_words + 1

    star_index = 0

    @property
    def m_state(self) -> int:
        return self.size - 1

    @cached_property
    def star_rank(self) -> int:
        return self._rank(star(self.m))

    def _rank(self, word: Word) -> int:
        k = leading_run(word)
        return self.offsets[k] + pack(word[k + 1:])

    def index(self, word: Iterable[int]) -> int:
        w = as_word(word)
        if len(w) != self.m + 1 or w[0] != 1 or canonicalize(w) != w or leading_run(w) >= self.m:
            raise KeyError(f"{w} is not a canonical index word for m={self.m}")
        r = self._rank(w)
        if r == self.star_rank:
            return 0
        return r + 1 if r < self.star_rank else r

    def word(self, idx: int) -> Word:
        if not 0 <= idx < self.n_words:
            raise IndexError(idx)
        if idx == 0:
            r = self.star_rank
        else:
            r = idx - 1 if idx <= self.star_rank else idx
        k = max(kk for kk in range(1, self.m) if self.offsets[kk] <= r)
        return (1,) * k + (2,) + unpack(r - self.offsets[k], self.m - k)

    def words(self) -> list[Word]:
        return [self.word(i) for i in range(self.n_words)]

    def state(self, idx: int) -> StateIndex:
        if idx == self.m_state:
            return StateIndex(k=self.m)
        return StateIndex(word=self.word(idx))

    def successor(self, idx: int, j: int) -> int:
        return self.index_or_m(successor(self.word(idx), j, self.m))

    def index_or_m(self, target: Word | int) -> int:
        return self.m_state if isinstance(target, int) else self.index(target)

    def successor_table(self):
        from rauzy import kernels

        return kernels.successor_table(self.m)


def successor(v: Iterable[int], j: int, m: int) -> Word | int:
    """Target of v under symbol j; the integer m stands for the m-state."""
    w = as_word(v)
    if len(w) != m + 1:
        raise ValueError("word length must be m + 1")
    if j not in (1, 2, 3):
        raise ValueError(f"invalid symbol {j!r}")
    k = leading_run(w)
    if not (1 <= k <= m - 1 and w[k] == 2 and canonicalize(w) == w):
        raise ValueError(f"{w} is not an index word for m={m}")
    if j == 1:
        if k == m - 1:
            return m
        return (1,) * (k + 1) + (2,) + w[k + 1:m]
    return canonicalize((j,) + w[:m])


class Tag(NamedTuple):
    kind: str  # "word" | "run" | "constant"
    value: object

    def __str__(self) -> str:
        if self.kind == "word":
            return "".join(map(str, self.value))
        if self.kind == "run":
            return f"k={self.value}"
        return f"const{self.value}"


def classify(word: Iterable[int], m: int) -> Tag:
    """Partition cell of a word of length n > m."""
    w = as_word(word)
    n = len(w)
    if n <= m:
        raise ValueError("classification needs n > m")
    k = leading_run(w)
    if k == n:
        return Tag("constant", w[0])
    if k >= m:
        return Tag("run", k)
    return Tag("word", canonicalize(w[: m + 1]))


def class_count(n: int, m: int, v: Iterable[int] | None = None) -> int:
    """Number of length-n words in the class of an index word: 2 * 3^(n-m)."""
    if n <= m:
        raise ValueError("class_count needs n > m")
    if v is not None:
        StateSpace(m).index(v)
    return 2 * 3 ** (n - m)


def all_words(n: int) -> Iterator[Word]:
    return itertools.product((1, 2, 3), repeat=n)


@lru_cache(maxsize=None)
def state_space(m: int) -> StateSpace:
    return StateSpace(m)
