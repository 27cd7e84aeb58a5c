"""The weighted transition matrix B and its certified Neumann sum.

``B[v, w] = max_{x in Delta_w} (2 - x_j)**-(3d + lam(1-d))`` whenever symbol
``j`` takes the index word ``w`` to ``v``.  The maximum sits at the vertex with
the largest ``x_j``, so it is computed exactly and only the final power is
rounded.  Entries are stored column by column, in state order of the source
word and then symbol order, and every product and sum below runs in that fixed
order.

The first factor ``sum_{k>=1} (B^k)[m, star]`` is the ``(m, star)`` entry of
``(I - B)^-1``.  It is certified by a super-solution: any ``z >= 0`` with
``z >= e_star + B z`` dominates every partial Neumann sum, so ``z[m]`` bounds
the series from above without any assumption on the spectral radius.
"""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from rauzy import kernels
from rauzy.rounding import Rounding, exponents, ratio_array, up, up_array, down_array
from rauzy.series import SeriesParams, a_values, b_values
from rauzy.words import StateSpace

DEFAULT_SLACK = 1e-12
_EPS = 2.0**-52


class NeumannDivergence(ArithmeticError):
    """The Neumann series for B does not converge: the condition fails at this delta."""


class CertificationError(RuntimeError):
    """Numerical trouble prevented a certificate although the series looks convergent."""


@dataclass(frozen=True)
class EdgeGeometry:
    """Delta-independent data of B for one m: targets, sources and exact bases 2 - max x_j."""

    m: int
    rows: np.ndarray
    cols: np.ndarray
    gap_num: np.ndarray  # base = gap_num / gap_den
    gap_den: np.ndarray


@lru_cache(maxsize=4)
def edge_geometry(m: int) -> EdgeGeometry:
    space = StateSpace(m)
    codes = kernels.state_codes(m)
    mats = kernels.word_matrices(codes, m + 1)
    num, den = kernels.vertex_max(mats)
    table = kernels.successor_table(m)
    nw = space.n_words
    return EdgeGeometry(
        m=m,
        rows=table.reshape(-1),
        cols=np.repeat(np.arange(nw, dtype=np.int64), 3),
        gap_num=(2 * den - num).reshape(-1),
        gap_den=den.reshape(-1),
    )


@dataclass
class SparseTransition:
    """Column-sparse matrix indexed by states; state 0 is the renewal word, the last the m-state."""

    matrix: sp.csc_matrix
    m: int | None = None
    delta: float | None = None
    rounding: Rounding = "up"
    slack: float = 0.0

    def __post_init__(self) -> None:
        self.matrix = sp.csc_matrix(self.matrix, dtype=np.float64)
        self.matrix.sort_indices()
        n, n2 = self.matrix.shape
        if n != n2:
            raise ValueError("transition matrix must be square")
        if self.matrix.nnz and self.matrix.data.min() < 0:
            raise ValueError("transition weights must be nonnegative")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    star = 0

    @property
    def m_state(self) -> int:
        return self.size - 1

    def entries(self):
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.row, coo.col))
        for i in order:
            yield int(coo.row[i]), int(coo.col[i]), float(coo.data[i])

    @classmethod
    def from_entries(cls, size: int, entries, **kw) -> "SparseTransition":
        entries = list(entries)
        rows = [e[0] for e in entries]
        cols = [e[1] for e in entries]
        vals = [e[2] for e in entries]
        return cls(sp.csc_matrix((vals, (rows, cols)), shape=(size, size)), **kw)


def build_B(m: int, delta: float, slack: float = DEFAULT_SLACK, rounding: Rounding = "up") -> SparseTransition:
    """Transition matrix for depth m at exponent delta.

    ``rounding="up"`` gives entries that bound the exact ones from above,
    inflated by ``1 + slack``; ``"down"`` gives lower bounds (no slack).
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    geo = edge_geometry(m)
    n = StateSpace(m).size
    if rounding == "nearest":
        p = exponents(delta, "nearest")[0]
        vals = np.power(geo.gap_num / geo.gap_den, -p)
    else:
        # base >= 1: the value shrinks as base or p grows
        inward = "down" if rounding == "up" else "up"
        p = exponents(delta, inward)[0]
        base = ratio_array(geo.gap_num, geo.gap_den, inward)
        raw = np.power(base, -p)
        if rounding == "up":
            vals = up_array(up_array(raw) * (1.0 + slack), rel=0.0)
        else:
            vals = down_array(raw)
    mat = sp.csc_matrix((vals, (geo.rows, geo.cols)), shape=(n, n))
    if mat.nnz != vals.size:
        raise AssertionError("duplicate transition edges")
    return SparseTransition(mat, m=m, delta=delta, rounding=rounding, slack=slack if rounding == "up" else 0.0)


def _matvec_bound(B: sp.csc_matrix) -> float:
    """Relative error bound of a float matvec with nonnegative data."""
    per_row = np.diff(B.tocsr().indptr)
    width = int(per_row.max()) if per_row.size else 0
    return 1.01 * (width + 2) * _EPS


def spectral_radius_estimate(B: SparseTransition, iters: int = 4000, window: int = 64, rtol: float = 1e-10) -> float:
    """Power-iteration estimate of rho(B); a diagnostic, not a certificate.

    Growth factors are averaged geometrically over a window so periodic
    components do not make the estimate oscillate.
    """
    A = B.matrix
    if A.nnz == 0:
        return 0.0
    v = np.full(B.size, 1.0 / B.size)
    logs: list[float] = []
    prev = math.inf
    for it in range(iters):
        w = A @ v
        s = w.sum()
        if s == 0.0:
            return 0.0
        logs.append(math.log(s))
        v = w / s
        if it >= 2 * window and it % window == 0:
            est = math.exp(sum(logs[-window:]) / window)
            if abs(est - prev) <= rtol * est:
                return est
            prev = est
    return math.exp(sum(logs[-window:]) / min(window, len(logs)))


@dataclass
class NeumannCheck:
    """Truncated Neumann summation of B^k e_star, all quantities rounded upward."""

    partial: float  # sum_{k=1}^{P} (B^k)[m, star]
    terms: int
    tail_bound: float  # rigorous; inf when no power of B contracts in the sup norm
    power: int | None  # j with ||B^j||_inf < 1 used for the tail, if any
    power_norm: float | None
    decay_ratio: float  # empirical ||r_{k+1}||_1 / ||r_k||_1 over the last window
    empirical_tail: float

    @property
    def dominated(self) -> bool:
        return math.isfinite(self.tail_bound)

    @property
    def upper(self) -> float:
        return up(self.partial + self.tail_bound, rel=0.0)


def _power_norms(A: sp.csc_matrix, jmax: int, gamma: float) -> list[float]:
    """Upper bounds on ||A^i||_inf for i = 1..jmax (row sums of A^i for A >= 0)."""
    v = np.ones(A.shape[0])
    out = []
    for _ in range(jmax):
        v = up_array(A @ v, rel=gamma)
        out.append(float(v.max()))
    return out


def neumann_check(
    B: SparseTransition,
    max_terms: int = 20000,
    rtol: float = 1e-16,
    window: int = 20,
    source: int | None = None,
    target: int | None = None,
) -> NeumannCheck:
    A = B.matrix
    src = B.star if source is None else source
    tgt = B.m_state if target is None else target
    gamma = _matvec_bound(A)
    r = np.zeros(B.size)
    r[src] = 1.0
    x = np.zeros(B.size)
    norms = [1.0]
    k = 0
    while k < max_terms:
        k += 1
        r = up_array(A @ r, rel=gamma)
        x = up_array(x + r, rel=0.0)
        norms.append(float(r.sum()))
        if norms[-1] == 0.0 or (k > window and norms[-1] <= rtol * max(float(x.sum()), 1e-300)):
            break
    if norms[-1] == 0.0:
        return NeumannCheck(float(x[tgt]), k, 0.0, None, None, 0.0, 0.0)
    ratios = [norms[i + 1] / norms[i] for i in range(max(0, len(norms) - 1 - window), len(norms) - 1) if norms[i] > 0]
    q = max(ratios) if ratios else 0.0
    empirical = norms[-1] * q / (1 - q) if q < 1 else math.inf
    # rigorous tail: sum_{i>=1} ||B^i||  <=  (sum_{i<=j} ||B^i||) / (1 - ||B^j||)
    m = B.m if B.m is not None else 1
    j0 = m + 1
    jmax = 64 * j0
    pn = _power_norms(A, jmax, gamma)
    tail, power, power_norm = math.inf, None, None
    j = j0
    while j <= jmax:
        beta = pn[j - 1]
        if beta < 1.0:
            s = math.fsum(pn[:j])
            tail = up(up(float(np.max(r)) * s) / (1.0 - beta), rel=4 * _EPS)
            power, power_norm = j, beta
            break
        j *= 2
    return NeumannCheck(float(x[tgt]), k, tail, power, power_norm, q, empirical)


@dataclass
class FirstFactor:
    value: float  # certified upper bound on sum_{k>=1} (B^k)[m, star]
    estimate: float  # direct-solve estimate
    residual: float  # max |e - (I - B) x| of the refined solve
    margin: float  # tau: the certificate is x + tau * u with u = (I - B)^-1 1
    neumann: NeumannCheck | None = None
    spectral_radius: float | None = None


def _refined_solve(lu, A: sp.csc_matrix, b: np.ndarray, steps: int = 2) -> tuple[np.ndarray, np.ndarray]:
    x = lu.solve(b)
    r = b - A @ x
    for _ in range(steps):
        x = x + lu.solve(r)
        r = b - A @ x
    return x, r


def _diverged(B: SparseTransition, why: str) -> NeumannDivergence:
    rho = spectral_radius_estimate(B)
    return NeumannDivergence(f"{why}; estimated spectral radius {rho:.6g}")


def first_factor(B: SparseTransition, cross_check: bool = False, attempts: int = 8) -> FirstFactor:
    """Certified upper bound on the (m, star) entry of (I - B)^-1 minus the identity.

    Raises NeumannDivergence when no super-solution exists and the power
    iteration puts rho(B) at or above 1; CertificationError when the series
    looks convergent but the certificate could not be closed.
    """
    A = B.matrix
    n = B.size
    star, tgt = B.star, B.m_state
    e = np.zeros(n)
    e[star] = 1.0
    I_minus_B = (sp.identity(n, format="csc") - A).tocsc()
    try:
        lu = spla.splu(I_minus_B)
    except RuntimeError as exc:  # exactly singular
        raise _diverged(B, f"I - B is singular ({exc})") from exc
    x, r = _refined_solve(lu, I_minus_B, e)
    u, ru = _refined_solve(lu, I_minus_B, np.ones(n))
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u))):
        raise _diverged(B, "solve produced non-finite values")
    if u.min() <= 0.5 or x.min() < -1e-6 * max(1.0, float(np.abs(x).max())):
        # (I - B)^-1 >= I when the series converges, so u >= 1 and x >= 0
        rho = spectral_radius_estimate(B)
        if rho >= 1.0 - 1e-9:
            raise NeumannDivergence(f"(I - B)^-1 is not nonnegative; estimated spectral radius {rho:.6g}")
        raise CertificationError(f"inverse lost positivity although rho ~ {rho:.6g}")
    gamma = _matvec_bound(A)
    pattern = abs(A)
    base = float(np.abs(r).max())
    scale = float(np.abs(x).max())
    tau = 0.0 if base == 0.0 else 4.0 * base + 8.0 * gamma * scale
    for _ in range(attempts):
        z = x + tau * u
        Bz = up_array(A @ z, rel=gamma)
        Bz[pattern @ (z != 0) == 0] = 0.0  # structurally zero rows are exact
        rhs = Bz.copy()
        rhs[star] = 1.0 if Bz[star] == 0.0 else up(1.0 + Bz[star], rel=0.0)
        if np.all(z >= 0.0) and np.all(z >= rhs):
            value = float(z[tgt])
            nc = neumann_check(B) if cross_check else None
            return FirstFactor(value, float(x[tgt]), base, tau, nc)
        tau = 16.0 * tau if tau > 0 else 8.0 * gamma * max(scale, 1.0)
    rho = spectral_radius_estimate(B)
    if rho >= 1.0 - 1e-9:
        raise NeumannDivergence(f"no super-solution found; estimated spectral radius {rho:.6g}")
    raise CertificationError(f"super-solution check failed after {attempts} attempts (rho ~ {rho:.6g})")


# ---------------------------------------------------------------- truncated D


@dataclass
class TruncatedD:
    """B extended by the number-state chain m, m+1, ..., K.

    Number-state k sits at index ``N - 1 + (k - m)`` (k = m is B's m-state);
    row 0 carries a_k in those columns, and b_k links k to k+1.
    """

    matrix: sp.csr_matrix
    m: int
    delta: float
    cutoff: int
    n_states: int = field(repr=False)

    def number_index(self, k: int) -> int:
        return self.n_states - 1 + (k - self.m)


def build_truncated_D(
    m: int,
    delta: float,
    cutoff: int | None = None,
    slack: float = DEFAULT_SLACK,
    a: np.ndarray | None = None,
    b: np.ndarray | None = None,
) -> TruncatedD:
    K = m + 500 if cutoff is None else cutoff
    if K < m + 10:
        raise ValueError("cutoff must be at least m + 10")
    B = build_B(m, delta, slack=slack)
    params = SeriesParams(m, delta)
    ks = np.arange(m, K + 1)
    a_vals = a_values(params, ks) if a is None else np.asarray(a, dtype=float)
    b_vals = b_values(params, ks[:-1]) if b is None else np.asarray(b, dtype=float)
    if a_vals.shape != (K - m + 1,) or b_vals.shape != (K - m,):
        raise ValueError("a must have K-m+1 values and b K-m values")
    n = B.size
    dim = n + (K - m)
    coo = B.matrix.tocoo()
    num_idx = n - 1 + (ks - m)
    rows = np.concatenate([coo.row, np.zeros(ks.size, dtype=np.int64), num_idx[1:]])
    cols = np.concatenate([coo.col, num_idx, num_idx[:-1]])
    vals = np.concatenate([coo.data, a_vals, b_vals])
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
    return TruncatedD(mat, m, delta, K, n)


@dataclass(frozen=True)
class PowerSums:
    total: float  # sum_{k=1}^{P} (D^k)[star, star]
    first_return: float  # same, restricted to walks that visit star only at their ends
    terms: int


def power_sums(D: TruncatedD, terms: int = 400) -> PowerSums:
    A = D.matrix
    v = np.zeros(A.shape[0])
    v[0] = 1.0
    w = v.copy()
    total = first = 0.0
    for _ in range(terms):
        v = A @ v
        w = A @ w
        total += v[0]
        first += w[0]
        w[0] = 0.0
    return PowerSums(total, first, terms)


# ---------------------------------------------------------------- export


def export_matrix(B: SparseTransition, target) -> None:
    """Matrix Market coordinate file, 1-based, values with 30 significant digits.

    Written by hand: scipy's fast Matrix Market writer aborts in some builds
    (scipy 1.15 here), while its reader is fine and is used by import_matrix.
    """
    lines = [
        "%%MatrixMarket matrix coordinate real general",
        f"% m={B.m} delta={B.delta!r} rounding={B.rounding} slack={B.slack!r}",
        "% rows/cols: state 1 is the renewal word (1,2,...,2), the last state is the m-state",
        f"{B.size} {B.size} {B.matrix.nnz}",
    ]
    lines += [f"{i + 1} {j + 1} {v:.29e}" for i, j, v in B.entries()]
    data = ("\n".join(lines) + "\n").encode("ascii")
    if isinstance(target, (str, Path)):
        Path(target).write_bytes(data)
    elif hasattr(target, "buffer"):
        target.buffer.write(data)
    else:
        try:
            target.write(data)
        except TypeError:
            target.write(data.decode())


_META = re.compile(r"m=(\S+) delta=(\S+) rounding=(\S+) slack=(\S+)")


def import_matrix(source) -> SparseTransition:
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode()
    meta = {}
    for line in data.decode().splitlines():
        if not line.startswith("%"):
            break
        hit = _META.search(line)
        if hit:
            m, delta, rounding, slack = hit.groups()
            meta = dict(
                m=None if m == "None" else int(m),
                delta=None if delta == "None" else float(delta),
                rounding=rounding,
                slack=float(slack),
            )
    mat = scipy.io.mmread(io.BytesIO(data))
    return SparseTransition(sp.csc_matrix(mat), **meta)
