"""Periodic-orbit censuses and growth rates of orbit counts in rotation balls.

Two counting engines share one interface:

``"enumerate"``
    lists every fixed point of the n-th shift power (cyclic n-words) and
    computes its rotation vector directly; exact per orbit point.
``"dp"``
    dynamic programming over (skeleton vertex, quantised partial Birkhoff
    sum).  When every edge value lies on the quantisation grid the counts are
    exact; otherwise each cell carries a certified error box and ball counts
    come back as a lower/upper bracket.

Ball membership is decided in exact rational arithmetic.  Float inputs for
the centre and radius are read through their shortest decimal repr, so
``r=0.1`` means exactly 1/10.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import BudgetExceeded, EmptyCounts
from .sft import iter_words, k_block, presentation_depth, spectral_radius, trace_power
from .potential import edge_values

ENUM_BUDGET = 30_000_000
DP_BUDGET = 200_000_000
DEFAULT_Q = Fraction(1, 64)


@dataclass
class OrbitCensus:
    n: int
    total: int
    bins: dict
    q: Fraction
    mode: str

    def centers(self):
        return {cell: tuple(float(c * self.q) for c in cell) for cell in self.bins}


@dataclass
class BallCount:
    lower: int
    upper: int
    mode: str

    @property
    def exact(self):
        return self.lower == self.upper

    @property
    def count(self):
        return self.lower if self.exact else None


@dataclass
class GrowthEstimate:
    values: list
    estimate: float
    window: tuple
    residual: float
    counts: list = field(default_factory=list, repr=False)


def per_count(sft, n):
    """Number of points of period ``n`` (fixed points of the n-th shift power)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return trace_power(sft, n)


def _rational(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(repr(float(x)))


def _vec(x):
    return tuple(_rational(v) for v in np.atleast_1d(np.asarray(x, dtype=object)))


# ---------------------------------------------------------------- exact sums

def _exact_grid(phi):
    """Common rational grid step of all edge values, or None if none is small."""
    fr = [Fraction(float(v)).limit_denominator(1 << 20) for v in np.ravel(phi)]
    if any(abs(float(f) - float(v)) > 1e-12 for f, v in zip(fr, np.ravel(phi))):
        return None
    den = reduce(math.lcm, (f.denominator for f in fr), 1)
    if den > 1 << 16:
        return None
    num = reduce(math.gcd, (int(f * den) for f in fr), 0)
    return Fraction(max(num, 1), den)


def _windows(words, depth, cyclic, n=None):
    if cyclic:
        n = words.shape[1]
        reps = -(-(n + depth - 1) // n)
        ext = np.tile(words, reps)[:, :n + depth - 1]
    else:
        ext = words
        n = words.shape[1] - depth + 1 if n is None else n
    return np.lib.stride_tricks.sliding_window_view(ext, depth, axis=1)[:, :n]


def _orbit_sums(p, words, cyclic, n=None):
    """Float Birkhoff sums and, when available, exact integer sums on the value grid."""
    win = _windows(words, p.k, cyclic, n)
    N, n = win.shape[:2]
    idx = p.index_of(win.reshape(N * n, p.k)).reshape(N, n)
    sums = p.values[idx].sum(axis=1)
    grid = _exact_grid(p.values)
    isums = None
    if grid is not None:
        ivals = np.rint(p.values / float(grid)).astype(np.int64)
        isums = ivals[idx].sum(axis=1)
    return n, sums, isums, grid


def _inside_ball(sum_vec, n, w, r):
    """Exact test ``|sum/n - w|_2 < r`` for rational ``sum_vec``."""
    return sum((s - n * wi) ** 2 for s, wi in zip(sum_vec, w)) < (n * r) ** 2


def _count_enumerated(p, words, w, r, cyclic, n=None):
    n, sums, isums, grid = _orbit_sums(p, words, cyclic, n)
    wq, rq = _vec(w), _rational(r)
    wf = np.array([float(x) for x in wq])
    d2 = ((sums / n - wf) ** 2).sum(axis=1)
    r2 = float(rq) ** 2
    sure = d2 < r2 - 1e-9
    unsure = np.flatnonzero(np.abs(d2 - r2) <= 1e-9)
    count = int(sure.sum())
    for i in unsure:
        if isums is not None:
            exact = tuple(grid * int(s) for s in isums[i])
        else:
            exact = tuple(Fraction(float(s)) for s in sums[i])
        count += _inside_ball(exact, n, wq, rq)
    return count


# ---------------------------------------------------------------- DP engine

class _DP:
    """Counts of skeleton paths of length n by quantised Birkhoff sum."""

    def __init__(self, sft, p, q=None, max_states=2_000_000):
        p = p.as_table()
        self.p = p
        self.sk = k_block(sft, presentation_depth(sft, p.k), max_states)
        phi = edge_values(p, self.sk)
        grid = _exact_grid(phi)
        if q is None:
            q = grid if grid is not None else DEFAULT_Q
        self.q = _rational(q)
        scaled = phi / float(self.q)
        self.z = np.rint(scaled).astype(np.int64)
        self.delta = np.abs(scaled - self.z).max(axis=0)
        self.exact = bool(np.all(self.delta <= 1e-9))
        if self.exact:
            self.delta = np.zeros_like(self.delta)
        self.m = p.m
        self.growth = spectral_radius(sft)

    def _dtype(self, n):
        bound = n * math.log2(max(self.growth, 1.0) + 1e-9) + math.log2(self.sk.n_vertices + 1) + 2
        return np.int64 if bound < 60 else object

    def histogram(self, n, closed):
        """``{z: count}`` over integer sums ``z`` of closed (or all) n-edge paths."""
        sk, z = self.sk, self.z
        zmin = z.min(axis=0)
        shift = z - zmin
        extent = tuple(int(n * s) + 1 for s in shift.max(axis=0))
        V = sk.n_vertices
        starts = V if closed else 1
        size = starts * V * int(np.prod(extent))
        if size * max(n, 1) > DP_BUDGET:
            raise BudgetExceeded(f"DP table of {size} cells exceeds the budget; raise q or lower n",
                                 "census", cells=size, suggested_q=str(self.q * 2))
        dtype = self._dtype(n)
        cur = np.zeros((starts, V) + extent, dtype=dtype)
        if closed:
            for v in range(V):
                cur[(v, v) + (0,) * self.m] = 1
        else:
            cur[(0, slice(None)) + (0,) * self.m] = 1
        for step in range(n):
            nxt = np.zeros_like(cur)
            hi = [int(step * s) + 1 for s in shift.max(axis=0)]
            for e in range(sk.n_edges):
                u, v = sk.src[e], sk.dst[e]
                src_sl = tuple(slice(0, h) for h in hi)
                dst_sl = tuple(slice(int(o), int(o) + h) for o, h in zip(shift[e], hi))
                nxt[(slice(None), v) + dst_sl] += cur[(slice(None), u) + src_sl]
            cur = nxt
        if closed:
            tot = sum(cur[v, v] for v in range(V))
        else:
            tot = cur[0].sum(axis=0)
        out = {}
        for idx in zip(*np.nonzero(tot)):
            zsum = tuple(int(i) + n * int(zm) for i, zm in zip(idx, zmin))
            out[zsum] = int(tot[idx])
        return out

    def ball(self, hist, n, w, r):
        wq, rq = _vec(w), _rational(r)
        lower = upper = 0
        half = [Fraction(float(d)) * self.q for d in self.delta]
        for zsum, c in hist.items():
            centre = tuple(self.q * zi for zi in zsum)
            if self.exact:
                if _inside_ball(centre, n, wq, rq):
                    lower += c
                    upper += c
                continue
            # box of possible true sums: centre +- n*half per axis
            near = far = Fraction(0)
            for s, h, wi in zip(centre, half, wq):
                lo, hi = s - n * h - n * wi, s + n * h - n * wi
                far += max(lo * lo, hi * hi)
                near += 0 if lo <= 0 <= hi else min(lo * lo, hi * hi)
            if far < (n * rq) ** 2:
                lower += c
            if near < (n * rq) ** 2:
                upper += c
        return lower, upper


def _choose_mode(sft, n, mode, cyclic, depth=1):
    if mode != "auto":
        return mode
    length = n if cyclic else n + depth - 1
    return "enumerate" if length * sft.d ** length <= ENUM_BUDGET and sft.d ** length <= 2_000_000 \
        else "dp"


def census(sft, p, n, q=Fraction(1, 4), mode="auto"):
    """Histogram of rotation vectors of all points of period ``n``.

    Cells are centred at integer multiples of ``q``: a rotation vector ``v``
    lands in cell ``round(v / q)``.
    """
    p = p.as_table()
    q = _rational(q)
    mode = _choose_mode(sft, n, mode, True)
    bins = {}
    if mode == "enumerate":
        for words in iter_words(sft, n, cyclic=True):
            _, sums, isums, grid = _orbit_sums(p, words, True)
            if isums is not None:
                keys, counts = np.unique(isums, axis=0, return_counts=True)
                for row, c in zip(map(tuple, keys.tolist()), counts.tolist()):
                    cell = tuple(round(grid * s / (n * q)) for s in row)
                    bins[cell] = bins.get(cell, 0) + c
            else:
                cells = np.floor(sums / n / float(q) + 0.5).astype(np.int64)
                keys, counts = np.unique(cells, axis=0, return_counts=True)
                for row, c in zip(map(tuple, keys.tolist()), counts.tolist()):
                    bins[row] = bins.get(row, 0) + c
    else:
        dp = _DP(sft, p)
        for zsum, c in dp.histogram(n, closed=True).items():
            cell = tuple(round(dp.q * zi / (n * q)) for zi in zsum)
            bins[cell] = bins.get(cell, 0) + c
    total = sum(bins.values())
    return OrbitCensus(n, total, dict(sorted(bins.items())), q, mode)


def count_in_ball(sft, p, w, r, n, mode="auto", q=None):
    """Points of period ``n`` whose rotation vector lies in the open ball ``D(w, r)``."""
    p = p.as_table()
    mode = _choose_mode(sft, n, mode, True)
    if mode == "enumerate":
        c = sum(_count_enumerated(p, words, w, r, True)
                for words in iter_words(sft, n, cyclic=True))
        return BallCount(c, c, mode)
    dp = _DP(sft, p, q)
    lo, hi = dp.ball(dp.histogram(n, closed=True), n, w, r)
    return BallCount(lo, hi, mode)


def count_words_in_ball(sft, p, w, r, n, mode="auto", q=None):
    """Orbit segments of ``n`` steps with Birkhoff mean in ``D(w, r)``.

    A segment is an admissible word of length ``n + k - 1`` where ``k`` is the
    presentation depth (the potential depth, or 2 for a depth-1 potential on
    a proper subshift); its mean is taken over the first ``n`` windows.
    """
    p = p.as_table()
    depth = presentation_depth(sft, p.k)
    mode = _choose_mode(sft, n, mode, False, depth)
    if mode == "enumerate":
        c = sum(_count_enumerated(p, words, w, r, False, n)
                for words in iter_words(sft, n + depth - 1))
        return BallCount(c, c, mode)
    dp = _DP(sft, p, q)
    lo, hi = dp.ball(dp.histogram(n, closed=False), n, w, r)
    return BallCount(lo, hi, mode)


def _growth(counts, n_range):
    ns = sorted(n_range)
    half = ns[len(ns) // 2:] if len(ns) > 1 else ns
    pts = [(n, c) for n, c in counts if n in half and c > 0]
    if len(pts) < 2:
        raise EmptyCounts("fewer than two nonzero counts in the fitting window; enlarge r or n",
                          "h_per", window=[half[0], half[-1]])
    x = np.array([n for n, _ in pts], float)
    y = np.array([math.log(c) for _, c in pts])
    A = np.column_stack([x, np.ones_like(x)])
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    values = [(n, c, math.log(c) / n if c > 0 else -math.inf) for n, c in counts]
    return GrowthEstimate(values, float(coef[0]), (half[0], half[-1]), resid, counts)


def _representative(bc):
    if bc.exact:
        return bc.lower
    if bc.lower == 0:
        return bc.upper
    return int(round(math.sqrt(bc.lower * bc.upper)))


def h_per(sft, p, w, r, n_range, mode="auto"):
    """Windowed growth rate of ``count_in_ball`` over ``n_range``.

    The slope of ``log count`` against ``n`` is fitted over the largest half
    of the computed ``n`` values.
    """
    counts = [(n, _representative(count_in_ball(sft, p, w, r, n, mode))) for n in n_range]
    return _growth(counts, n_range)


def h_word(sft, p, w, r, n_range, mode="auto"):
    """Windowed growth rate of the number of orbit segments with mean in ``D(w, r)``.

    On a subshift, distinct cylinders of length ``n + k - 1`` are
    ``(n, eps)``-separated once ``eps`` is below the metric's symbol
    separation, so counting words realises the separated-set count with the
    ``eps``-limit already taken.
    """
    counts = [(n, _representative(count_words_in_ball(sft, p, w, r, n, mode))) for n in n_range]
    return _growth(counts, n_range)
