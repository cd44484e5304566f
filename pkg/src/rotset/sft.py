"""One-sided subshifts of finite type and their higher-block presentations.

Words are plain tuples of integer symbols.  A *cyclic* word is a tuple read
periodically; it names the periodic point ``w w w ...`` and, through its
rotations, the whole periodic orbit.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import DimensionMismatch, StateBudgetExceeded, StrandedSymbol

DEFAULT_STATE_BUDGET = 2_000_000


@dataclass(frozen=True, eq=False)
class Sft:
    """Alphabet ``{0, ..., d-1}`` with a 0/1 transition matrix ``A``."""

    A: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=np.int8)
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def d(self):
        return self.A.shape[0]

    @property
    def is_full(self):
        return bool(self.A.all())

    def to_dict(self):
        return {"alphabet": self.d,
                "transitions": "full" if self.is_full else self.A.tolist()}

    def restrict(self, symbols):
        """Subshift on a subset of symbols, relabelled ``0..len-1``."""
        idx = np.asarray(sorted(symbols))
        return make_sft(len(idx), self.A[np.ix_(idx, idx)])

    def __repr__(self):
        return f"Sft(d={self.d}, full={self.is_full})"


def make_sft(d, transitions="full"):
    """Validate and build an :class:`Sft`.

    ``transitions`` is either the string ``"full"`` or a ``d x d`` array-like of
    zeros and ones.  Every symbol needs at least one predecessor and one
    successor.
    """
    d = int(d)
    if d < 1:
        raise DimensionMismatch("alphabet size must be >= 1", "make_sft", d=d)
    if isinstance(transitions, str):
        if transitions != "full":
            raise DimensionMismatch(f"unknown transitions {transitions!r}", "make_sft")
        return Sft(np.ones((d, d), dtype=np.int8))
    A = np.asarray(transitions)
    if A.shape != (d, d):
        raise DimensionMismatch(f"transition matrix has shape {A.shape}, expected {(d, d)}",
                                "make_sft", shape=list(A.shape), d=d)
    if not np.isin(A, (0, 1)).all():
        raise DimensionMismatch("transition matrix entries must be 0 or 1", "make_sft")
    for s in range(d):
        if not A[s].any():
            raise StrandedSymbol(f"symbol {s} has no successor", "make_sft", symbol=s)
        if not A[:, s].any():
            raise StrandedSymbol(f"symbol {s} has no predecessor", "make_sft", symbol=s)
    return Sft(A)


def sft_from_json(doc):
    """Build an Sft from the system-spec mapping ``{"alphabet", "transitions"}``."""
    try:
        d = doc["alphabet"]
        transitions = doc.get("transitions", "full")
    except (KeyError, AttributeError, TypeError) as exc:
        raise DimensionMismatch(f"malformed system spec: {exc}", "make_sft") from None
    return make_sft(d, transitions)


def golden_mean():
    return make_sft(2, [[1, 1], [1, 0]])


def full_shift(d):
    return make_sft(d, "full")


# ---------------------------------------------------------------- words

def parse_word(text, d=10):
    """``"0110"`` -> ``(0, 1, 1, 0)``; comma separated when ``d > 10``."""
    if isinstance(text, (tuple, list)):
        return tuple(int(s) for s in text)
    text = str(text).strip()
    if "," in text or d > 10:
        return tuple(int(s) for s in text.split(",") if s != "")
    return tuple(int(c) for c in text)


def format_word(word, d=10):
    if d > 10:
        return ",".join(str(s) for s in word)
    return "".join(str(s) for s in word)


def is_admissible(sft, word):
    w = np.asarray(word, dtype=np.intp)
    if w.size == 0:
        return True
    if w.min() < 0 or w.max() >= sft.d:
        return False
    return bool(sft.A[w[:-1], w[1:]].all())


def is_cyclically_admissible(sft, word):
    if len(word) == 0:
        return False
    return is_admissible(sft, tuple(word) + (word[0],))


def rotate(word, j):
    j %= len(word)
    return tuple(word[j:]) + tuple(word[:j])


def canonical(word):
    """Lexicographically least rotation of a cyclic word."""
    word = tuple(word)
    return min(rotate(word, j) for j in range(len(word)))


def primitive_root(word):
    """Shortest ``u`` with ``word == u * (len(word) // len(u))``."""
    word = tuple(word)
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


# ---------------------------------------------------------------- counting

def _int_matrix(sft):
    return np.array(sft.A.tolist(), dtype=object)


def _matpow(M, n):
    result = np.identity(M.shape[0], dtype=object)
    for i in range(M.shape[0]):
        result[i, i] = 1
    base = M
    while n:
        if n & 1:
            result = result.dot(base)
        base = base.dot(base)
        n >>= 1
    return result


def count_words(sft, n):
    """Number of admissible words of length ``n`` (sum of entries of A^(n-1))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return int(_matpow(_int_matrix(sft), n - 1).sum())


def trace_power(sft, n):
    """``trace(A^n)`` in exact integer arithmetic."""
    return int(np.trace(_matpow(_int_matrix(sft), n)))


def is_mixing(sft):
    """Return ``(True, n)`` with the least ``n`` such that A^n > 0, else ``(False, None)``.

    The search stops at Wielandt's bound ``d^2 - 2d + 2``.
    """
    d = sft.d
    A = sft.A.astype(bool)
    P = A.copy()
    bound = d * d - 2 * d + 2
    for n in range(1, bound + 1):
        if P.all():
            return True, n
        P = (P.astype(np.int64) @ A.astype(np.int64)) > 0
    return False, None


def spectral_radius(sft):
    return float(max(abs(np.linalg.eigvals(sft.A.astype(float)))))


def enumerate_words(sft, n):
    """All admissible ``n``-words as an ``(N, n)`` int array in lexicographic order."""
    words = np.arange(sft.d, dtype=np.int64)[:, None]
    for _ in range(n - 1):
        last = words[:, -1]
        rows, nxt = np.nonzero(sft.A[last])
        words = np.column_stack([words[rows], nxt])
    return words


def _extend(sft, words, steps):
    for _ in range(steps):
        rows, nxt = np.nonzero(sft.A[words[:, -1]])
        words = np.column_stack([words[rows], nxt])
    return words


def iter_words(sft, n, cyclic=False, max_rows=1 << 18):
    """Admissible ``n``-words in lexicographic chunks of at most about ``max_rows`` rows."""
    tail = 0
    while tail < n - 1 and sft.d ** (tail + 1) <= max_rows:
        tail += 1
    for head in enumerate_words(sft, n - tail):
        words = _extend(sft, head[None, :], tail)
        if cyclic:
            words = words[sft.A[words[:, -1], words[:, 0]].astype(bool)]
        if len(words):
            yield words


def enumerate_cyclic_words(sft, n):
    """All ``n``-words admissible as cyclic words: the fixed points of the n-th shift power."""
    words = enumerate_words(sft, n)
    keep = sft.A[words[:, -1], words[:, 0]].astype(bool)
    return words[keep]


# ---------------------------------------------------------------- skeleton

@dataclass(frozen=True, eq=False)
class Skeleton:
    """Higher-block graph: vertices are (k-1)-words, edges are admissible k-words.

    Edges are ordered lexicographically by their word, hence grouped by source
    vertex; ``indptr`` is the CSR row pointer over that order.  For ``k == 1``
    there is a single virtual vertex and one self-loop per symbol.
    """

    sft: Sft
    k: int
    vertex_words: np.ndarray  # (V, k-1)
    edge_words: np.ndarray    # (E, k)
    src: np.ndarray
    dst: np.ndarray
    indptr: np.ndarray
    _vertex_index: dict = field(repr=False, default=None)

    @property
    def n_vertices(self):
        return len(self.vertex_words)

    @property
    def n_edges(self):
        return len(self.edge_words)

    @property
    def exact(self):
        """Whether paths of the skeleton are exactly the points of the SFT."""
        return self.k >= 2 or self.sft.is_full

    def vertex_of(self, word):
        return self._vertex_index[tuple(int(s) for s in word)]

    def adjacency(self, weights=None):
        """Sparse ``V x V`` matrix summing ``weights`` over parallel edges."""
        if weights is None:
            weights = np.ones(self.n_edges)
        V = self.n_vertices
        return sparse.csr_matrix((weights, (self.src, self.dst)), shape=(V, V))

    def edge_code(self, words):
        """Base-d integer codes of k-words (rows of ``words``)."""
        words = np.atleast_2d(np.asarray(words, dtype=np.int64))
        powers = self.sft.d ** np.arange(self.k - 1, -1, -1, dtype=np.int64)
        return words @ powers

    def cycle_word(self, edge_cycle):
        """Cyclic symbol word traced by a closed sequence of edges."""
        return tuple(int(self.edge_words[e, 0]) for e in edge_cycle)


def k_block(sft, k, max_states=DEFAULT_STATE_BUDGET):
    """Build the depth-``k`` skeleton of ``sft``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    required = sft.d ** (k - 1)
    if required > max_states:
        raise StateBudgetExceeded(
            f"depth-{k} skeleton needs up to {required} states, budget is {max_states}",
            "k_block", required=required, allowed=max_states)
    if k == 1:
        vertex_words = np.zeros((1, 0), dtype=np.int64)
        edge_words = np.arange(sft.d, dtype=np.int64)[:, None]
        src = np.zeros(sft.d, dtype=np.int64)
        dst = np.zeros(sft.d, dtype=np.int64)
        indptr = np.array([0, sft.d], dtype=np.int64)
        return Skeleton(sft, 1, vertex_words, edge_words, src, dst, indptr, {(): 0})

    vertex_words = enumerate_words(sft, k - 1)
    edge_words = enumerate_words(sft, k)
    d = sft.d
    powers = d ** np.arange(k - 2, -1, -1, dtype=np.int64)
    lookup = np.full(d ** (k - 1), -1, dtype=np.int64)
    lookup[vertex_words @ powers] = np.arange(len(vertex_words))
    src = lookup[edge_words[:, :-1] @ powers]
    dst = lookup[edge_words[:, 1:] @ powers]
    indptr = np.searchsorted(src, np.arange(len(vertex_words) + 1)).astype(np.int64)
    index = None
    if len(vertex_words) <= 200_000:
        index = {tuple(row): i for i, row in enumerate(vertex_words.tolist())}
    return Skeleton(sft, k, vertex_words, edge_words, src, dst, indptr, index)


def presentation_depth(sft, k):
    """Smallest skeleton depth >= k that presents ``sft`` exactly."""
    return k if (k >= 2 or sft.is_full) else 2
