"""Vector-valued potentials on subshifts.

Three representations share a small duck-typed surface (``m``, ``sft``,
``evaluate(prefix)``, ``as_table()``):

* :class:`TablePotential` - locally constant, one vector per admissible k-word;
* ``construct2d.StagedPotential`` - a stage of the planar construction;
* ``gallery.Example2Potential`` - the polygon example with run-length levels.

Only table potentials attach to skeletons; the other two export a table.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (BadDimension, BadSpec, DepthMismatch, InadmissibleKey,
                     InsufficientPrefix, MissingWord, UnresolvablePotential)
from .sft import enumerate_words, format_word, is_admissible, parse_word


@dataclass(frozen=True)
class EvaluatedValue:
    value: np.ndarray
    error_bound: float = 0.0


@dataclass(frozen=True)
class BirkhoffSum:
    n: int
    sum: tuple
    mean: tuple


class TablePotential:
    """Locally constant potential of depth ``k`` given by a table on k-words.

    ``words`` enumerates every admissible k-word in lexicographic order and
    ``values[i]`` is the vector assigned to ``words[i]``.  When the table was
    supplied as exact rationals, ``exact_values`` keeps them as tuples of
    :class:`fractions.Fraction`.
    """

    def __init__(self, sft, k, values, exact_values=None, words=None):
        self.sft = sft
        self.k = int(k)
        self.words = enumerate_words(sft, self.k) if words is None else words
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if len(values) != len(self.words):
            raise BadDimension("table length does not match the admissible word count",
                               "parse_potential", expected=len(self.words), got=len(values))
        values.setflags(write=False)
        self.values = values
        self.exact_values = exact_values
        self._codes = self.words @ (sft.d ** np.arange(self.k - 1, -1, -1, dtype=np.int64))

    @property
    def m(self):
        return self.values.shape[1]

    @property
    def depth(self):
        return self.k

    @property
    def is_exact(self):
        return self.exact_values is not None

    def __repr__(self):
        return f"TablePotential(m={self.m}, k={self.k}, entries={len(self.words)})"

    # construction helpers
    @classmethod
    def from_mapping(cls, sft, k, mapping):
        """Build from ``{word: vector}``; all admissible k-words are required."""
        words = enumerate_words(sft, k)
        keyed = {}
        for key, vec in mapping.items():
            w = parse_word(key, sft.d)
            if len(w) != k or not is_admissible(sft, w):
                raise InadmissibleKey(f"key {format_word(w, sft.d)!r} is not an admissible {k}-word",
                                      "parse_potential", key=format_word(w, sft.d))
            keyed[w] = vec
        rows = []
        for w in map(tuple, words.tolist()):
            if w not in keyed:
                raise MissingWord(f"no entry for admissible word {format_word(w, sft.d)!r}",
                                  "parse_potential", word=format_word(w, sft.d))
            rows.append(keyed[w])
        dims = {len(np.atleast_1d(r)) for r in rows}
        if len(dims) != 1:
            raise BadDimension("table entries have inconsistent dimensions", "parse_potential",
                               dims=sorted(dims))
        exact = None
        if all(_is_exact_vector(r) for r in rows):
            exact = [tuple(Fraction(x) for x in np.atleast_1d(r)) for r in rows]
            floats = [[float(x) for x in e] for e in exact]
        else:
            floats = [[float(Fraction(x)) if isinstance(x, str) else float(x)
                       for x in np.atleast_1d(r)] for r in rows]
        return cls(sft, k, np.array(floats, dtype=float), exact, words)

    @classmethod
    def from_function(cls, sft, k, func):
        """Tabulate ``func(word) -> vector`` over all admissible k-words."""
        words = enumerate_words(sft, k)
        values = np.array([np.atleast_1d(func(tuple(w))) for w in words.tolist()], dtype=float)
        return cls(sft, k, values, words=words)

    def affine(self, scale=1.0, shift=0.0):
        """Table of ``scale * Phi + shift``."""
        return TablePotential(self.sft, self.k, self.values * scale + np.asarray(shift, float),
                              words=self.words)

    def as_table(self):
        return self

    # lookup
    def index_of(self, words):
        words = np.atleast_2d(np.asarray(words, dtype=np.int64))[:, :self.k]
        codes = words @ (self.sft.d ** np.arange(self.k - 1, -1, -1, dtype=np.int64))
        idx = np.searchsorted(self._codes, codes)
        idx = np.minimum(idx, len(self._codes) - 1)
        if (self._codes[idx] != codes).any():
            raise InadmissibleKey("word not in table", "evaluate")
        return idx

    def value_of(self, word):
        return self.values[self.index_of([tuple(word)[:self.k]])[0]]

    def evaluate(self, prefix):
        prefix = tuple(prefix)
        if len(prefix) < self.k:
            raise InsufficientPrefix(f"need {self.k} symbols, got {len(prefix)}", "evaluate",
                                     needed=self.k, got=len(prefix))
        return EvaluatedValue(self.value_of(prefix).copy(), 0.0)

    def to_json(self):
        entries = {}
        for i, w in enumerate(self.words.tolist()):
            key = format_word(w, self.sft.d)
            if self.exact_values is not None:
                entries[key] = [_fraction_json(x) for x in self.exact_values[i]]
            else:
                entries[key] = [float(x) for x in self.values[i]]
        return {"kind": "table", "m": self.m, "k": self.k, "entries": entries}


def _is_exact_vector(vec):
    for x in np.atleast_1d(np.asarray(vec, dtype=object)):
        if isinstance(x, (bool, np.bool_)):
            return False
        if isinstance(x, (int, np.integer, Fraction)):
            continue
        if isinstance(x, str):
            try:
                Fraction(x)
            except ValueError:
                return False
            continue
        return False
    return True


def _fraction_json(x):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------- evaluation

def evaluate(p, prefix):
    """Value of ``p`` on the cylinder of ``prefix`` together with an error bound."""
    prefix = tuple(prefix)
    if not is_admissible(p.sft, prefix):
        raise InadmissibleKey(f"prefix {format_word(prefix, p.sft.d)!r} is not admissible",
                              "evaluate")
    return p.evaluate(prefix)


def orbit_values(p, word):
    """``Phi(sigma^j x)`` for ``j < n`` along the periodic point ``x = word^inf``."""
    word = tuple(word)
    n = len(word)
    if hasattr(p, "orbit_values"):
        return np.asarray(p.orbit_values(word), dtype=float)
    depth = p.depth
    reps = -(-(n + depth) // n) + 1
    unrolled = word * reps
    if isinstance(p, TablePotential):
        rows = np.array([unrolled[j:j + depth] for j in range(n)], dtype=np.int64)
        return p.values[p.index_of(rows)]
    out = []
    for j in range(n):
        ev = p.evaluate(unrolled[j:j + depth])
        if ev.error_bound > 0:
            raise UnresolvablePotential("potential not exactly evaluable along the orbit",
                                        "birkhoff_mean", error_bound=ev.error_bound)
        out.append(ev.value)
    return np.array(out, dtype=float)


def birkhoff_mean(p, word, exact=False):
    """Average of ``p`` along the periodic orbit of the cyclic word ``word``.

    With ``exact=True`` the table's rational entries are summed exactly and a
    tuple of Fractions is returned.
    """
    word = tuple(word)
    if len(word) == 0:
        raise ValueError("empty cyclic word")
    if not is_admissible(p.sft, word + word[:1]):
        raise InadmissibleKey("word is not cyclically admissible", "birkhoff_mean")
    if exact:
        s = birkhoff_sum(p, word, exact=True)
        return s.mean
    return orbit_values(p, word).mean(axis=0)


def birkhoff_sum(p, word, exact=False):
    word = tuple(word)
    n = len(word)
    if exact:
        if not getattr(p, "is_exact", False):
            raise UnresolvablePotential("exact Birkhoff sums need an exact table", "birkhoff_mean")
        reps = -(-(n + p.k) // n) + 1
        unrolled = word * reps
        idx = p.index_of([unrolled[j:j + p.k] for j in range(n)])
        total = [Fraction(0)] * p.m
        for i in idx:
            total = [a + b for a, b in zip(total, p.exact_values[i])]
        return BirkhoffSum(n, tuple(total), tuple(t / n for t in total))
    vals = orbit_values(p, word)
    total = vals.sum(axis=0)
    return BirkhoffSum(n, tuple(total), tuple(total / n))


# ---------------------------------------------------------------- skeletons

@dataclass(frozen=True, eq=False)
class WeightedSkeleton:
    """Skeleton with per-edge potential vectors and weights ``exp(T . Phi(e))``.

    Weights are kept in log form; ``weights`` exponentiates on demand.
    """

    skeleton: object
    phi: np.ndarray
    T: np.ndarray
    log_weights: np.ndarray

    @property
    def weights(self):
        return np.exp(self.log_weights)


def edge_values(p, sk):
    """``(E, m)`` array: the potential read off each edge word of ``sk``."""
    if sk.k < p.k:
        raise DepthMismatch(f"skeleton depth {sk.k} is below potential depth {p.k}",
                            "edge_weights", skeleton_depth=sk.k, potential_depth=p.k)
    return p.values[p.index_of(sk.edge_words[:, :p.k])]


def edge_weights(p, sk, T, phi=None):
    p = p.as_table()
    T = np.atleast_1d(np.asarray(T, dtype=float))
    if T.shape != (p.m,):
        raise BadDimension(f"T has shape {T.shape}, potential dimension is {p.m}", "edge_weights")
    if phi is None:
        phi = edge_values(p, sk)
    return WeightedSkeleton(sk, phi, T, phi @ T)


# ---------------------------------------------------------------- parsing

def parse_potential(doc, sft):
    """Build a potential from its self-describing JSON mapping."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise BadSpec("potential spec needs a 'kind' field", "parse_potential")
    kind = doc["kind"]
    if kind == "table":
        try:
            k = int(doc["k"])
            entries = doc["entries"]
        except (KeyError, TypeError, ValueError) as exc:
            raise BadSpec(f"malformed table spec: {exc}", "parse_potential") from None
        p = TablePotential.from_mapping(sft, k, entries)
        if "m" in doc and int(doc["m"]) != p.m:
            raise BadDimension(f"declared m={doc['m']} but entries have dimension {p.m}",
                               "parse_potential")
        return p
    if kind == "construct2d":
        from .construct2d import staged_potential_from_json
        return staged_potential_from_json(doc, sft)
    if kind == "example2":
        from .gallery import example2_from_json
        return example2_from_json(doc, sft)
    raise BadSpec(f"unknown potential kind {kind!r}", "parse_potential")
