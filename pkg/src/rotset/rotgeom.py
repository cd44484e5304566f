"""Rotation sets of locally constant potentials.

Extreme invariant measures of a finite edge graph are the uniform measures
on simple cycles, so the rotation set is the convex hull of simple-cycle
means; its support function in direction ``u`` is the maximum cycle mean of
the scalar edge weights ``u . Phi(e)``.
"""

from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import CycleBudgetExceeded
from .geometry import (Hull, direction_grid, halfplane_polygon, hausdorff, hull,
                       interior_margin)
from .potential import birkhoff_mean, edge_values
from .sft import DEFAULT_STATE_BUDGET, k_block, presentation_depth

DEFAULT_CYCLE_BUDGET = 1_000_000
KARP_MAX_VERTICES = 400


@dataclass(frozen=True, eq=False)
class RotationPolytope:
    """Vertices of ``Rot(Phi)`` with one generating cyclic word per vertex."""

    vertices: np.ndarray
    cycles: list
    dim: int
    certified_gap: float = 0.0
    outer: Hull = field(default=None, repr=False)

    @property
    def m(self):
        return self.vertices.shape[1]

    def support(self, u):
        return float(np.max(self.vertices @ np.asarray(u, float)))

    def margin(self, x):
        return interior_margin(x, self.vertices, self.dim)

    def as_hull(self):
        return Hull(self.vertices, self.dim)

    def diameter(self):
        return self.as_hull().diameter()


@dataclass(frozen=True)
class SupportQuery:
    direction: np.ndarray
    value: float
    witness: tuple


def _skeleton_for(sft, p, max_states):
    sk = k_block(sft, presentation_depth(sft, p.k), max_states)
    return sk, edge_values(p, sk)


# ---------------------------------------------------------------- cycles

def simple_edge_cycles(sk, max_cycles=DEFAULT_CYCLE_BUDGET):
    """Yield simple cycles of the skeleton as lists of edge indices (Johnson's algorithm)."""
    if sk.k == 1:
        for e in range(sk.n_edges):
            yield [e]
        return
    G = nx.DiGraph()
    G.add_nodes_from(range(sk.n_vertices))
    lookup = {}
    for e, (u, v) in enumerate(zip(sk.src.tolist(), sk.dst.tolist())):
        G.add_edge(u, v)
        lookup[(u, v)] = e
    for count, nodes in enumerate(nx.simple_cycles(G)):
        if count >= max_cycles:
            raise CycleBudgetExceeded(
                f"more than {max_cycles} simple cycles; use approximate_rotation_polytope",
                "rotation_polytope", cap=max_cycles)
        yield [lookup[(nodes[i], nodes[(i + 1) % len(nodes)])] for i in range(len(nodes))]


def rotation_polytope(sft, p, max_cycles=DEFAULT_CYCLE_BUDGET, max_states=DEFAULT_STATE_BUDGET,
                      tol=1e-12):
    """Exact rotation polytope: hull of the means of all simple skeleton cycles."""
    p = p.as_table()
    sk, phi = _skeleton_for(sft, p, max_states)
    means, cycles = [], []
    for edges in simple_edge_cycles(sk, max_cycles):
        means.append(phi[edges].mean(axis=0))
        cycles.append(edges)
    means = np.array(means)
    h = hull(means, tol)
    words = []
    for v in h.vertices:
        i = int(np.argmin(np.abs(means - v).max(axis=1)))
        words.append(sk.cycle_word(cycles[i]))
    return RotationPolytope(h.vertices, words, h.dim)


# ---------------------------------------------------------------- max mean cycle

def _cycles_in_walk(vertices, edges):
    """Split a walk (vertex list of length L+1, edge list of length L) into its cycles."""
    pos = {}
    stack_v, stack_e = [], []
    found = []
    for i, v in enumerate(vertices):
        if v in pos:
            j = pos[v]
            cyc = stack_e[j:]
            found.append(list(cyc))
            for u in stack_v[j + 1:]:
                pos.pop(u, None)
            del stack_v[j + 1:]
            del stack_e[j:]
        else:
            pos[v] = len(stack_v)
            stack_v.append(v)
        if i < len(edges):
            stack_e.append(edges[i])
    return found


def _karp_scc(n, src, dst, w):
    """Karp's algorithm on a strongly connected graph with vertices ``0..n-1``."""
    E = len(src)
    D = np.full((n + 1, n), -np.inf)
    pred = np.full((n + 1, n), -1, dtype=np.int64)
    D[0, 0] = 0.0
    eidx = np.arange(E)
    for k in range(1, n + 1):
        cand = D[k - 1, src] + w
        np.maximum.at(D[k], dst, cand)
        hit = np.isfinite(cand) & (cand == D[k, dst])
        pred[k, dst[hit]] = eidx[hit]
    best, best_v = -np.inf, -1
    with np.errstate(invalid="ignore"):
        for v in range(n):
            if not np.isfinite(D[n, v]):
                continue
            ks = np.nonzero(np.isfinite(D[:n, v]))[0]
            val = np.min((D[n, v] - D[ks, v]) / (n - ks))
            if val > best:
                best, best_v = val, v
    # walk back n edges from best_v and take the best cycle on the walk
    vs, es = [best_v], []
    v = best_v
    for k in range(n, 0, -1):
        e = int(pred[k, v])
        es.append(e)
        v = int(src[e])
        vs.append(v)
    vs.reverse()
    es.reverse()
    cycles = _cycles_in_walk(vs, es)
    means = [w[c].mean() for c in cycles]
    i = int(np.argmax(means))
    return float(best), cycles[i], float(means[i])


def _policy_cycles(succ_vertex, policy):
    n = len(succ_vertex)
    state = np.zeros(n, dtype=np.int8)
    cycles = []
    sv = succ_vertex.tolist()
    for start in range(n):
        if state[start]:
            continue
        path = []
        v = start
        while not state[v]:
            state[v] = 1
            path.append(v)
            v = sv[v]
        if state[v] == 1:
            i = path.index(v)
            cycles.append([int(policy[u]) for u in path[i:]])
        for u in path:
            state[u] = 2
    return cycles


def _value_iteration(n, src, dst, w, indptr, tol=1e-12, max_iter=100_000, check_every=10):
    """Certified max mean cycle for large graphs where every vertex has an out-edge.

    Max-plus value iteration: ``max_v (x_{t+1} - x_t)(v)`` bounds the optimum
    from above, and every cycle of the greedy policy is an attained lower
    bound.  Stops when the two meet within ``tol``.
    """
    x = np.zeros(n)
    starts = indptr[:-1]
    best_val, best_cyc = -np.inf, None
    for it in range(1, max_iter + 1):
        cand = w + x[dst]
        xn = np.maximum.reduceat(cand, starts)
        upper = float(np.max(xn - x))
        if it % check_every == 1 or it == max_iter:
            # greedy policy: first edge of each row attaining the row maximum
            is_max = cand == np.repeat(xn, np.diff(indptr))
            first = np.flatnonzero(is_max)
            policy = first[np.searchsorted(first, starts)]
            for cyc in _policy_cycles(dst[policy], policy):
                val = float(w[cyc].mean())
                if val > best_val:
                    best_val, best_cyc = val, cyc
            if upper - best_val <= tol * (1 + abs(upper)):
                return best_val, best_cyc
        x = xn - xn.max()
    return best_val, best_cyc


def max_mean_cycle(sk, w, method="auto"):
    """Maximum cycle mean of edge weights ``w`` and an edge cycle attaining it.

    Karp's algorithm runs on each strongly connected component of small
    skeletons; large ones use certified value iteration.
    """
    w = np.asarray(w, float)
    n = sk.n_vertices
    if method == "auto":
        method = "karp" if n <= KARP_MAX_VERTICES else "value"
    if method == "value":
        return _value_iteration(n, sk.src, sk.dst, w, sk.indptr)
    ncomp, labels = connected_components(sk.adjacency(), directed=True, connection="strong")
    best = (-np.inf, None)
    for c in range(ncomp):
        inside = (labels[sk.src] == c) & (labels[sk.dst] == c)
        if not inside.any():
            continue
        verts = np.flatnonzero(labels == c)
        relabel = np.full(n, -1, dtype=np.int64)
        relabel[verts] = np.arange(len(verts))
        eids = np.flatnonzero(inside)
        val, cyc, cyc_mean = _karp_scc(len(verts), relabel[sk.src[eids]],
                                       relabel[sk.dst[eids]], w[eids])
        if cyc_mean > best[0]:
            best = (cyc_mean, [int(eids[e]) for e in cyc])
    return best


def support(sft, p, u, max_states=DEFAULT_STATE_BUDGET, method="auto"):
    """Support function of ``Rot(Phi)`` in direction ``u`` with a witness cycle."""
    p = p.as_table()
    u = np.atleast_1d(np.asarray(u, float))
    if not np.any(u):
        raise ValueError("direction must be nonzero")
    sk, phi = _skeleton_for(sft, p, max_states)
    _, cyc = max_mean_cycle(sk, phi @ u, method)
    witness = sk.cycle_word(cyc)
    value = float(birkhoff_mean(p, witness) @ u)
    return SupportQuery(u, value, witness)


def approximate_rotation_polytope(sft, p, n_directions=64, max_states=DEFAULT_STATE_BUDGET,
                                  method="auto"):
    """Inner/outer sandwich from support queries on a direction grid.

    ``vertices`` is the hull of the witness cycle means (an inner
    approximation); ``outer`` is the circumscribed polygon of supporting
    half-planes and ``certified_gap`` bounds their Hausdorff distance.
    """
    p = p.as_table()
    sk, phi = _skeleton_for(sft, p, max_states)
    U = direction_grid(n_directions, p.m)
    values, points, words = [], [], []
    for u in U:
        _, cyc = max_mean_cycle(sk, phi @ u, method)
        word = sk.cycle_word(cyc)
        mean = phi[cyc].mean(axis=0)
        points.append(mean)
        words.append(word)
        values.append(float(mean @ u))
    inner = hull(np.array(points))
    cyc_words = [words[int(np.argmin(np.abs(np.array(points) - v).max(axis=1)))]
                 for v in inner.vertices]
    if p.m == 1:
        return RotationPolytope(inner.vertices, cyc_words, inner.dim, 0.0, inner)
    outer = halfplane_polygon(U, values)
    gap = hausdorff(inner, outer)
    return RotationPolytope(inner.vertices, cyc_words, inner.dim, gap, outer)


# ---------------------------------------------------------------- sampling

def random_orbit_words(sft, length, trials, seed):
    """``trials`` random admissible words, uniform start and uniform successors."""
    rng = np.random.default_rng(seed)
    A = sft.A.astype(bool)
    outdeg = A.sum(axis=1)
    succ = np.zeros((sft.d, outdeg.max()), dtype=np.int64)
    for s in range(sft.d):
        succ[s, :outdeg[s]] = np.flatnonzero(A[s])
    words = np.empty((trials, length), dtype=np.int64)
    words[:, 0] = rng.integers(0, sft.d, size=trials)
    for j in range(1, length):
        cur = words[:, j - 1]
        words[:, j] = succ[cur, (rng.random(trials) * outdeg[cur]).astype(np.int64)]
    return words


def sample_pointwise(sft, p, n, trials, seed):
    """Birkhoff means over ``n`` steps of ``trials`` random admissible orbits."""
    depth = p.depth
    words = random_orbit_words(sft, n + depth - 1, trials, seed)
    out = np.empty((trials, p.m))
    if hasattr(p, "index_of"):
        for t in range(trials):
            windows = np.lib.stride_tricks.sliding_window_view(words[t], depth)[:n]
            out[t] = p.values[p.index_of(windows)].mean(axis=0)
        return out
    for t in range(trials):
        row = tuple(words[t].tolist())
        out[t] = np.mean([p.evaluate(row[j:j + depth]).value for j in range(n)], axis=0)
    return out
