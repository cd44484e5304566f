"""Pressure function, equilibrium rotation vectors and the entropy function.

For a locally constant potential the pressure ``Q(T) = P_top(T . Phi)`` is the
log of the Perron eigenvalue of the skeleton matrix weighted by
``exp(T . Phi(e))``.  Its gradient is the rotation vector of the equilibrium
state, and the entropy function is recovered by Legendre duality,
``H(w) = Q(T*) - T* . w`` where ``grad Q(T*) = w``.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import NewtonStalled, NoConvergence, NotInterior
from .potential import edge_values, edge_weights
from .rotgeom import (CycleBudgetExceeded, approximate_rotation_polytope,
                      rotation_polytope)
from .sft import DEFAULT_STATE_BUDGET, k_block, presentation_depth

log = logging.getLogger(__name__)

DENSE_MAX = 256
POWER_TOL = 1e-13
POWER_MAX_ITER = 100_000
# exact hulls are tried first for interiority tests; large cycle spaces fall back to the sandwich
AUTO_CYCLE_BUDGET = 20_000


@dataclass(frozen=True, eq=False)
class PressureEval:
    """Perron data of the weighted skeleton at ``T``.

    The matrix is scaled by ``exp(-log_scale)`` before the eigen solve;
    ``scaled_eigenvalue`` refers to the scaled matrix, so the Perron root is
    ``exp(Q) = scaled_eigenvalue * exp(log_scale)``.
    """

    T: np.ndarray
    Q: float
    right: np.ndarray
    left: np.ndarray
    scaled_eigenvalue: float
    log_scale: float
    residual: float
    primitive: bool
    component: np.ndarray = field(repr=False)
    iterations: int = 0
    ws: object = field(default=None, repr=False)

    @property
    def eigenvalue(self):
        return math.exp(self.Q)


@dataclass
class EquilibriumSolution:
    w: np.ndarray
    T: np.ndarray
    Q: float
    rv: np.ndarray
    H: float
    iterations: int
    converged: bool
    grad_norm: float
    error: str = None

    def to_dict(self):
        return {"w": _list(self.w), "T": _list(self.T), "Q": self.Q, "rv": _list(self.rv),
                "H": self.H, "iterations": self.iterations, "converged": self.converged,
                "grad_norm": self.grad_norm, "error": self.error}


@dataclass
class InteriorVerdict:
    nonempty: bool
    min_eigenvalue: float
    probes: list
    null_direction: np.ndarray = None


def _list(x):
    return None if x is None else [float(v) for v in np.atleast_1d(x)]


# ---------------------------------------------------------------- Perron solver

@lru_cache(maxsize=64)
def _components(sk):
    """Strongly connected components that carry at least one edge."""
    ncomp, labels = connected_components(sk.adjacency(), directed=True, connection="strong")
    comps = []
    for c in range(ncomp):
        inside = (labels[sk.src] == c) & (labels[sk.dst] == c)
        if inside.any():
            comps.append((np.flatnonzero(labels == c), np.flatnonzero(inside)))
    return tuple(comps)


def _period(n, src, dst):
    """Period of a strongly connected graph (gcd of level differences along edges)."""
    A = sparse.csr_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
    order, preds = breadth_first_order(A, 0, directed=True, return_predecessors=True)
    level = np.zeros(n, dtype=np.int64)
    for v in order[1:]:
        level[v] = level[preds[v]] + 1
    diffs = np.abs(level[src] + 1 - level[dst])
    return int(np.gcd.reduce(diffs)) if len(diffs) else 1


def _perron_dense(M):
    vals, vecs = np.linalg.eig(M)
    i = int(np.argmax(vals.real))
    lam = float(vals[i].real)
    r = np.abs(vecs[:, i].real)
    lvals, lvecs = np.linalg.eig(M.T)
    j = int(np.argmax(lvals.real))
    ell = np.abs(lvecs[:, j].real)
    r /= r.max()
    ell /= ell.max()
    lam = float(ell @ M @ r / (ell @ r))
    return lam, r, ell, 0


def _perron_power(M, r0, l0, shift, tol, max_iter):
    n = M.shape[0]
    r = np.ones(n) if r0 is None else np.maximum(r0, 1e-300)
    ell = np.ones(n) if l0 is None else np.maximum(l0, 1e-300)
    MT = M.T.tocsr()
    lam = 0.0
    for it in range(1, max_iter + 1):
        Mr = M @ r
        lM = MT @ ell
        lam = float(ell @ Mr / (ell @ r))
        res_r = np.max(np.abs(Mr - lam * r)) / np.max(r)
        res_l = np.max(np.abs(lM - lam * ell)) / np.max(ell)
        if max(res_r, res_l) <= tol * lam:
            return lam, r / r.max(), ell / ell.max(), it
        r = Mr + shift * r
        ell = lM + shift * ell
        r /= r.max()
        ell /= ell.max()
    raise NoConvergence(f"power iteration did not converge in {max_iter} steps",
                        "pressure", residual=float(max(res_r, res_l) / lam))


def pressure(ws, r0=None, l0=None, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Log-Perron eigenvalue of a weighted skeleton with both eigenvectors.

    Reducible skeletons are solved per strongly connected component and the
    largest value is returned with ``primitive=False``.
    """
    sk = ws.skeleton
    comps = _components(sk)
    best = None
    for verts, eids in comps:
        nv = len(verts)
        relabel = np.full(sk.n_vertices, -1, dtype=np.int64)
        relabel[verts] = np.arange(nv)
        s, t = relabel[sk.src[eids]], relabel[sk.dst[eids]]
        logw = ws.log_weights[eids]
        c = float(logw.max())
        M = sparse.csr_matrix((np.exp(logw - c), (s, t)), shape=(nv, nv))
        if nv <= DENSE_MAX:
            lam, r, ell, its = _perron_dense(M.toarray())
        else:
            shift = 0.0 if _period(nv, s, t) == 1 else 1.0
            rr = None if r0 is None or len(comps) > 1 else r0[verts]
            ll = None if l0 is None or len(comps) > 1 else l0[verts]
            lam, r, ell, its = _perron_power(M, rr, ll, shift, tol, int(max_iter))
        Q = math.log(lam) + c
        if best is None or Q > best[0]:
            res = max(np.max(np.abs(M @ r - lam * r)), np.max(np.abs(M.T @ ell - lam * ell)))
            best = (Q, verts, eids, r, ell, lam, c, res / lam, its)
    Q, verts, eids, r, ell, lam, c, res, its = best
    right = np.zeros(sk.n_vertices)
    left = np.zeros(sk.n_vertices)
    right[verts] = r
    left[verts] = ell
    return PressureEval(ws.T.copy(), Q, right, left, lam, c, float(res), len(comps) == 1,
                        eids, its, ws)


def gibbs_edge_measure(ev):
    """Equilibrium measure of the edges: ``l(src) w(e) r(dst) / (lambda l.r)``."""
    ws = ev.ws
    sk = ws.skeleton
    mu = np.zeros(sk.n_edges)
    e = ev.component
    w = np.exp(ws.log_weights[e] - ev.log_scale)
    mu[e] = ev.left[sk.src[e]] * w * ev.right[sk.dst[e]]
    return mu / mu.sum()


def grad_pressure(ev):
    """Rotation vector of the equilibrium state, ``grad Q(T)``."""
    mu = gibbs_edge_measure(ev)
    return mu @ ev.ws.phi


def equilibrium_entropy(ev):
    """Entropy of the equilibrium state, ``Q(T) - T . grad Q(T)``."""
    return float(ev.Q - ev.T @ grad_pressure(ev))


# ---------------------------------------------------------------- system wrapper

class ThermoSystem:
    """Skeleton, edge potential and warm-started pressure evaluations for one (Sft, Phi)."""

    def __init__(self, sft, p, max_states=DEFAULT_STATE_BUDGET, polytope=None):
        self.sft = sft
        self.p = p.as_table()
        self.skeleton = k_block(sft, presentation_depth(sft, self.p.k), max_states)
        self.phi = edge_values(self.p, self.skeleton)
        self._polytope = polytope
        self._last = None

    @property
    def m(self):
        return self.p.m

    def weighted(self, T):
        return edge_weights(self.p, self.skeleton, T, phi=self.phi)

    def pressure(self, T):
        T = np.atleast_1d(np.asarray(T, float))
        r0 = l0 = None
        if self._last is not None and self.skeleton.n_vertices > DENSE_MAX:
            r0, l0 = self._last.right, self._last.left
        ev = pressure(self.weighted(T), r0, l0)
        self._last = ev
        return ev

    def Q(self, T):
        return self.pressure(T).Q

    def grad(self, T):
        return grad_pressure(self.pressure(T))

    def hessian(self, T, h=None):
        """Symmetrised central differences of the exact gradient."""
        T = np.atleast_1d(np.asarray(T, float))
        if h is None:
            h = max(1e-4, 1e-4 * np.linalg.norm(T))
        m = len(T)
        Hm = np.empty((m, m))
        for j in range(m):
            e = np.zeros(m)
            e[j] = h
            Hm[:, j] = (self.grad(T + e) - self.grad(T - e)) / (2 * h)
        return 0.5 * (Hm + Hm.T)

    def hessian_from_pressure(self, T, h=None):
        """Second central differences of ``Q`` itself (noisier; for cross-checks)."""
        T = np.atleast_1d(np.asarray(T, float))
        if h is None:
            h = max(1e-4, 1e-4 * np.linalg.norm(T))
        m = len(T)
        Hm = np.empty((m, m))
        q0 = self.Q(T)
        for i in range(m):
            for j in range(i, m):
                ei = np.zeros(m)
                ej = np.zeros(m)
                ei[i] = h
                ej[j] = h
                if i == j:
                    Hm[i, i] = (self.Q(T + ei) - 2 * q0 + self.Q(T - ei)) / h ** 2
                else:
                    Hm[i, j] = Hm[j, i] = (self.Q(T + ei + ej) - self.Q(T + ei - ej)
                                           - self.Q(T - ei + ej) + self.Q(T - ei - ej)) / (4 * h * h)
        return Hm

    @property
    def polytope(self):
        if self._polytope is None:
            try:
                if self.skeleton.n_vertices > 4096:
                    raise CycleBudgetExceeded("skeleton too large for cycle enumeration",
                                              "rotation_polytope")
                self._polytope = rotation_polytope(self.sft, self.p, max_cycles=AUTO_CYCLE_BUDGET)
            except CycleBudgetExceeded:
                self._polytope = approximate_rotation_polytope(self.sft, self.p)
        return self._polytope


@lru_cache(maxsize=16)
def _cached_system(sft, p):
    return ThermoSystem(sft, p)


def system_for(sft, p):
    """Shared :class:`ThermoSystem` for repeated queries on the same objects."""
    return _cached_system(sft, p.as_table())


# ---------------------------------------------------------------- public operations

def hessian_pressure(sft, p, T, h=None):
    return system_for(sft, p).hessian(T, h)


def _newton_step(J, F, rel_floor=1e-10):
    """Newton step ``-J^{-1} F`` with the Hessian's eigenvalues floored.

    Far out in ``T`` the equilibrium state freezes onto a vertex and the
    Hessian vanishes (and its finite-difference estimate may turn slightly
    indefinite).  Flooring keeps the matrix positive definite, so the step is
    always a descent direction for the convex dual ``Q(T) - T . w``.
    """
    vals, vecs = np.linalg.eigh(0.5 * (J + J.T))
    if not np.all(np.isfinite(vals)) or not np.all(np.isfinite(F)):
        return None
    floor = rel_floor * max(float(np.abs(vals).max()), float(np.linalg.norm(F)), 1e-300)
    vals = np.maximum(vals, floor)
    return -vecs @ ((vecs.T @ F) / vals)


def solve_rotation(sft, p, w, T0=None, tol=1e-11, margin=1e-9, max_iter=200, max_step=10.0,
                   system=None):
    """Entropy ``H(w)`` by damped Newton on ``grad Q(T) = w``.

    Steps are capped at ``max_step`` and backtracked until the convex dual
    ``Q(T) - T . w`` (minimised exactly at ``T*``) shows an Armijo decrease;
    the residual ``|grad Q(T) - w|`` takes over once the dual only moves by
    rounding.  Raises :class:`NotInterior` when ``w`` is not strictly inside the rotation
    polytope and :class:`NewtonStalled` when the line search fails, which is
    expected for targets close to the boundary where ``|T*|`` blows up.
    """
    sys_ = system or system_for(sft, p)
    w = np.atleast_1d(np.asarray(w, float))
    poly = sys_.polytope
    dist = poly.margin(w)
    if dist <= margin or poly.dim < sys_.m:
        raise NotInterior(f"target {w.tolist()} is not interior (margin {dist:.3g})",
                          "solve_rotation", w=w.tolist(), distance=dist)
    T = np.zeros(sys_.m) if T0 is None else np.array(T0, float)
    ev = sys_.pressure(T)
    F = grad_pressure(ev) - w
    norm = float(np.linalg.norm(F))
    g = ev.Q - T @ w
    it = 0
    while norm > tol:
        if it >= max_iter:
            raise NewtonStalled(f"no convergence in {max_iter} Newton steps", "solve_rotation",
                                T=T.tolist(), grad_norm=norm, iterations=it)
        it += 1
        step = _newton_step(sys_.hessian(T), F)
        if step is None:
            raise NewtonStalled("non-finite Hessian", "solve_rotation", T=T.tolist(),
                                grad_norm=norm, iterations=it)
        size = np.linalg.norm(step)
        if size > max_step:
            step *= max_step / size
        slope = float(F @ step)
        alpha = 1.0
        for _ in range(60):
            T_try = T + alpha * step
            ev_try = sys_.pressure(T_try)
            F_try = grad_pressure(ev_try) - w
            n_try = float(np.linalg.norm(F_try))
            g_try = ev_try.Q - T_try @ w
            # residual decrease, or Armijo decrease of the convex dual Q(T) - T.w;
            # the dual test carries the iterate back off the frozen plateau far out in T
            if n_try <= tol or g_try <= g + 1e-4 * alpha * slope:
                break
            # close to T* the dual moves by rounding only; fall back on the residual
            if (g_try <= g + 1e-13 * max(1.0, abs(g))
                    and n_try <= (1 - 1e-4 * alpha) * norm):
                break
            alpha *= 0.5
        else:
            raise NewtonStalled("line search failed", "solve_rotation", T=T.tolist(),
                                grad_norm=norm, last_step=(alpha * step).tolist(), iterations=it)
        T, ev, F, norm, g = T_try, ev_try, F_try, n_try, g_try
    rv = grad_pressure(ev)
    H = float(ev.Q - T @ w)
    return EquilibriumSolution(w, T, ev.Q, rv, H, it, True, norm)


def entropy_profile(sft, p, grid, **kwargs):
    """``solve_rotation`` over a grid with warm starts; failures are recorded, not raised."""
    out = []
    T0 = None
    for w in grid:
        w = np.atleast_1d(np.asarray(w, float))
        try:
            sol = solve_rotation(sft, p, w, T0=T0, **kwargs)
            T0 = sol.T
        except (NotInterior, NewtonStalled, NoConvergence) as exc:
            sol = EquilibriumSolution(w, np.full(len(w), np.nan), math.nan,
                                      np.full(len(w), np.nan), math.nan, 0, False, math.nan,
                                      f"{type(exc).__name__}: {exc}")
        out.append(sol)
    return out


def interior_probe(sft, p, probes=None, tol=1e-7):
    """Decide whether ``Rot(Phi)`` has interior from Hessian definiteness at probe points.

    A singular Hessian means some nontrivial combination ``u . Phi`` has zero
    asymptotic variance, i.e. is cohomologous to a constant; the null
    eigenvector is returned as witness.
    """
    sys_ = system_for(sft, p)
    m = sys_.m
    if probes is None:
        probes = [np.zeros(m)] + [s * e for e in np.eye(m) for s in (1.0, -1.0)]
    min_eig, null_dir = math.inf, None
    scale = 0.0
    for T in probes:
        vals, vecs = np.linalg.eigh(sys_.hessian(T))
        scale = max(scale, float(vals.max()))
        if vals[0] < min_eig:
            min_eig = float(vals[0])
            null_dir = vecs[:, 0]
    threshold = tol * max(1.0, scale)
    nonempty = min_eig > threshold
    if null_dir is not None:
        k = int(np.argmax(np.abs(null_dir) > 1e-8))
        null_dir = null_dir * np.sign(null_dir[k])
    return InteriorVerdict(bool(nonempty), min_eig, [list(map(float, T)) for T in probes],
                           None if nonempty else null_dir)


def level_curve(sft, p, R, samples):
    """Rotation vectors of equilibrium states on the sphere ``|T| = R``."""
    sys_ = system_for(sft, p)
    m = sys_.m
    if R == 0:
        return np.array([sys_.grad(np.zeros(m))])
    if m == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif m == 2:
        theta = 2 * np.pi * np.arange(samples) / samples
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        raise ValueError("level curves are implemented for m <= 2")
    return np.array([sys_.grad(R * u) for u in dirs])
