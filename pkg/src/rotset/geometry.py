"""Convex hulls, support functions and Hausdorff distances for small point sets."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import ConvexHull, QhullError

from .errors import DimensionMismatch

HULL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Hull:
    """Extreme points of a finite set, counterclockwise when ``m == 2``.

    ``dim`` is the affine dimension of the hull; ``degenerate`` flags
    ``dim < m``.
    """

    vertices: np.ndarray
    dim: int

    @property
    def m(self):
        return self.vertices.shape[1]

    @property
    def degenerate(self):
        return self.dim < self.m

    def support(self, u):
        return float(np.max(self.vertices @ np.asarray(u, float)))

    def diameter(self):
        V = self.vertices
        if len(V) < 2:
            return 0.0
        diff = V[:, None, :] - V[None, :, :]
        return float(np.sqrt((diff ** 2).sum(-1)).max())

    def distance(self, x):
        return distance_to_hull(x, self.vertices, self.dim)

    def margin(self, x):
        """Signed distance from ``x`` to the boundary, positive inside.

        Lower-dimensional hulls have no interior; the margin is then minus the
        distance to the hull (zero for points on it).
        """
        return interior_margin(x, self.vertices, self.dim)

    def contains(self, x, tol=1e-9):
        return self.distance(x) <= tol


def affine_dim(points, tol=1e-9):
    P = np.asarray(points, float)
    if len(P) <= 1:
        return 0
    centred = P - P.mean(axis=0)
    s = np.linalg.svd(centred, compute_uv=False)
    scale = max(1.0, np.abs(P).max())
    return int((s > tol * scale).sum())


def _dedupe(P, tol):
    """Drop points that coincide on the ``tol`` grid, keeping first occurrences in order."""
    _, first = np.unique(np.round(P / tol), axis=0, return_index=True)
    return P[np.sort(first)]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull2d(P, tol):
    pts = sorted(map(tuple, P))
    if len(pts) <= 2:
        return np.array(pts)
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def hull(points, tol=HULL_TOL):
    """Convex hull of a finite point list.

    Exact monotone-chain arithmetic for ``m <= 2``; ``m >= 3`` uses Qhull.
    Lower-dimensional inputs return the hull inside their affine span.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0:
        raise ValueError("hull of an empty point set")
    m = P.shape[1]
    P = _dedupe(P, tol)
    dim = affine_dim(P)
    if dim == 0:
        return Hull(P[:1].copy(), 0)
    if dim == 1:
        centred = P - P[0]
        direction = np.linalg.svd(centred)[2][0]
        t = centred @ direction
        ends = P[[int(np.argmin(t)), int(np.argmax(t))]]
        ends = ends[np.lexsort(ends.T[::-1])]
        return Hull(ends, 1)
    if m == 2:
        return Hull(_hull2d(P, tol), 2)
    if dim < m:
        centre = P.mean(axis=0)
        basis = np.linalg.svd(P - centre)[2][:dim]
        sub = hull((P - centre) @ basis.T, tol)
        return Hull(sub.vertices @ basis + centre, dim)
    try:
        ch = ConvexHull(P)
    except QhullError:
        return Hull(P, dim)
    return Hull(P[np.sort(ch.vertices)], dim)


def _as_vertices(obj):
    if hasattr(obj, "vertices"):
        return np.atleast_2d(np.asarray(obj.vertices, float)), getattr(obj, "dim", None)
    V = np.atleast_2d(np.asarray(obj, float))
    return V, None


def _point_segment(x, a, b):
    ab = b - a
    denom = ab @ ab
    t = 0.0 if denom == 0 else float(np.clip((x - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(x - (a + t * ab)))


def distance_to_hull(x, vertices, dim=None):
    """Euclidean distance from ``x`` to ``conv(vertices)``."""
    x = np.asarray(x, float)
    V = np.atleast_2d(np.asarray(vertices, float))
    if dim is None:
        dim = affine_dim(V)
    if len(V) == 1:
        return float(np.linalg.norm(x - V[0]))
    m = V.shape[1]
    if m == 1:
        lo, hi = V.min(), V.max()
        return float(max(lo - x[0], x[0] - hi, 0.0))
    if dim == 1:
        h = hull(V)
        return _point_segment(x, h.vertices[0], h.vertices[1])
    if m == 2:
        h = hull(V).vertices
        n = len(h)
        inside = all(_cross(h[i], h[(i + 1) % n], x) >= 0 for i in range(n))
        if inside:
            return 0.0
        return min(_point_segment(x, h[i], h[(i + 1) % n]) for i in range(n))
    # m >= 3: project onto the simplex of convex weights
    k = len(V)

    def obj(lam):
        r = lam @ V - x
        return r @ r, 2 * V @ r

    res = minimize(obj, np.full(k, 1.0 / k), jac=True, method="SLSQP",
                   bounds=[(0, 1)] * k,
                   constraints=[{"type": "eq", "fun": lambda lam: lam.sum() - 1,
                                 "jac": lambda lam: np.ones(k)}],
                   options={"ftol": 1e-15, "maxiter": 500})
    return float(np.sqrt(max(res.fun, 0.0)))


def interior_margin(x, vertices, dim=None):
    x = np.asarray(x, float)
    V = np.atleast_2d(np.asarray(vertices, float))
    m = V.shape[1]
    if dim is None:
        dim = affine_dim(V)
    if dim < m:
        return -distance_to_hull(x, V, dim)
    if m == 1:
        return float(min(x[0] - V.min(), V.max() - x[0]))
    eq = ConvexHull(V).equations
    return float(np.min(-(eq[:, :-1] @ x + eq[:, -1])))


def hausdorff(P, Q):
    """Hausdorff distance between the convex hulls of two vertex sets.

    The distance to a convex set is convex, so its maximum over a polytope is
    attained at a vertex; vertex-to-polytope distances are therefore exact.
    """
    VP, dP = _as_vertices(P)
    VQ, dQ = _as_vertices(Q)
    if VP.shape[1] != VQ.shape[1]:
        raise DimensionMismatch("polytopes live in different dimensions", "hausdorff")
    a = max(distance_to_hull(v, VQ, dQ) for v in VP)
    b = max(distance_to_hull(v, VP, dP) for v in VQ)
    return max(a, b)


def direction_grid(n, m=2):
    """``n`` unit directions: equally spaced angles for ``m == 2``, ``+-1`` for ``m == 1``."""
    if m == 1:
        return np.array([[1.0], [-1.0]])
    if m != 2:
        raise DimensionMismatch("direction grids are implemented for m <= 2", "direction_grid")
    theta = 2 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(theta), np.sin(theta)])


def halfplane_polygon(directions, values):
    """Vertices of ``{x : u_i . x <= h_i}`` for a cyclically ordered direction grid."""
    U = np.asarray(directions, float)
    h = np.asarray(values, float)
    n = len(U)
    pts = []
    for i in range(n):
        j = (i + 1) % n
        M = np.array([U[i], U[j]])
        if abs(np.linalg.det(M)) < 1e-14:
            continue
        pts.append(np.linalg.solve(M, [h[i], h[j]]))
    pts = np.array(pts)
    keep = [p for p in pts if np.all(U @ p <= h + 1e-9 * (1 + np.abs(h)))]
    return hull(np.array(keep) if keep else pts)
