"""A continuous potential on the full 2-shift whose rotation set is a prescribed planar K.

The potential is the uniform limit of stages ``Phi_n``.  Stage ``n`` is
constant on cylinders of length ``m_n`` (``m_0 = 1``, ``m_{n+1} = 3^{n+1} m_n``)
and takes values at ``2^{n+1}`` equidistant boundary points of K plus points
inherited from earlier stages.  Each stage stores only the cylinders it
changes; every other cylinder falls through to the previous stage.

Boundary points are addressed by normalised arc length ``s`` (perimeter 1,
``s`` taken mod 1).  Positions are exact dyadic Fractions; coordinates are
floats.  All certificate distances are reported in normalised units, i.e.
divided by the perimeter, which is the same as scaling K to perimeter one.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (DegenerateCurve, InsufficientPrefix, NonConvex, StageOverflow,
                     TableBudgetExceeded)
from .geometry import hull
from .potential import EvaluatedValue, TablePotential
from .sft import full_shift

DEFAULT_MAX_WORD_LENGTH = 729
DEFAULT_TABLE_BUDGET = 1 << 12


# ---------------------------------------------------------------- boundary

class Boundary:
    """Closed convex curve parameterised by normalised arc length."""

    def __init__(self, kind, center=None, radius=None, vertices=None):
        self.kind = kind
        if kind == "circle":
            self.center = np.asarray(center, float)
            self.radius = float(radius)
            self.length = 2 * math.pi * self.radius
        else:
            self.vertices = np.asarray(vertices, float)
            edges = np.roll(self.vertices, -1, axis=0) - self.vertices
            self._edge_len = np.hypot(edges[:, 0], edges[:, 1])
            self._cum = np.concatenate([[0.0], np.cumsum(self._edge_len)])
            self.length = float(self._cum[-1])

    def __repr__(self):
        if self.kind == "circle":
            return f"Boundary(circle, center={self.center.tolist()}, radius={self.radius})"
        return f"Boundary(polyline, {len(self.vertices)} vertices)"

    def point_at(self, s):
        """Point at normalised arc length ``s`` (mod 1), counterclockwise from ``s = 0``."""
        s = Fraction(s) % 1 if isinstance(s, (Fraction, int)) else float(s) % 1.0
        if self.kind == "circle":
            theta = 2 * math.pi * float(s)
            return self.center + self.radius * np.array([math.cos(theta), math.sin(theta)])
        t = float(s) * self.length
        i = int(np.searchsorted(self._cum, t, side="right") - 1)
        i = min(max(i, 0), len(self.vertices) - 1)
        frac = 0.0 if self._edge_len[i] == 0 else (t - self._cum[i]) / self._edge_len[i]
        a = self.vertices[i]
        b = self.vertices[(i + 1) % len(self.vertices)]
        return a + frac * (b - a)

    def arclength(self, s):
        """Un-normalised arc length from the start point to parameter ``s``."""
        return float(s) * self.length

    def support(self, u):
        u = np.asarray(u, float)
        if self.kind == "circle":
            return float(self.center @ u + self.radius * np.linalg.norm(u))
        return float(np.max(self.vertices @ u))

    def distance_to_curve(self, x):
        x = np.asarray(x, float)
        if self.kind == "circle":
            return abs(float(np.linalg.norm(x - self.center)) - self.radius)
        V = self.vertices
        best = math.inf
        for i in range(len(V)):
            a, b = V[i], V[(i + 1) % len(V)]
            ab = b - a
            t = float(np.clip((x - a) @ ab / (ab @ ab), 0, 1))
            best = min(best, float(np.linalg.norm(x - a - t * ab)))
        return best

    def contains(self, x, tol=1e-9):
        x = np.asarray(x, float)
        if self.kind == "circle":
            return float(np.linalg.norm(x - self.center)) <= self.radius + tol
        V = self.vertices
        for i in range(len(V)):
            a, b = V[i], V[(i + 1) % len(V)]
            cross = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])
            if cross < -tol * max(1.0, float(np.linalg.norm(b - a))):
                return False
        return True

    def hausdorff_to(self, points, n_directions=4096):
        """Hausdorff distance between ``conv(points)`` and K via support functions.

        For convex sets ``d_H(A, B) = sup_u |h_A(u) - h_B(u)|``; the supremum is
        taken over a fine direction grid together with the edge normals of the
        point hull, where the extremes of a polygon-vs-K gap sit.
        """
        P = hull(points).vertices
        theta = 2 * np.pi * np.arange(n_directions) / n_directions
        U = [np.column_stack([np.cos(theta), np.sin(theta)])]
        if len(P) >= 2:
            E = np.roll(P, -1, axis=0) - P
            normals = np.column_stack([E[:, 1], -E[:, 0]])
            norms = np.linalg.norm(normals, axis=1)
            U.append(normals[norms > 0] / norms[norms > 0, None])
        U = np.vstack(U)
        hP = (U @ P.T).max(axis=1)
        if self.kind == "circle":
            hK = U @ self.center + self.radius
        else:
            hK = (U @ self.vertices.T).max(axis=1)
        return float(np.max(np.abs(hK - hP)))

    def to_json(self):
        if self.kind == "circle":
            return {"type": "circle", "center": self.center.tolist(), "radius": self.radius}
        return {"type": "polyline", "vertices": self.vertices.tolist()}


def make_boundary(spec):
    """Build a :class:`Boundary` from ``{"type": "circle"|"polyline", ...}``.

    Polylines are reoriented counterclockwise and start at their first listed
    vertex; circles start at angle zero.
    """
    kind = spec.get("type")
    if kind == "circle":
        r = float(spec.get("radius", 0))
        if not r > 0:
            raise DegenerateCurve("circle radius must be positive", "make_boundary", radius=r)
        return Boundary("circle", center=spec.get("center", (0.0, 0.0)), radius=r)
    if kind != "polyline":
        raise DegenerateCurve(f"unknown boundary type {kind!r}", "make_boundary")
    V = np.asarray(spec["vertices"], float)
    if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3:
        raise DegenerateCurve("need at least three planar vertices", "make_boundary")
    area = 0.5 * float(np.sum(V[:, 0] * np.roll(V[:, 1], -1) - np.roll(V[:, 0], -1) * V[:, 1]))
    scale = max(1.0, float(np.abs(V).max())) ** 2
    if abs(area) <= 1e-12 * scale:
        raise DegenerateCurve("vertices are collinear", "make_boundary")
    if area < 0:
        V = np.vstack([V[:1], V[:0:-1]])
    n = len(V)
    for i in range(n):
        a, b, c = V[i - 1], V[i], V[(i + 1) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross < -1e-12 * scale:
            raise NonConvex("boundary turns clockwise", "make_boundary",
                            witness=[a.tolist(), b.tolist(), c.tolist()])
    return Boundary("polyline", vertices=V)


def circle(center=(0.0, 0.0), radius=1 / (2 * math.pi)):
    return make_boundary({"type": "circle", "center": list(center), "radius": radius})


def unit_square():
    return make_boundary({"type": "polyline", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]})


# ---------------------------------------------------------------- stages

def _flip_last(word):
    return word[:-1] + bytes([1 - word[-1]])


def _rot(word, k):
    k %= len(word)
    return word[k:] + word[:k]


@dataclass(eq=False)
class ConstructionState:
    """Stage ``n`` of the construction.

    ``positions[j]`` is the arc-length position of ``w_{n,j+1}`` and
    ``generators[j]`` the generator word of the original cylinder
    ``C_{n,j+1}``.  ``overrides`` maps ``m_n``-words (as bytes over {0, 1}) to
    the positions this stage assigns; everything else falls through to
    ``previous``.
    """

    boundary: Boundary
    n: int
    m: int
    positions: list
    generators: list
    overrides: dict = field(repr=False)
    previous: "ConstructionState" = field(default=None, repr=False)

    def position_of(self, word):
        """Arc-length position of ``Phi_n`` on the cylinder of ``word`` (``len >= m_n``)."""
        state = self
        while True:
            key = bytes(word[:state.m])
            pos = state.overrides.get(key)
            if pos is not None:
                return pos
            if state.previous is None:
                raise KeyError(key)
            state = state.previous

    def value_of(self, word):
        return self.boundary.point_at(self.position_of(word))

    def points(self):
        """The ``2^{n+1}`` equidistant boundary points ``w_{n,j}``."""
        return np.array([self.boundary.point_at(s) for s in self.positions])

    def orbit_positions(self, word):
        """Positions of ``Phi_n`` along the periodic orbit of ``word`` (as bytes)."""
        word = bytes(word)
        reps = -(-self.m // len(word)) + 1
        unrolled = word * reps
        return [self.position_of(unrolled[k:k + self.m]) for k in range(len(word))]

    def orbit_average(self, word):
        """Rotation vector of the periodic orbit of ``word`` (integer visit counts over the period)."""
        counts = {}
        for pos in self.orbit_positions(word):
            counts[pos] = counts.get(pos, 0) + 1
        total = len(word)
        acc = sum(c * self.boundary.point_at(pos) for pos, c in counts.items())
        return np.asarray(acc, float) / total

    def targets(self):
        """``w*_{n,j}``: rotation vectors of the generator orbits."""
        return np.array([self.orbit_average(g) for g in self.generators])

    def chain(self):
        out, s = [], self
        while s is not None:
            out.append(s)
            s = s.previous
        return out[::-1]


@dataclass
class StageCertificate:
    stage: int
    sup_diff: float
    sup_bound: float
    defects: float
    defect_bound: float
    n_overrides: int
    conflicts: int
    targets_in_K: bool
    points_on_boundary: float

    @property
    def ok(self):
        return (self.sup_diff <= self.sup_bound + 1e-12 and self.defects <= self.defect_bound
                + 1e-12 and self.targets_in_K and self.conflicts == 0)

    def to_dict(self):
        return {"stage": self.stage, "sup_diff": self.sup_diff, "sup_bound": self.sup_bound,
                "defects": self.defects, "defect_bound": self.defect_bound,
                "n_overrides": self.n_overrides, "conflicts": self.conflicts,
                "targets_in_K": self.targets_in_K,
                "points_on_boundary": self.points_on_boundary, "ok": self.ok}


def stage0(boundary):
    """Two antipodal (in arc length) points on cylinders ``[0]`` and ``[1]``."""
    positions = [Fraction(0), Fraction(1, 2)]
    overrides = {bytes([0]): positions[0], bytes([1]): positions[1]}
    return ConstructionState(boundary, 0, 1, positions, [bytes([0]), bytes([1])], overrides)


def advance(state, max_word_length=DEFAULT_MAX_WORD_LENGTH):
    """Build stage ``n+1`` from stage ``n`` and certify the step."""
    n, m = state.n, state.m
    m_next = 3 ** (n + 1) * m
    if m_next > max_word_length:
        raise StageOverflow(f"stage {n + 1} needs words of length {m_next} "
                            f"(cap {max_word_length})", "advance",
                            required=m_next, allowed=max_word_length)
    k_n = m_next - m
    offset = Fraction(1, 4) * Fraction(1, 2 ** (n + 1))
    positions, generators = [], []
    overrides = {}
    conflicts = 0

    def assign(key, pos):
        nonlocal conflicts
        old = overrides.get(key)
        if old is None:
            overrides[key] = pos
        elif old != pos:
            conflicts += 1

    for j, g in enumerate(state.generators):
        left = state.positions[j] - offset
        right = state.positions[j] + offset
        tau = g * 3 ** (n + 1)
        tau_bar = _flip_last(tau)
        positions += [left, right]
        generators += [tau, tau_bar]
        for k in range(m):  # rotations of tau have period m_n
            assign(_rot(tau, k), left)
        for k in range(k_n):
            assign(_rot(tau_bar, k), right)
        tail = state.position_of(_rot(tau_bar, k_n))
        for k in range(k_n, m_next):
            assign(_rot(tau_bar, k), tail)

    new = ConstructionState(state.boundary, n + 1, m_next, positions, generators, overrides, state)
    return new, certify(state, new, conflicts)


def certify(old, new, conflicts=0):
    b = old.boundary
    L = b.length
    sup = 0.0
    for key, pos in new.overrides.items():
        diff = b.point_at(pos) - b.point_at(old.position_of(key))
        sup = max(sup, float(np.linalg.norm(diff)))
    w = new.points()
    targets = new.targets()
    defects = float(np.max(np.linalg.norm(w - targets, axis=1)))
    on_curve = max(b.distance_to_curve(x) for x in w)
    return StageCertificate(
        stage=old.n, sup_diff=sup / L, sup_bound=11 / 8 / 2 ** old.n,
        defects=defects / L, defect_bound=5 / 4 / 6 ** new.n,
        n_overrides=len(new.overrides), conflicts=conflicts,
        targets_in_K=all(b.contains(t) for t in targets),
        points_on_boundary=on_curve / L)


def construct(boundary, stages, max_word_length=DEFAULT_MAX_WORD_LENGTH):
    """Run ``stages`` advances from stage 0; returns the final state and all certificates."""
    state = stage0(boundary)
    certs = []
    for _ in range(stages):
        state, cert = advance(state, max_word_length)
        certs.append(cert)
    return state, certs


# ---------------------------------------------------------------- positions only

def stage_positions(n):
    """Exact positions of ``w_{n,j}`` without building any cylinder tables."""
    pos = [Fraction(0), Fraction(1, 2)]
    for i in range(n):
        off = Fraction(1, 2 ** (i + 3))
        pos = [p + sgn * off for p in pos for sgn in (-1, 1)]
    return pos


def stage_targets(boundary, n):
    """Boundary points ``w_{n,j}`` and targets ``w*_{n,j}`` from the stage rules alone.

    Odd-indexed new points are fixed by their whole orbit, so ``w* = w``.  An
    even-indexed point ``R_{i}`` holds for ``k_{n-1}`` of the ``m_n`` orbit steps
    and the remaining ``m_{n-1}`` steps sit at the stage-(n-1) neighbour
    ``w_{n-1, i+1}`` (``i`` odd) or ``w_{n-1, i-1}`` (``i`` even).  Agrees with
    the cylinder-level computation whenever no override conflicts occur.
    """
    pos = [Fraction(0), Fraction(1, 2)]
    pts = np.array([boundary.point_at(s) for s in pos])
    targets = pts.copy()
    m = 1
    for i in range(n):
        m_next = 3 ** (i + 1) * m
        k_i = m_next - m
        off = Fraction(1, 2 ** (i + 3))
        new_pos, new_targets = [], []
        N = len(pos)
        for j in range(N):  # 0-based; generator index is j+1
            left, right = pos[j] - off, pos[j] + off
            neighbour = (j + 1) % N if j % 2 == 0 else (j - 1) % N
            wl = boundary.point_at(left)
            wr = boundary.point_at(right)
            new_pos += [left, right]
            new_targets += [wl, (k_i * wr + m * pts[neighbour]) / m_next]
        pos, m = new_pos, m_next
        pts = np.array([boundary.point_at(s) for s in pos])
        targets = np.array(new_targets)
    return pts, targets


# ---------------------------------------------------------------- potentials

class StagedPotential:
    """Stage ``n`` of the construction viewed as a potential on the full 2-shift.

    ``evaluate`` approximates the limit potential: it returns the value of the
    deepest stage resolvable from the prefix together with the geometric tail
    bound ``(11/4) 2^{-i}`` (times the perimeter).  ``orbit_values`` gives the
    exact stage-``n`` values along a periodic orbit.
    """

    m = 2

    def __init__(self, state):
        self.state = state
        self.sft = full_shift(2)

    @property
    def depth(self):
        return self.state.m

    @property
    def k(self):
        return self.state.m

    def evaluate(self, prefix):
        return evaluate_limit(self.state, prefix)

    def orbit_values(self, word):
        st = self.state
        return np.array([st.boundary.point_at(s) for s in st.orbit_positions(bytes(word))])

    def as_table(self, max_entries=DEFAULT_TABLE_BUDGET):
        return export_stage(self.state, max_entries)

    def to_json(self):
        return {"kind": "construct2d", "boundary": self.state.boundary.to_json(),
                "stage": self.state.n}


def evaluate_limit(state, prefix):
    """Approximate the limit potential on the cylinder of ``prefix``."""
    prefix = bytes(int(s) for s in prefix)
    for st in reversed(state.chain()):
        if len(prefix) >= st.m:
            bound = 11 / 4 / 2 ** st.n * st.boundary.length
            return EvaluatedValue(st.value_of(prefix), bound)
    raise InsufficientPrefix("prefix shorter than every stage depth", "evaluate_limit",
                             got=len(prefix))


def export_stage(state, max_entries=DEFAULT_TABLE_BUDGET):
    """Full depth-``m_n`` table of stage ``n`` over the full 2-shift."""
    entries = 2 ** state.m
    if entries > max_entries:
        raise TableBudgetExceeded(f"stage {state.n} table needs {entries} entries "
                                  f"(budget {max_entries})", "export_stage",
                                  required=entries, allowed=max_entries)
    sft = full_shift(2)
    return TablePotential.from_function(sft, state.m, lambda w: state.value_of(bytes(w)))


def degenerate_potential(points):
    """Depth-1 potential for a K that is a point or a segment (endpoints given)."""
    pts = np.atleast_2d(np.asarray(points, float))
    a = pts[0]
    b = pts[-1]
    return TablePotential(full_shift(2), 1, np.array([a, b]))


def staged_potential_from_json(doc, sft=None):
    boundary = make_boundary(doc["boundary"])
    state, _ = construct(boundary, int(doc.get("stage", 1)))
    return StagedPotential(state)
