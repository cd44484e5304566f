"""The polygon example: a Lipschitz potential on the full d-shift with Rot = K.

Symbols are paired into houses ``S_i = {2i-2, 2i-1}`` (1-based ``i``).  A
point whose leading run inside one house has length ``r`` gets ``w_0`` when
``r < alpha``, the point ``w_i(r - alpha)`` on the segment from ``w_0`` to
the vertex ``w_i`` when ``alpha <= r < inf``, and ``w_i`` itself on the
infinite run.  Here ``w_i(k) = w_i + rho^k (w_0 - w_i)``, so ``w_i(0) = w_0``
and the sequence climbs monotonically to the vertex.

Numerics use the depth-``K`` truncation, which replaces every run of length
at least ``K`` by its limit ``w_i``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BadSpec, InsufficientPrefix, NewtonStalled, NoConvergence, NotInterior,
                     StateBudgetExceeded)
from .geometry import hausdorff, hull
from .perorbit import per_count
from .potential import EvaluatedValue, TablePotential
from .rotgeom import approximate_rotation_polytope
from .sft import DEFAULT_STATE_BUDGET, enumerate_words, full_shift, k_block
from .thermo import ThermoSystem, grad_pressure, solve_rotation


@dataclass(frozen=True, eq=False)
class Example2Spec:
    """Parameters of the polygon example.

    ``vertices=None`` selects the regular ``d/2``-gon of circumradius 1
    centred at ``w0`` with a vertex on the positive x-axis.
    """

    d: int = 6
    vertices: np.ndarray = None
    w0: np.ndarray = field(default_factory=lambda: np.zeros(2))
    alpha: int = 3
    K: int = 7
    rho: float = 0.25

    def __post_init__(self):
        w0 = np.asarray(self.w0, float)
        object.__setattr__(self, "w0", w0)
        if self.vertices is None:
            n = self.d // 2 if self.d >= 2 else 0
            ang = 2 * np.pi * np.arange(n) / max(n, 1)
            object.__setattr__(self, "vertices", w0 + np.column_stack([np.cos(ang), np.sin(ang)]))
        else:
            object.__setattr__(self, "vertices", np.asarray(self.vertices, float))
        self.validate()

    def validate(self):
        d, V = self.d, self.vertices
        if not isinstance(d, (int, np.integer)) or d < 6 or d % 2:
            raise BadSpec(f"d must be an even integer >= 6, got {d!r}", "build_example2")
        if V.shape != (d // 2, 2):
            raise BadSpec(f"need {d // 2} planar vertices, got shape {V.shape}", "build_example2")
        if self.alpha < 3:
            raise BadSpec("alpha must be at least 3", "build_example2", alpha=self.alpha)
        if self.K <= self.alpha:
            raise BadSpec("truncation depth K must exceed alpha", "build_example2",
                          K=self.K, alpha=self.alpha)
        if not 0 < self.rho <= 0.5:
            raise BadSpec("rho must lie in (0, 1/2]", "build_example2", rho=self.rho)
        n = len(V)
        for i in range(n):
            a, b, c = V[i - 1], V[i], V[(i + 1) % n]
            if (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) <= 0:
                raise BadSpec("vertices must form a strictly convex counterclockwise polygon",
                              "build_example2", vertex=i)
        for i in range(n):
            a, b = V[i], V[(i + 1) % n]
            if (b[0] - a[0]) * (self.w0[1] - a[1]) - (b[1] - a[1]) * (self.w0[0] - a[0]) <= 0:
                raise BadSpec("w0 must lie strictly inside the polygon", "build_example2")

    @property
    def n_houses(self):
        return self.d // 2

    def level_point(self, i, k):
        """``w_i(k)`` for 0-based house ``i``; ``k = inf`` gives the vertex."""
        if math.isinf(k):
            return self.vertices[i].copy()
        return self.vertices[i] + self.rho ** k * (self.w0 - self.vertices[i])

    def diameter(self):
        return hull(self.vertices).diameter()

    def to_json(self):
        return {"kind": "example2", "d": int(self.d), "vertices": self.vertices.tolist(),
                "w0": self.w0.tolist(), "alpha": int(self.alpha), "K": int(self.K),
                "rho": float(self.rho)}


@dataclass(frozen=True)
class TruncationBound:
    """Sup-norm gap between the depth-``K`` table and the exact potential."""

    sup_error: float

    def pressure_error(self, T):
        """``|Q_table(T) - Q(T)| <= |T|_1 * sup_error``."""
        return float(np.abs(np.asarray(T, float)).sum()) * self.sup_error

    def to_dict(self):
        return {"sup_error": self.sup_error}


def _value_for_run(spec, house, run):
    if run < spec.alpha:
        return spec.w0.copy()
    return spec.level_point(house, run - spec.alpha)


class Example2Potential:
    """Exact potential of the polygon example with a cached depth-``K`` table."""

    m = 2

    def __init__(self, spec):
        self.spec = spec
        self.sft = full_shift(spec.d)
        self._table = None

    @property
    def depth(self):
        return self.spec.K

    @property
    def k(self):
        return self.spec.K

    def evaluate(self, prefix):
        """Exact when the leading run ends inside ``prefix``; otherwise the truncated value.

        An unfinished run of length ``r >= alpha`` is bracketed between
        ``w_i(r - alpha)`` and ``w_i``; the value returned is ``w_i`` with
        error bound ``rho^(r - alpha) |w_i - w_0|``.
        """
        prefix = tuple(int(s) for s in prefix)
        if not prefix:
            raise InsufficientPrefix("empty prefix", "evaluate")
        sp = self.spec
        house = prefix[0] // 2
        run = 0
        while run < len(prefix) and prefix[run] // 2 == house:
            run += 1
        if run < len(prefix):
            return EvaluatedValue(_value_for_run(sp, house, run), 0.0)
        if run < sp.alpha:
            raise InsufficientPrefix(f"run of length {run} is still below alpha={sp.alpha}",
                                     "evaluate", needed=sp.alpha + 1, got=run)
        err = sp.rho ** (run - sp.alpha) * float(np.linalg.norm(sp.vertices[house] - sp.w0))
        return EvaluatedValue(sp.vertices[house].copy(), err)

    def orbit_values(self, word):
        """Exact values along the periodic orbit of ``word``."""
        word = [int(s) for s in word]
        n = len(word)
        houses = [s // 2 for s in word]
        sp = self.spec
        if len(set(houses)) == 1:
            return np.tile(sp.vertices[houses[0]], (n, 1))
        out = np.empty((n, 2))
        for j in range(n):
            run = 1
            while houses[(j + run) % n] == houses[j]:
                run += 1
            out[j] = _value_for_run(sp, houses[j], run)
        return out

    def as_table(self):
        if self._table is None:
            self._table = _truncated_table(self.spec, self.sft)
        return self._table

    def to_json(self):
        return self.spec.to_json()


def _truncated_table(spec, sft):
    words = enumerate_words(sft, spec.K)
    houses = words // 2
    same = np.cumprod(houses == houses[:, :1], axis=1)
    run = same.sum(axis=1)
    values = np.repeat(spec.w0[None, :], len(words), axis=0)
    for i in range(spec.n_houses):
        for r in range(spec.alpha, spec.K + 1):
            sel = (houses[:, 0] == i) & (run == r)
            values[sel] = spec.level_point(i, math.inf if r == spec.K else r - spec.alpha)
    return TablePotential(sft, spec.K, values, words=words)


def build_example2(spec=None, max_states=DEFAULT_STATE_BUDGET):
    """Full ``d``-shift, depth-``K`` table potential and its truncation bound."""
    spec = spec or Example2Spec()
    needed = spec.d ** (spec.K - 1)
    if needed > max_states:
        raise StateBudgetExceeded(f"depth {spec.K} skeleton needs {needed} states",
                                  "build_example2", required=needed, allowed=max_states)
    p = Example2Potential(spec)
    radius = float(np.max(np.linalg.norm(spec.vertices - spec.w0, axis=1)))
    bound = TruncationBound(spec.rho ** (spec.K - spec.alpha) * radius)
    return p.sft, p.as_table(), bound


def example2_from_json(doc, sft=None):
    try:
        spec = Example2Spec(d=int(doc.get("d", 6)), vertices=doc.get("vertices"),
                            w0=doc.get("w0", [0.0, 0.0]), alpha=int(doc.get("alpha", 3)),
                            K=int(doc.get("K", 7)), rho=float(doc.get("rho", 0.25)))
    except (TypeError, ValueError) as exc:
        raise BadSpec(f"malformed example2 spec: {exc}", "parse_potential") from None
    if sft is not None and (not sft.is_full or sft.d != spec.d):
        raise BadSpec("example2 lives on the full d-shift", "parse_potential", d=spec.d)
    return Example2Potential(spec)


# ---------------------------------------------------------------- checks

def _metric(x, y):
    """``d_{1/2}(x, y) = 2^-j`` with ``j`` the first (1-based) differing position."""
    for j, (a, b) in enumerate(zip(x, y), start=1):
        if a != b:
            return 0.5 ** j
    return 0.0


def check_lipschitz(spec, pairs=None, n_random=2000, length=40, seed=0):
    """Largest ``|Phi(x) - Phi(y)| / d_{1/2}(x, y)`` over sampled prefix pairs.

    Prefixes are long enough that every sampled run resolves exactly.  Random
    pairs share a common prefix of random length, biased toward long runs in a
    single house, which is where the ratio is largest.
    """
    p = Example2Potential(spec)
    rng = np.random.default_rng(seed)
    if pairs is None:
        pairs = []
        for _ in range(n_random):
            house = int(rng.integers(spec.n_houses))
            common = int(rng.integers(0, length - 2))
            run_len = int(rng.integers(0, common + 1))
            base = rng.integers(0, spec.d, size=length)
            base[:run_len] = 2 * house + rng.integers(0, 2, size=run_len)
            other = base.copy()
            other[common:] = rng.integers(0, spec.d, size=length - common)
            if other[common] == base[common]:
                other[common] = (base[common] + 1 + int(rng.integers(spec.d - 1))) % spec.d
            # guarantee both runs end inside the prefix
            for w in (base, other):
                w[-1] = (w[0] // 2 * 2 + 2) % spec.d
            pairs.append((tuple(base.tolist()), tuple(other.tolist())))
    ratio = 0.0
    for x, y in pairs:
        dist = _metric(x, y)
        if dist == 0:
            continue
        vx = p.evaluate(x).value
        vy = p.evaluate(y).value
        ratio = max(ratio, float(np.linalg.norm(vx - vy)) / dist)
    return ratio


def lipschitz_bound(spec):
    """``max(C 2^(alpha+1), 2)`` with ``C = diam(K)``.

    A run of exactly ``alpha`` symbols already maps to ``w_i(0) = w_0``, so
    two points can agree on ``alpha`` symbols and still sit at ``w_0`` and
    near ``w_i``: ``000 2...`` against ``000111 2...`` differ first at
    position 4 and give the ratio ``16 (1 - rho^3) |w_1 - w_0|``.  The extra
    factor 2 covers this case; ``C 2^alpha`` alone does not.
    """
    return max(spec.diameter() * 2 ** (spec.alpha + 1), 2.0)


def ray_points(spec, fractions=(0.25, 0.5, 0.75, 0.95)):
    """Points ``w0 + t (w_i - w0)`` on the rays toward each vertex."""
    return [(i, t, spec.w0 + t * (spec.vertices[i] - spec.w0))
            for i in range(spec.n_houses) for t in fractions]


def example2_entropy_suite(spec=None, fractions=(0.25, 0.5, 0.75, 0.95), n_max=20,
                           n_directions=64):
    """Entropy, rotation-set and counting checks on the truncated polygon example."""
    spec = spec or Example2Spec()
    sft, table, bound = build_example2(spec)
    sk = k_block(sft, spec.K)
    poly = approximate_rotation_polytope(sft, table, n_directions=n_directions)
    system = ThermoSystem(sft, table, polytope=poly)
    log2, logd = math.log(2), math.log(spec.d)

    ev0 = system.pressure(np.zeros(2))
    rv0 = grad_pressure(ev0)
    bernoulli = table.values.mean(axis=0)
    H0 = solve_rotation(sft, table, spec.w0, system=system)

    rays = []
    T0_by_house = {}
    for i, t, w in ray_points(spec, fractions):
        try:
            sol = solve_rotation(sft, table, w, T0=T0_by_house.get(i), system=system)
            T0_by_house[i] = sol.T
            rays.append({"house": i, "t": t, "w": w.tolist(), "H": sol.H, "T": sol.T.tolist(),
                         "converged": True, "pressure_slack": bound.pressure_error(sol.T)})
        except (NotInterior, NewtonStalled, NoConvergence) as exc:
            rays.append({"house": i, "t": t, "w": w.tolist(), "H": None, "converged": False,
                         "error": exc.to_dict()})
    monotone = True
    for i in range(spec.n_houses):
        hs = [r["H"] for r in rays if r["house"] == i and r["converged"]]
        monotone &= all(a > b for a, b in zip(hs, hs[1:]))

    counts = {}
    for i in range(spec.n_houses):
        sub = sft.restrict([2 * i, 2 * i + 1])
        counts[i] = [int(per_count(sub, n)) for n in range(1, n_max + 1)]
    per_ok = all(c == [2 ** n for n in range(1, n_max + 1)] for c in counts.values())

    diam = spec.diameter()
    dH = hausdorff(poly.vertices, spec.vertices)
    Hs = [r["H"] for r in rays if r["converged"]]
    return {
        "spec": spec.to_json(),
        "states": sk.n_vertices,
        "truncation": bound.to_dict(),
        "rv_bernoulli": rv0.tolist(),
        "rv_bernoulli_table_mean": bernoulli.tolist(),
        "rv_error": float(np.linalg.norm(rv0 - spec.w0)),
        "H_w0": H0.H,
        "H_w0_error": abs(H0.H - logd),
        "rays": rays,
        "rays_in_range": bool(len(Hs) == len(rays)
                              and all(log2 - 0.02 < h <= logd + 1e-9 for h in Hs)),
        "rays_monotone": bool(monotone),
        "per_counts": {str(i): c for i, c in counts.items()},
        "per_counts_ok": per_ok,
        "polytope_vertices": poly.vertices.tolist(),
        "polytope_gap": poly.certified_gap,
        "hausdorff": dH,
        "diameter": diam,
        "hausdorff_ratio": dH / diam,
    }
