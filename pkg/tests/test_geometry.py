import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rotset.errors import DimensionMismatch
from rotset.geometry import (distance_to_hull, halfplane_polygon, hausdorff, hull,
                             interior_margin, direction_grid)


def as_set(V):
    return sorted(map(tuple, np.round(V, 12).tolist()))


def test_collinear_points_give_endpoints():
    h = hull([(0, 0), (1, 0), (0.5, 0)])
    assert h.dim == 1 and as_set(h.vertices) == [(0, 0), (1, 0)]


def test_interior_point_dropped():
    h = hull([(0, 0), (1, 0), (0, 1), (0.2, 0.2)])
    assert h.dim == 2 and as_set(h.vertices) == [(0, 0), (0, 1), (1, 0)]


def test_duplicates_removed():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    h = hull(sq + sq + [(1, 1 + 1e-15)])
    assert len(h.vertices) == 4


def test_hull_is_counterclockwise():
    V = hull([(0, 0), (1, 0), (1, 1), (0, 1)]).vertices
    area = 0.5 * sum(V[i - 1][0] * V[i][1] - V[i][0] * V[i - 1][1] for i in range(len(V)))
    assert area == pytest.approx(1.0)


def test_hausdorff_examples():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert hausdorff(sq, sq) == 0
    assert hausdorff(sq, [(0.5, 0.5)]) == pytest.approx(math.sqrt(2) / 2)
    assert hausdorff([[0], [1]], [[0], [0.5]]) == pytest.approx(0.5)
    with pytest.raises(DimensionMismatch):
        hausdorff([[0]], [[0, 0]])


def test_three_dimensional_hull():
    cube = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], float)
    h = hull(np.vstack([cube, [[0.5, 0.5, 0.5]]]))
    assert h.dim == 3 and len(h.vertices) == 8
    assert distance_to_hull([2, 0.5, 0.5], h.vertices) == pytest.approx(1.0, abs=1e-6)
    assert interior_margin([0.5, 0.5, 0.5], h.vertices) == pytest.approx(0.5)


def test_margin_of_degenerate_hull_is_nonpositive():
    seg = [(0, 0), (1, 0)]
    assert interior_margin((0.5, 0), seg) == pytest.approx(0)
    assert interior_margin((0.5, 1), seg) == pytest.approx(-1)


def test_halfplane_polygon_of_square():
    U = direction_grid(4)
    poly = halfplane_polygon(U, [1, 1, 1, 1])
    assert as_set(poly.vertices) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=30))
def test_every_point_lies_in_its_hull(pts):
    P = np.array(pts, float) / 4
    h = hull(P)
    for p in P:
        assert h.distance(p) <= 1e-9
    # vertices are input points
    for v in h.vertices:
        assert np.min(np.abs(P - v).max(axis=1)) == 0
    # support function agrees with brute force
    for u in direction_grid(16):
        assert h.support(u) == pytest.approx(float(np.max(P @ u)), abs=1e-12)
