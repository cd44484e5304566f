import math

import numpy as np
import pytest

from rotset.errors import BadSpec, InsufficientPrefix, StateBudgetExceeded
from rotset.gallery import (Example2Potential, Example2Spec, build_example2, check_lipschitz,
                            example2_entropy_suite, example2_from_json, lipschitz_bound)
from rotset.geometry import hausdorff
from rotset.potential import birkhoff_mean, evaluate
from rotset.rotgeom import approximate_rotation_polytope
from rotset.thermo import solve_rotation


@pytest.fixture(scope="module")
def spec():
    return Example2Spec()


@pytest.fixture(scope="module")
def small():
    return Example2Spec(K=5)


def test_default_geometry(spec):
    assert spec.n_houses == 3
    assert np.allclose(spec.vertices.sum(axis=0), 0, atol=1e-15)
    assert np.allclose(np.linalg.norm(spec.vertices, axis=1), 1)
    assert spec.diameter() == pytest.approx(math.sqrt(3))


def test_level_points_climb_to_vertex(spec):
    for i in range(3):
        pts = [spec.level_point(i, k) for k in range(8)]
        assert np.allclose(pts[0], spec.w0)
        gaps = [np.linalg.norm(p - spec.vertices[i]) for p in pts]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        assert all(g < 0.5 ** k for k, g in enumerate(gaps) if k > 0)
        assert np.allclose(spec.level_point(i, math.inf), spec.vertices[i])


@pytest.mark.parametrize("kwargs", [dict(d=5), dict(d=4), dict(alpha=2), dict(K=3),
                                    dict(rho=0.6), dict(rho=0),
                                    dict(w0=[5.0, 0.0], vertices=[[1, 0], [-1, 1], [-1, -1]]),
                                    dict(vertices=[[0, 0], [1, 0], [2, 0]]),
                                    dict(vertices=[[1, 0], [0, 1]])])
def test_bad_specs(kwargs):
    with pytest.raises(BadSpec):
        Example2Spec(**kwargs)


def test_prefix_values(spec):
    p = Example2Potential(spec)
    ev = evaluate(p, (0,) * 7)
    assert np.allclose(ev.value, spec.vertices[0]) and ev.error_bound <= spec.rho ** 4
    assert np.allclose(evaluate(p, (0, 2, 0)).value, spec.w0)
    assert evaluate(p, (0, 2, 0)).error_bound == 0
    v = evaluate(p, (0, 0, 0, 2)).value
    assert np.allclose(v, spec.level_point(0, 0)) and np.allclose(v, spec.w0)
    assert np.allclose(evaluate(p, (1, 0, 1, 1, 4)).value, spec.level_point(0, 1))
    with pytest.raises(InsufficientPrefix):
        evaluate(p, (0, 1))


def test_truncated_table_agrees_with_exact(small):
    sft, table, bound = build_example2(small)
    p = Example2Potential(small)
    rng = np.random.default_rng(3)
    for _ in range(300):
        x = tuple(rng.integers(0, 6, size=12).tolist())
        if rng.random() < 0.5:
            h = int(rng.integers(3))
            run = int(rng.integers(0, 12))
            x = tuple(2 * h + int(b) for b in rng.integers(0, 2, size=run)) + x[run:]
        exact = p.evaluate(x).value if len({s // 2 for s in x}) > 1 else None
        if exact is None:
            continue
        got = evaluate(table, x[:small.K]).value
        assert np.linalg.norm(got - exact) <= bound.sup_error + 1e-15


def test_orbit_values_and_birkhoff(small):
    sft, table, _ = build_example2(small)
    p = Example2Potential(small)
    assert np.allclose(p.orbit_values((1, 0)).mean(axis=0), small.vertices[0])
    word = (0, 1, 0, 0, 2)          # run of four in house 0 then a single 2
    exact = p.orbit_values(word).mean(axis=0)
    assert np.allclose(birkhoff_mean(table, word), exact)


def test_table_shape_and_budget(small):
    sft, table, bound = build_example2(small)
    assert table.values.shape == (6 ** 5, 2) and sft.d == 6
    assert bound.sup_error == pytest.approx(small.rho ** 2)
    assert bound.pressure_error([1, -2]) == pytest.approx(3 * small.rho ** 2)
    with pytest.raises(StateBudgetExceeded):
        build_example2(Example2Spec(K=8), max_states=10_000)


def test_json_round_trip(spec):
    from rotset.sft import full_shift
    p = example2_from_json(spec.to_json(), full_shift(6))
    assert p.spec.K == spec.K and np.allclose(p.spec.vertices, spec.vertices)
    with pytest.raises(BadSpec):
        example2_from_json(spec.to_json(), full_shift(4))
    with pytest.raises(BadSpec):
        example2_from_json({"d": "six"})


def test_lipschitz_random_pairs(spec):
    assert check_lipschitz(spec, n_random=3000) <= lipschitz_bound(spec) + 1e-12


def test_lipschitz_first_symbol(spec):
    pairs = [((0, 2, 4, 0), (2, 4, 0, 2)), ((0, 0, 0, 0, 2), (4, 4, 4, 2))]
    assert check_lipschitz(spec, pairs) <= 2 * spec.diameter() + 1e-12


def test_lipschitz_pair_beyond_two_to_alpha(spec):
    """Agreeing on ``alpha`` symbols still allows a jump from ``w0`` to near ``w1``."""
    pair = ((0, 0, 0, 2, 2), (0, 0, 0, 1, 1, 1, 2))
    ratio = check_lipschitz(spec, [pair])
    assert ratio == pytest.approx(16 * (1 - spec.rho ** 3))
    assert ratio > spec.diameter() * 2 ** spec.alpha
    assert ratio <= lipschitz_bound(spec)


def test_deep_runs_are_contracting(spec):
    """Points sharing a run of at least ``2 alpha`` house symbols are 2-Lipschitz."""
    rng = np.random.default_rng(5)
    pairs = []
    for c in range(2 * spec.alpha, 30):
        for _ in range(10):
            head = [int(b) for b in rng.integers(0, 2, size=c)]
            x = head + [int(b) for b in rng.integers(0, 2, size=int(rng.integers(0, 5)))] + [2]
            y = head + [1 - x[c] if len(x) > c + 1 else 0]
            y += [int(b) for b in rng.integers(0, 2, size=int(rng.integers(0, 5)))] + [4]
            pairs.append((tuple(x), tuple(y)))
    assert check_lipschitz(spec, pairs) <= 2 + 1e-12


def test_rotation_set_of_small_truncation(small):
    sft, table, bound = build_example2(small)
    poly = approximate_rotation_polytope(sft, table, n_directions=48)
    slack = bound.sup_error + small.rho ** (small.K - small.alpha)
    assert hausdorff(poly.vertices, small.vertices) <= slack


def test_truncation_refinement():
    a, b = Example2Spec(K=5), Example2Spec(K=6)
    sa, ta, _ = build_example2(a)
    sb, tb, _ = build_example2(b)
    for t in (0.5, 0.9):
        w = a.w0 + t * (a.vertices[1] - a.w0)
        ha = solve_rotation(sa, ta, w)
        hb = solve_rotation(sb, tb, w)
        assert abs(ha.H - hb.H) <= np.abs(hb.T).sum() * a.rho ** (b.K - a.alpha - 1)


def test_small_suite(small):
    rep = example2_entropy_suite(small, fractions=(0.3, 0.6, 0.9), n_max=12, n_directions=32)
    assert rep["rv_error"] < 1e-12
    assert rep["H_w0"] == pytest.approx(math.log(6), abs=1e-9)
    assert rep["rays_in_range"] and rep["rays_monotone"] and rep["per_counts_ok"]
    assert rep["states"] == 6 ** 4
    assert rep["hausdorff_ratio"] < 0.1
