import math

import numpy as np
import pytest

from rotset.errors import NewtonStalled, NotInterior
from rotset.potential import WeightedSkeleton, edge_weights
from rotset.rotgeom import support
from rotset.sft import full_shift, k_block, presentation_depth
from rotset.thermo import (ThermoSystem, entropy_profile, grad_pressure, hessian_pressure,
                           interior_probe, level_curve, pressure, solve_rotation)

from conftest import table

GOLD = (1 + math.sqrt(5)) / 2


def binary_entropy(w):
    return -w * math.log(w) - (1 - w) * math.log(1 - w)


def Q_at(sft, p, T):
    return pressure(edge_weights(p, k_block(sft, presentation_depth(sft, p.k)), T))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_full_shift_pressure_is_log_d(d):
    sft = full_shift(d)
    p = table(sft, 1, {str(i): [0] for i in range(d)})
    assert Q_at(sft, p, [0]).Q == pytest.approx(math.log(d), abs=1e-13)


@pytest.mark.parametrize("t", [-3.0, 0.0, 0.7, 5.0])
def test_scalar_closed_form(bit, t):
    sft, p = bit
    ev = Q_at(sft, p, [t])
    assert ev.Q == pytest.approx(math.log1p(math.exp(t)), abs=1e-12)
    assert grad_pressure(ev)[0] == pytest.approx(1 / (1 + math.exp(-t)), abs=1e-12)


def test_golden_parry_frequency(golden_ind):
    sft, p = golden_ind
    ev = Q_at(sft, p, [0])
    assert ev.Q == pytest.approx(math.log(GOLD), abs=1e-13)
    assert grad_pressure(ev)[0] == pytest.approx(1 / (GOLD + 2), abs=1e-12)


def test_symmetric_gradient(full2):
    p = table(full2, 1, {"0": [1, 0], "1": [0, 1]})
    assert np.allclose(grad_pressure(Q_at(full2, p, [0, 0])), [0.5, 0.5])


def test_hessian_examples(bit, full2):
    sft, p = bit
    assert hessian_pressure(sft, p, [0.0])[0, 0] == pytest.approx(0.25, abs=1e-8)
    const = table(full2, 1, {"0": [2, 2], "1": [2, 2]})
    assert np.allclose(hessian_pressure(full2, const, [0.3, -0.1]), 0, atol=1e-9)
    pair = table(full2, 1, {"0": [0, 1], "1": [1, 2]})
    Hm = hessian_pressure(full2, pair, [0.0, 0.0])
    assert np.allclose(Hm @ [1, -1], 0, atol=1e-8)
    assert np.linalg.matrix_rank(Hm, tol=1e-6) == 1


def test_hessian_agrees_with_pressure_differences(full2, rng):
    p = table(full2, 2, {w: rng.normal(size=2).tolist() for w in ["00", "01", "10", "11"]})
    sys_ = ThermoSystem(full2, p)
    T = np.array([0.4, -0.2])
    assert np.allclose(sys_.hessian(T), sys_.hessian_from_pressure(T, h=1e-3), atol=1e-5)


def test_power_iteration_matches_dense(rng):
    """A skeleton above the dense threshold against an explicit dense eigen solve."""
    sft = full_shift(3)
    sk = k_block(sft, 7)
    assert sk.n_vertices > 256
    vals = rng.normal(size=sk.n_edges)
    ws = WeightedSkeleton(sk, vals[:, None], np.ones(1), vals)
    ev = pressure(ws)
    M = sk.adjacency(np.exp(vals)).toarray()
    rho = max(abs(np.linalg.eigvals(M)))
    assert ev.Q == pytest.approx(math.log(rho), abs=1e-10)


@pytest.mark.parametrize("w,H", [(0.5, math.log(2)), (0.9, binary_entropy(0.9)),
                                 (0.999, binary_entropy(0.999))])
def test_solve_rotation_scalar(bit, w, H):
    sft, p = bit
    sol = solve_rotation(sft, p, [w])
    assert sol.H == pytest.approx(H, abs=1e-9)
    assert sol.T[0] == pytest.approx(math.log(w / (1 - w)), abs=1e-6)


def test_solution_near_boundary_has_large_temperature(bit):
    sft, p = bit
    sol = solve_rotation(sft, p, [0.999])
    assert sol.H == pytest.approx(0.00791, abs=1e-5) and abs(sol.T[0]) > 6


def test_not_interior(bit, golden_ind):
    sft, p = bit
    for w in ([1.0], [1.2], [-0.1]):
        with pytest.raises(NotInterior) as exc:
            solve_rotation(sft, p, w)
        assert "distance" in exc.value.details


def test_newton_stall_is_reported(bit):
    sft, p = bit
    with pytest.raises(NewtonStalled) as exc:
        solve_rotation(sft, p, [1 - 1e-7], max_iter=3)
    assert "grad_norm" in exc.value.details


def test_profile_matches_binary_entropy(bit):
    sft, p = bit
    grid = np.arange(1, 100) / 100
    sols = entropy_profile(sft, p, [[w] for w in grid])
    err = max(abs(s.H - binary_entropy(w)) for s, w in zip(sols, grid))
    assert err < 1e-8
    H = [s.H for s in sols]
    assert all(a < b for a, b in zip(H[50:], H[49:]))     # decreasing toward w = 1


def test_profile_records_failures(bit):
    sft, p = bit
    sols = entropy_profile(sft, p, [[0.5], [1.5]])
    assert sols[0].converged and not sols[1].converged and "NotInterior" in sols[1].error


def test_golden_entropy_is_concave(golden_ind):
    sft, p = golden_ind
    grid = np.linspace(0.02, 0.48, 24)
    H = np.array([s.H for s in entropy_profile(sft, p, [[w] for w in grid])])
    assert np.all(np.diff(H, 2) < 1e-10)
    assert H.max() == pytest.approx(math.log(GOLD), abs=1e-3)


def test_variational_identity(full2, rng):
    p = table(full2, 2, {w: rng.normal(size=2).tolist() for w in ["00", "01", "10", "11"]})
    sys_ = ThermoSystem(full2, p)
    T = np.array([0.3, 0.8])
    sol = solve_rotation(full2, p, sys_.grad(T))
    assert np.allclose(sol.T, T, atol=1e-6)
    assert sol.Q == pytest.approx(sol.H + T @ sol.rv, abs=1e-10)


def test_interior_probe_verdicts(full2):
    pair = table(full2, 1, {"0": [0, 3], "1": [1, 4]})
    v = interior_probe(full2, pair)
    assert not v.nonempty
    assert np.allclose(v.null_direction, np.array([1, -1]) / math.sqrt(2), atol=1e-6)
    const = table(full2, 1, {"0": [1, 1], "1": [1, 1]})
    assert not interior_probe(full2, const).nonempty
    simplex = table(full2, 1, {"0": [1, 0], "1": [0, 1]})
    v = interior_probe(full2, simplex)
    assert not v.nonempty
    assert np.allclose(v.null_direction, np.array([1, 1]) / math.sqrt(2), atol=1e-6)
    generic = table(full2, 2, {"00": [1, 0], "01": [0, 0], "10": [0, 0], "11": [0, 1]})
    assert interior_probe(full2, generic).nonempty


def test_level_curve(bit, full2):
    sft, p = bit
    assert np.allclose(level_curve(sft, p, 0, 8), [[0.5]])
    for R in (1.0, 5.0, 20.0):
        pts = level_curve(sft, p, R, 2)
        assert pts[0, 0] == pytest.approx(1 / (1 + math.exp(-R)))
        assert pts[1, 0] == pytest.approx(1 / (1 + math.exp(R)))


def test_support_limit_and_tie_effect(full2):
    """``Q(sU)/s`` tends to the support function; ties slow it by ``log(multiplicity)/s``.

    For the triangle with vertices (1,0), (0,1), (0,0) the direction (1,1)/sqrt 2
    is maximised by every word built from the two top symbols, so the excess at
    ``s = 40`` is ``log 2 / 40`` scaled by the direction.
    """
    tri = table(full2, 1, {"0": [1, 0], "1": [0, 1]})
    sys_ = ThermoSystem(full2, tri)
    u = np.array([1, 1]) / math.sqrt(2)
    s = 40.0
    excess = sys_.Q(s * u) / s - support(full2, tri, u).value
    assert excess == pytest.approx(math.log(2) / s, rel=1e-9)
    generic = table(full2, 2, {"00": [1, 0.125], "01": [0, 0], "10": [0, 0], "11": [0.25, 1]})
    sys_ = ThermoSystem(full2, generic)
    for theta in np.linspace(0, 2 * np.pi, 32, endpoint=False):
        u = np.array([math.cos(theta), math.sin(theta)])
        h = support(full2, generic, u).value
        gap = sys_.Q(s * u) / s - h
        assert -1e-12 <= gap <= 0.01 * (1 + abs(h))
