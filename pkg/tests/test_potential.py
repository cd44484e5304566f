from fractions import Fraction

import numpy as np
import pytest

from rotset.errors import BadDimension, BadSpec, DepthMismatch, InadmissibleKey, MissingWord
from rotset.potential import (TablePotential, birkhoff_mean, birkhoff_sum, edge_values,
                              edge_weights, evaluate, parse_potential)
from rotset.sft import k_block


def test_depth_one_value(bit):
    sft, p = bit
    ev = evaluate(p, (0, 1, 1, 0))
    assert ev.value.tolist() == [0.0] and ev.error_bound == 0


def test_birkhoff_mean_of_01(full2):
    p = TablePotential.from_mapping(full2, 1, {"0": [0, 0], "1": [1, 0]})
    assert birkhoff_mean(p, (0, 1)).tolist() == [0.5, 0.0]


def test_fixed_point_sees_only_its_own_word(golden):
    p = TablePotential.from_mapping(golden, 2, {"00": [1], "01": [0], "10": [0]})
    assert birkhoff_mean(p, (0,)).tolist() == [1.0]
    assert birkhoff_mean(p, (0, 1)).tolist() == [0.0]


def test_exact_sums_stay_rational(golden):
    p = TablePotential.from_mapping(golden, 2, {"00": ["1/3"], "01": [1], "10": ["-1/7"]})
    assert p.is_exact
    s = birkhoff_sum(p, (0, 0, 1), exact=True)
    assert s.sum == (Fraction(1, 3) + 1 - Fraction(1, 7),)
    assert birkhoff_mean(p, (0, 0, 1), exact=True) == (s.sum[0] / 3,)


def test_birkhoff_rejects_inadmissible(golden_ind):
    sft, p = golden_ind
    with pytest.raises(InadmissibleKey):
        birkhoff_mean(p, (1, 1))


def test_missing_word_is_named(golden):
    with pytest.raises(MissingWord) as exc:
        TablePotential.from_mapping(golden, 2, {"00": [1], "01": [0]})
    assert exc.value.details["word"] == "10"


def test_inadmissible_key_and_dimension(golden):
    with pytest.raises(InadmissibleKey):
        TablePotential.from_mapping(golden, 2, {"00": [1], "01": [0], "10": [0], "11": [2]})
    with pytest.raises(BadDimension):
        TablePotential.from_mapping(golden, 1, {"0": [1], "1": [0, 1]})


def test_edge_weights_at_zero_are_adjacency(golden):
    p = TablePotential.from_mapping(golden, 2, {"00": [1, 0], "01": [0, 2], "10": [3, 3]})
    sk = k_block(golden, 2)
    ws = edge_weights(p, sk, [0, 0])
    assert np.array_equal(sk.adjacency(ws.weights).toarray(), [[1, 1], [1, 0]])
    ws = edge_weights(p, sk, [0.5, -1])
    assert ws.weights.shape == (3,)
    assert np.allclose(ws.log_weights, edge_values(p, sk) @ [0.5, -1])


def test_scalar_edge_weights(bit):
    sft, p = bit
    ws = edge_weights(p, k_block(sft, 1), [2.0])
    assert np.allclose(ws.weights, [1, np.exp(2)])


def test_depth_mismatch(golden):
    p = TablePotential.from_mapping(golden, 2, {"00": [1], "01": [0], "10": [0]})
    with pytest.raises(DepthMismatch):
        edge_values(p, k_block(golden, 1))


def test_parse_table_and_round_trip(full2):
    doc = {"kind": "table", "m": 1, "k": 1, "entries": {"0": [0], "1": [1]}}
    p = parse_potential(doc, full2)
    assert p.k == 1 and p.m == 1
    q = parse_potential(p.to_json(), full2)
    assert np.array_equal(p.values, q.values)


def test_parse_errors(full2):
    with pytest.raises(BadSpec):
        parse_potential({"k": 1}, full2)
    with pytest.raises(BadSpec):
        parse_potential({"kind": "mystery"}, full2)
    with pytest.raises(BadDimension):
        parse_potential({"kind": "table", "m": 2, "k": 1, "entries": {"0": [0], "1": [1]}}, full2)


def test_parse_example2(full2):
    from rotset.sft import full_shift
    p = parse_potential({"kind": "example2", "d": 6, "alpha": 3, "K": 7}, full_shift(6))
    assert p.depth == 7
    with pytest.raises(BadSpec):
        parse_potential({"kind": "example2", "d": 6}, full2)


def test_parse_construct2d(full2):
    doc = {"kind": "construct2d", "boundary": {"type": "circle", "radius": 1}, "stage": 1}
    p = parse_potential(doc, full2)
    assert p.depth == 3 and p.as_table().values.shape == (8, 2)
