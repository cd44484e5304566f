import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rotset.errors import DimensionMismatch, StateBudgetExceeded, StrandedSymbol
from rotset.sft import (canonical, count_words, enumerate_cyclic_words, enumerate_words,
                        format_word, full_shift, golden_mean, is_admissible,
                        is_cyclically_admissible, is_mixing, iter_words, k_block, make_sft,
                        parse_word, presentation_depth, primitive_root, rotate, sft_from_json,
                        trace_power)


def brute_words(sft, n):
    return [w for w in itertools.product(range(sft.d), repeat=n) if is_admissible(sft, w)]


def test_full_shift_has_all_transitions():
    s = make_sft(2, "full")
    assert s.A.sum() == 4 and s.is_full


def test_golden_mean_forbids_11():
    s = make_sft(2, [[1, 1], [1, 0]])
    assert not is_admissible(s, (1, 1))
    assert is_admissible(s, (0, 1, 0))


def test_stranded_symbol_names_the_symbol():
    with pytest.raises(StrandedSymbol) as exc:
        make_sft(2, [[1, 1], [0, 0]])
    assert exc.value.details["symbol"] == 1
    assert exc.value.to_dict()["operation"] == "make_sft"


@pytest.mark.parametrize("bad", [[[1, 2], [1, 1]], [[1, 1]], "partial"])
def test_malformed_matrices_rejected(bad):
    with pytest.raises(DimensionMismatch):
        make_sft(2, bad)


def test_sft_json_round_trip():
    s = golden_mean()
    t = sft_from_json(s.to_dict())
    assert np.array_equal(s.A, t.A)
    assert sft_from_json({"alphabet": 3}).is_full


def test_mixing():
    assert is_mixing(full_shift(2)) == (True, 1)
    assert is_mixing(golden_mean()) == (True, 2)
    assert is_mixing(make_sft(2, np.eye(2, dtype=int))) == (False, None)


def test_k_block_shapes():
    sk = k_block(golden_mean(), 2)
    assert sk.n_vertices == 2 and sk.n_edges == 3
    assert sorted(map(tuple, sk.edge_words.tolist())) == [(0, 0), (0, 1), (1, 0)]
    sk = k_block(full_shift(2), 3)
    assert sk.n_vertices == 4 and sk.n_edges == 8


def test_k_block_depth_one_is_a_bouquet():
    sk = k_block(golden_mean(), 1)
    assert sk.n_vertices == 1 and sk.n_edges == 2
    assert not sk.exact
    assert presentation_depth(golden_mean(), 1) == 2
    assert presentation_depth(full_shift(2), 1) == 1


def test_k_block_overlap_rule():
    s = golden_mean()
    sk = k_block(s, 3)
    for e, w in enumerate(sk.edge_words.tolist()):
        assert tuple(sk.vertex_words[sk.src[e]]) == tuple(w[:-1])
        assert tuple(sk.vertex_words[sk.dst[e]]) == tuple(w[1:])
    assert np.all(np.diff(sk.src) >= 0)
    assert sk.indptr[-1] == sk.n_edges


def test_state_budget():
    with pytest.raises(StateBudgetExceeded) as exc:
        k_block(full_shift(6), 9, max_states=10_000)
    assert exc.value.details["required"] == 6 ** 8


@pytest.mark.parametrize("sft,n,expected", [(full_shift(2), 5, 32), (golden_mean(), 4, 8),
                                            (golden_mean(), 1, 2)])
def test_count_words(sft, n, expected):
    assert count_words(sft, n) == expected


def test_lucas_numbers_from_traces():
    assert [trace_power(golden_mean(), n) for n in range(1, 8)] == [1, 3, 4, 7, 11, 18, 29]


def test_words_and_helpers():
    assert rotate((0, 1, 1), 1) == (1, 1, 0)
    assert canonical((1, 0, 1)) == (0, 1, 1)
    assert primitive_root((0, 1, 0, 1)) == (0, 1)
    assert is_cyclically_admissible(golden_mean(), (0, 1))
    assert not is_cyclically_admissible(golden_mean(), (1, 0, 1))
    assert parse_word("0110") == (0, 1, 1, 0)
    assert parse_word("10,3", d=12) == (10, 3)
    assert format_word((10, 3), d=12) == "10,3"


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(1, 6), st.integers(0, 10 ** 6))
def test_enumeration_matches_brute_force(d, n, seed):
    from conftest import random_sft
    sft = random_sft(np.random.default_rng(seed), d)
    words = [tuple(w) for w in enumerate_words(sft, n).tolist()]
    assert words == brute_words(sft, n)
    cyc = [w for w in words if sft.A[w[-1], w[0]]]
    assert [tuple(w) for w in enumerate_cyclic_words(sft, n).tolist()] == cyc
    assert len(cyc) == trace_power(sft, n)
    chunks = list(iter_words(sft, n, cyclic=True, max_rows=4))
    joined = [tuple(w) for c in chunks for w in c.tolist()]
    assert joined == cyc
