import numpy as np
import pytest

from rotset.potential import TablePotential
from rotset.sft import full_shift, golden_mean, make_sft


def table(sft, k, entries):
    return TablePotential.from_mapping(sft, k, entries)


@pytest.fixture
def full2():
    return full_shift(2)


@pytest.fixture
def golden():
    return golden_mean()


@pytest.fixture
def bit(full2):
    """Full 2-shift with phi(0) = 0, phi(1) = 1."""
    return full2, table(full2, 1, {"0": [0], "1": [1]})


@pytest.fixture
def golden_ind(golden):
    return golden, table(golden, 1, {"0": [0], "1": [1]})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sft(rng, d):
    """Random irreducible-enough SFT: retry until no symbol is stranded."""
    while True:
        A = (rng.random((d, d)) < 0.6).astype(int)
        if A.any(axis=0).all() and A.any(axis=1).all():
            return make_sft(d, A)
