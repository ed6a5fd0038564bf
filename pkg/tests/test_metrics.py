import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarcs.errors import DimensionMismatchError, EmptyInputError, ZeroSignalError
from polarcs.frame import circular_distance
from polarcs.metrics import hungarian_match, signal_error


def test_example_pairs():
    m = hungarian_match([0.10, 0.50], [0.48, 0.12])
    assert m.assignment == {0: 1, 1: 0}
    assert m.total_cost == pytest.approx(0.04)
    assert m.mean_error == pytest.approx(0.02)


def test_identity():
    w = [0.1, 0.4, 0.7]
    m = hungarian_match(w, w, 100)
    assert m.total_cost == 0
    assert m.assignment == {0: 0, 1: 1, 2: 2}


def test_wrap_around_in_bins():
    m = hungarian_match([0.99], [0.01], 100)
    assert m.total_cost == pytest.approx(2.0)


def test_rectangular_counts_misses():
    m = hungarian_match([0.1, 0.5, 0.8], [0.52])
    assert m.missed == 2
    assert m.per_pair_errors.size == 1
    assert m.mean_error == pytest.approx(0.02)


def test_empty_input():
    with pytest.raises(EmptyInputError):
        hungarian_match([], [0.1])


@pytest.mark.parametrize("seed", range(20))
def test_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    k = rng.integers(1, 7)
    wt, we = rng.uniform(size=k), rng.uniform(size=k)
    cost = circular_distance(we[:, None], wt[None, :])
    best = min(cost[np.arange(k), list(p)].sum() for p in itertools.permutations(range(k)))
    assert hungarian_match(wt, we).total_cost == pytest.approx(best, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=5),
       st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=5))
def test_symmetric(a, b):
    assert hungarian_match(a, b).total_cost == pytest.approx(hungarian_match(b, a).total_cost, abs=1e-12)


def test_signal_error():
    f = np.array([1.0, 2j, -1.0])
    assert signal_error(f, f) == 0
    assert signal_error(f, np.zeros(3)) == pytest.approx(1.0)
    assert signal_error(f, 2 * f) == pytest.approx(1.0)
    with pytest.raises(ZeroSignalError):
        signal_error(np.zeros(3), f)
    with pytest.raises(DimensionMismatchError):
        signal_error(f, f[:2])
