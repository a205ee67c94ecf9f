import numpy as np
import pytest
from hypothesis import given, strategies as st

from modergodic.ntt import cyclic_convolve, cyclic_correlate, direct_cyclic_correlate


def naive_convolve(a, b):
    N = len(a)
    return np.array([sum(int(a[j]) * int(b[(i - j) % N]) for j in range(N)) for i in range(N)])


@given(st.lists(st.integers(0, 50), min_size=1, max_size=70), st.data())
def test_convolve_matches_naive(a, data):
    b = data.draw(st.lists(st.integers(0, 50), min_size=len(a), max_size=len(a)))
    assert np.array_equal(cyclic_convolve(np.array(a), np.array(b)), naive_convolve(a, b))


@pytest.mark.parametrize("N", [1, 2, 3, 15, 64, 100, 1000, 4097])
def test_correlate_matches_direct(N, rng):
    a = rng.integers(0, 2, N)
    b = rng.integers(0, 5, N)
    assert np.array_equal(cyclic_correlate(a, b), direct_cyclic_correlate(a, b))


def test_correlate_definition():
    a = np.array([1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0])
    c = cyclic_correlate(a, a)
    assert {h: int(v) for h, v in enumerate(c) if v} == {0: 2, 7: 1, 8: 1}


def test_overflow_guard():
    big = np.full(1000, 10 ** 6, dtype=np.int64)
    with pytest.raises(OverflowError):
        cyclic_convolve(big, big)
