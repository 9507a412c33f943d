import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from torusburn.rng import RandomnessTable


@given(st.integers(0, 2 ** 64 - 1), st.integers(1, 10 ** 6), st.integers(1, 10 ** 4), st.integers(1, 50))
def test_vectorized_matches_scalar(seed, volume, i, h):
    t = RandomnessTable(seed, volume)
    xs = t.vertices(i, h, 8)
    assert xs.tolist() == [t.vertex(i, h + j) for j in range(8)]
    assert all(0 <= x < volume for x in xs)


def test_pure_function_of_seed_and_counter():
    a, b = RandomnessTable(7, 100), RandomnessTable(7, 100)
    assert [a.vertex(i, h) for i in range(1, 20) for h in range(4)] == \
        [b.vertex(i, h) for i in range(1, 20) for h in range(4)]
    assert a.vertex(1, 1) != RandomnessTable(8, 100).vertex(1, 1) or a.vertex(2, 1) != RandomnessTable(8, 100).vertex(2, 1)


def test_negative_seed_masked():
    assert RandomnessTable(-1, 10).seed == 2 ** 64 - 1


def test_first_draw_uniform_over_seeds():
    counts = np.bincount([RandomnessTable(s, 16).vertex(1, 1) for s in range(100_000)], minlength=16)
    assert chisquare(counts).pvalue > 0.01


def test_attempts_and_steps_uniform():
    t = RandomnessTable(3, 16)
    draws = np.concatenate([t.vertices(i, 0, 200) for i in range(1, 501)])
    assert chisquare(np.bincount(draws, minlength=16)).pvalue > 0.01


def test_first_outside():
    t = RandomnessTable(11, 50)
    burned = np.zeros(50, dtype=bool)
    assert t.first_outside(1, burned) == (1, t.vertex(1, 1))
    burned[:] = True
    burned[17] = False
    h, x = t.first_outside(4, burned)
    assert x == 17 == t.vertex(4, h)
    assert all(t.vertex(4, g) != 17 for g in range(1, h))
    burned[17] = True
    with pytest.raises(ValueError):
        t.first_outside(4, burned)
