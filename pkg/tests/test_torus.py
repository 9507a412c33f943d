import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from torusburn.torus import (
    ResourceGuardError,
    TorusSpec,
    ball_indices,
    ball_volume_torus,
    ball_volume_torus_bfs,
    ball_volume_zd,
    ball_volume_zd_recurrence,
    checked_int64,
    distance_array,
    l1_torus_distance,
    neighbor_array,
    neighbors,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        TorusSpec(0, 5)
    with pytest.raises(ValueError):
        TorusSpec(2, 0)
    with pytest.raises(ResourceGuardError):
        TorusSpec(4, 2 ** 20)


specs = st.builds(TorusSpec, st.integers(1, 4), st.integers(1, 9))


@given(specs, st.data())
def test_index_roundtrip(spec, data):
    v = data.draw(st.integers(0, spec.volume - 1))
    assert spec.index(spec.coords(v)) == v
    assert spec.index_array(spec.coords_array(np.array([v])))[0] == v


def test_distance_examples():
    assert l1_torus_distance((0,), (9,), TorusSpec(1, 10)) == 1
    assert l1_torus_distance((0, 0), (0, 0), TorusSpec(2, 5)) == 0
    assert l1_torus_distance((1, 1), (4, 5), TorusSpec(2, 6)) == 5


@given(specs, st.data())
def test_distance_is_metric(spec, data):
    a, b, c = (data.draw(st.integers(0, spec.volume - 1)) for _ in range(3))
    dab = l1_torus_distance(a, b, spec)
    assert dab == l1_torus_distance(b, a, spec)
    assert (dab == 0) == (a == b)
    assert l1_torus_distance(a, c, spec) <= dab + l1_torus_distance(b, c, spec)
    assert distance_array(a, spec)[b] == dab


def test_zd_examples():
    assert ball_volume_zd(1, 3) == 7
    assert ball_volume_zd(3, 1) == 7
    assert ball_volume_zd(2, 2) == 13


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_zd_brute_force(d):
    for r in range(0, 21 if d < 4 else 9):
        box = itertools.product(range(-r, r + 1), repeat=d)
        brute = sum(1 for x in box if sum(map(abs, x)) <= r)
        assert ball_volume_zd(d, r) == brute == ball_volume_zd_recurrence(d, r)


@given(st.integers(1, 8), st.integers(0, 60))
def test_zd_recurrence_matches_closed_form(d, r):
    assert ball_volume_zd(d, r) == ball_volume_zd_recurrence(d, r)


def test_zd_counts_past_int64_are_exact_and_flagged():
    v = ball_volume_zd(8, 300_000)
    assert v > 2 ** 63
    assert v == ball_volume_zd_recurrence(8, 300_000)
    with pytest.raises(OverflowError):
        checked_int64(v)
    assert checked_int64(ball_volume_zd(3, 100)) == ball_volume_zd(3, 100)


def test_torus_examples():
    assert ball_volume_torus(TorusSpec(1, 10), 4) == 9
    assert ball_volume_torus(TorusSpec(1, 10), 5) == 10
    # +-2 coincide on a 4-cycle, so the wrapped ball is smaller than the Z^2 one (13)
    assert ball_volume_torus(TorusSpec(2, 4), 2) == 11 == ball_volume_torus_bfs(TorusSpec(2, 4), 2)


@given(st.integers(1, 3), st.integers(1, 8), st.integers(0, 14))
def test_torus_volume_matches_bfs(d, n, r):
    spec = TorusSpec(d, n)
    v = ball_volume_torus(spec, r)
    assert v == ball_volume_torus_bfs(spec, r)
    if 2 * r < n:
        assert v == ball_volume_zd(d, r)
    if r >= spec.diameter:
        assert v == spec.volume


@pytest.mark.parametrize("d,n", [(1, 7), (2, 6), (3, 5)])
def test_torus_volume_monotone_and_capped(d, n):
    spec = TorusSpec(d, n)
    vols = [ball_volume_torus(spec, r) for r in range(spec.diameter + 3)]
    assert vols == sorted(vols) and vols[-1] == spec.volume


def test_neighbors_examples():
    assert sorted(neighbors((0,), TorusSpec(1, 5))) == [1, 4]
    spec = TorusSpec(2, 3)
    got = {spec.coords(w) for w in neighbors((1, 1), spec)}
    assert got == {(0, 1), (2, 1), (1, 0), (1, 2)}
    assert neighbors((0,), TorusSpec(1, 2)) == [1]
    assert neighbors((0,), TorusSpec(1, 1)) == []


@given(st.integers(1, 3), st.integers(3, 9), st.data())
def test_neighbor_array_matches_neighbors(d, n, data):
    spec = TorusSpec(d, n)
    v = data.draw(st.integers(0, spec.volume - 1))
    assert sorted(neighbor_array(np.array([v]), spec).tolist()) == sorted(neighbors(v, spec))


@given(st.integers(1, 3), st.integers(1, 9), st.integers(0, 10), st.data())
def test_ball_indices_is_the_ball(d, n, r, data):
    spec = TorusSpec(d, n)
    v = data.draw(st.integers(0, spec.volume - 1))
    got = np.sort(ball_indices(v, r, spec))
    assert np.array_equal(got, np.flatnonzero(distance_array(v, spec) <= r))
