import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ccnsim.geometry import (
    NetworkConfig, Position, Zone, euclidean_distance, neighbors_in_range, zone_of, zones,
)

CFG = NetworkConfig(max_range=500.0)
coord = st.floats(0, 1000, allow_nan=False)


@pytest.mark.parametrize("a, b, expected", [
    ((0, 0), (3, 4), 5.0),
    ((7, 2), (7, 2), 0.0),
    ((1, 1), (4, 5), 5.0),
])
def test_euclidean_distance(a, b, expected):
    assert euclidean_distance(Position(*a), Position(*b)) == expected


@given(coord, coord, coord, coord, coord, coord)
def test_distance_is_a_metric(ax, ay, bx, by, cx, cy):
    a, b, c = Position(ax, ay), Position(bx, by), Position(cx, cy)
    assert euclidean_distance(a, b) == euclidean_distance(b, a)
    assert euclidean_distance(a, a) == 0
    assert euclidean_distance(a, c) <= euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-9


@pytest.mark.parametrize("d, expected", [(50, 0), (100, 1), (600, None), (0, 0),
                                         (125, 1), (250, 2), (250.0001, 3), (500, 3)])
def test_zone_of(d, expected):
    z = zone_of(d, CFG)
    assert (z.index if z else None) == expected


def test_zone_radii_increase_and_end_at_R():
    zs = zones(CFG)
    assert [z.index for z in zs] == [0, 1, 2, 3]
    assert all(a.radius < b.radius for a, b in zip(zs, zs[1:]))
    assert zs[-1] == Zone(3, 500.0)
    assert zone_of(50, CFG).radius == pytest.approx(500 / 6)


def test_negative_distance_rejected():
    with pytest.raises(ValueError):
        zone_of(-1, CFG)


def test_network_config_invariants():
    with pytest.raises(ValueError):
        NetworkConfig(alpha=1.5)
    with pytest.raises(ValueError):
        NetworkConfig(max_range=0)
    with pytest.raises(ValueError):
        NetworkConfig(node_count=1)


def test_neighbors_in_range_examples():
    pts = [Position(0, 0), Position(3, 4), Position(600, 0)]
    assert neighbors_in_range(0, pts, CFG) == [(1, 5.0)]
    assert neighbors_in_range(0, [Position(1, 1), Position(900, 900)], CFG) == []
    tie = [Position(0, 0), Position(0, 10), Position(10, 0)]
    assert neighbors_in_range(0, tie, CFG) == [(1, 10.0), (2, 10.0)]
    tie_rev = [Position(0, 0), Position(10, 0), Position(0, 10)]
    assert [n for n, _ in neighbors_in_range(0, tie_rev, CFG)] == [1, 2]


def test_neighbors_sorted_and_accept_arrays(rng):
    coords = rng.uniform(0, 1000, size=(30, 2))
    nb = neighbors_in_range(4, coords, CFG)
    dists = [d for _, d in nb]
    assert dists == sorted(dists)
    assert all(d <= 500 for d in dists)


def test_link_symmetry(rng):
    coords = rng.uniform(0, 1000, size=(40, 2))
    sets = [{n for n, _ in neighbors_in_range(i, coords, CFG)} for i in range(40)]
    for u in range(40):
        for v in sets[u]:
            assert u in sets[v]


def test_zone_membership_partitions_neighbors(rng):
    coords = rng.uniform(0, 1000, size=(50, 2))
    nb = neighbors_in_range(0, coords, CFG)
    by_zone = {k: {n for n, d in nb if zone_of(d, CFG).index == k} for k in range(4)}
    assert set().union(*by_zone.values()) == {n for n, _ in nb}
    assert sum(len(s) for s in by_zone.values()) == len(nb)
