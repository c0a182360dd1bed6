"""Lattice geometry primitives: neighbors, perimeter, balls, slices."""
import math

import numpy as np
import pytest

from isocap import (
    Direction,
    LatticeError,
    LatticeSet,
    coordinate_direction,
    diameter,
    is_direction_convex,
    lattice_ball,
    min_sym_diff_to_ball,
    neighbors,
    perimeter,
    quasi_ball,
    rearrangement_directions,
    scaled_perimeter,
    slice_of_point,
    sym_diff_count,
)
from conftest import random_connected_set


def test_neighbors_origin_d3():
    out = neighbors((0, 0, 0))
    assert len(out) == 6
    assert set(out) == {(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0),
                        (0, 0, 1), (0, 0, -1)}


def test_neighbors_d2():
    assert set(neighbors((1, 1))) == {(0, 1), (2, 1), (1, 0), (1, 2)}


def test_neighbors_count_random(rng):
    for _ in range(20):
        d = int(rng.integers(2, 5))
        i = tuple(int(c) for c in rng.integers(-9, 9, size=d))
        out = neighbors(i)
        assert len(out) == 2 * d
        assert all(sum(abs(a - b) for a, b in zip(i, j)) == 1 for j in out)


def test_perimeter_examples():
    assert perimeter(LatticeSet([(0, 0, 0)])) == 6
    # two adjacent points: 12 incident edge-slots minus 2 internal
    assert perimeter(LatticeSet([(0, 0, 0), (1, 0, 0)])) == 10
    cube = LatticeSet([(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)])
    assert perimeter(cube) == 24


def test_perimeter_oracle_random(rng):
    """Face-counting oracle: per point, count exposed faces directly."""
    for _ in range(20):
        X = random_connected_set(rng, 3, int(rng.integers(1, 25)))
        expect = sum(1 for i in X for j in neighbors(i) if j not in X)
        assert perimeter(X) == expect


def test_perimeter_invariance(rng):
    for _ in range(10):
        X = random_connected_set(rng, 3, int(rng.integers(2, 20)))
        v = tuple(int(c) for c in rng.integers(-5, 5, size=3))
        assert perimeter(X.translate(v)) == perimeter(X)
        perm = rng.permutation(3)
        Y = LatticeSet([tuple(pnt[j] for j in perm) for pnt in X])
        assert perimeter(Y) == perimeter(X)


def test_scaled_perimeter():
    assert scaled_perimeter(LatticeSet([(0, 0, 0)])) == 6
    cube = LatticeSet([(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)])
    assert scaled_perimeter(cube) == pytest.approx(24 * 8 ** (-2 / 3))
    B = lattice_ball(4.0, (0, 0, 0))
    assert scaled_perimeter(B) <= 6 * len(B) ** (1 / 3)


def test_scaled_perimeter_bounds_random(rng):
    """C <= P_N <= 2d N^{1/d} with C the solid-cube ratio."""
    side = 4
    cube = LatticeSet([(a, b, c) for a in range(side)
                       for b in range(side) for c in range(side)])
    lower = scaled_perimeter(cube)
    for _ in range(15):
        X = random_connected_set(rng, 3, int(rng.integers(1, 70)))
        pn = scaled_perimeter(X)
        assert lower - 1e-12 <= pn <= 6 * len(X) ** (1 / 3) + 1e-12


def test_diameter():
    assert diameter(LatticeSet([(5, -1, 2)])) == 0
    assert diameter(LatticeSet([(0, 0, 0), (3, 4, 0)])) == pytest.approx(5.0)
    cube = LatticeSet([(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)])
    assert diameter(cube) == pytest.approx(math.sqrt(3))
    assert diameter(cube, metric="linf") == 1


def test_is_direction_convex():
    assert not is_direction_convex(LatticeSet([(0, 0, 0), (2, 0, 0)]), 1)
    assert is_direction_convex(LatticeSet([(0, 0, 0), (1, 0, 0)]), 1)
    # a gap along e_2 only
    X = LatticeSet([(0, 0), (0, 2)])
    assert is_direction_convex(X, 1)
    assert not is_direction_convex(X, 2)


def test_lattice_ball_convex_all_axes(rng):
    for _ in range(10):
        r = float(rng.uniform(0.7, 4.5))
        z = tuple(int(c) for c in rng.integers(-4, 4, size=3))
        B = lattice_ball(r, z)
        assert all(is_direction_convex(B, j) for j in (1, 2, 3))


def test_lattice_ball_counts():
    assert len(lattice_ball(1.0, (0, 0, 0))) == 7
    assert lattice_ball(0.5, (2, -1, 3)) == LatticeSet([(2, -1, 3)])
    assert len(lattice_ball(math.sqrt(2), (0, 0))) == 9


def test_lattice_ball_membership_oracle(rng):
    for _ in range(5):
        r = float(rng.uniform(1.0, 5.0))
        B = lattice_ball(r, (0, 0, 0))
        K = int(math.ceil(r))
        expect = {(a, b, c)
                  for a in range(-K, K + 1) for b in range(-K, K + 1)
                  for c in range(-K, K + 1) if a * a + b * b + c * c <= r * r}
        assert set(B.points) == expect


def test_sym_diff_count():
    X = LatticeSet([(0, 0), (1, 0)])
    Y = LatticeSet([(0, 0), (1, 0), (2, 0)])
    assert sym_diff_count(X, X) == 0
    assert sym_diff_count(X, Y) == 1
    Z = LatticeSet([(9, 9), (8, 8)])
    assert sym_diff_count(X, Z) == len(X) + len(Z)
    with pytest.raises(LatticeError):
        sym_diff_count(X, LatticeSet([(0, 0, 0)]))


def test_sym_diff_metric_properties(rng):
    for _ in range(25):
        A = random_connected_set(rng, 2, int(rng.integers(1, 12)))
        B = random_connected_set(rng, 2, int(rng.integers(1, 12))).translate(
            tuple(int(c) for c in rng.integers(-3, 3, size=2)))
        C = random_connected_set(rng, 2, int(rng.integers(1, 12))).translate(
            tuple(int(c) for c in rng.integers(-3, 3, size=2)))
        assert sym_diff_count(A, B) == sym_diff_count(B, A)
        assert sym_diff_count(A, C) <= sym_diff_count(A, B) + sym_diff_count(B, C)


def test_min_sym_diff_to_ball():
    B = lattice_ball(2.0, (1, -2, 0))
    z, cnt = min_sym_diff_to_ball(B, 2.0)
    assert (z, cnt) == ((1, -2, 0), 0)
    z, cnt = min_sym_diff_to_ball(B.translate((1, 0, 0)), 2.0)
    assert (z, cnt) == ((2, -2, 0), 0)
    # ball minus one boundary point
    pts = sorted(B.points)
    boundary = [p for p in pts if sum((a - b) ** 2 for a, b in zip(p, (1, -2, 0))) == 4]
    X = LatticeSet([p for p in pts if p != boundary[0]])
    _, cnt = min_sym_diff_to_ball(X, 2.0)
    assert cnt <= 1


def test_min_sym_diff_zero_iff_ball(rng):
    # zero only when X is a translated lattice ball of that radius
    X = random_connected_set(rng, 3, 11)
    if min_sym_diff_to_ball(X, 1.4)[1] == 0:
        z, _ = min_sym_diff_to_ball(X, 1.4)
        assert X == lattice_ball(1.4, z)
    B = lattice_ball(1.4, (3, 3, 3))
    assert min_sym_diff_to_ball(B, 1.4)[1] == 0


def test_rearrangement_directions_family():
    d3 = rearrangement_directions(3)
    assert len(d3) == 12  # 3 coordinates, 3 sums, 6 signed differences
    vecs = {tuple(x.vector) for x in d3}
    assert (1, 0, 0) in vecs and (0, 0, 1) in vecs
    assert (1, 1, 0) in vecs and (1, -1, 0) in vecs and (-1, 1, 0) in vecs
    assert len(rearrangement_directions(3, dedupe=True)) == 9
    assert len(rearrangement_directions(2)) == 5
    assert len(rearrangement_directions(2, dedupe=True)) == 4


def test_direction_validation():
    with pytest.raises(LatticeError):
        Direction(vector=(1, 1, 1))
    with pytest.raises(LatticeError):
        Direction(vector=(2, 0))
    assert coordinate_direction(2, 3).vector == (0, 1, 0)


def test_slice_of_point_coordinate():
    xi = coordinate_direction(1, 2)
    alpha, t = slice_of_point((5, 3), xi)
    assert alpha == (0, 3) and t == 5


def test_slice_of_point_diagonal():
    xi = Direction(vector=(1, 1))
    alpha, t = slice_of_point((1, 1), xi)
    assert alpha == (0, 0) and t == 1
    alpha, t = slice_of_point((2, 1), xi)
    # xi.(2,1) = 3 -> class 1, t = 1, base (1, 0)
    assert xi.dot(alpha) == 1 and t == 1
    assert tuple(a + t * v for a, v in zip(alpha, xi.vector)) == (2, 1)


def test_quasi_ball():
    q = quasi_ball(7, 3)
    assert len(q) == 7
    assert q == lattice_ball(1.0, (0, 0, 0))
    assert len(quasi_ball(33, 3)) == 33
    # filled by increasing norm: the origin is always present
    assert (0, 0, 0) in q
