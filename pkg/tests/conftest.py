"""Shared helpers for the test suite."""
import numpy as np
import pytest

from isocap import LatticeFunction, LatticeSet, neighbors


def random_function(rng, d, side=4, density=0.7, nonneg=True):
    """Random finitely supported function on a d-dimensional window."""
    vals = rng.random(size=(side,) * d)
    vals[rng.random(size=vals.shape) > density] = 0.0
    if not nonneg:
        vals -= 0.5
    off = tuple(int(c) for c in rng.integers(-3, 3, size=d))
    return LatticeFunction(off, vals, dim=d)


def random_connected_set(rng, d, n):
    """Random connected n-point set grown from the origin."""
    pts = {(0,) * d}
    while len(pts) < n:
        frontier = sorted({j for i in pts for j in neighbors(i)} - pts)
        pts.add(frontier[rng.integers(0, len(frontier))])
    return LatticeSet(pts, dim=d)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
