"""Shape optimization: descent steps, exchange moves, search, audits."""
import numpy as np
import pytest

from isocap import (
    LatticeSet,
    Objective,
    canonical_form,
    exchange_move,
    is_direction_convex,
    lattice_ball,
    level_set,
    minimize,
    quasi_ball,
    rearrangement_directions,
    structural_audit,
    symmetrization_descent_step,
)
from isocap.lattice import coordinate_direction
from conftest import random_connected_set

OBJ = Objective(kind="p_cap", p=2.0, truncation=16.0)


def test_canonical_form_isometry_invariance(rng):
    for _ in range(10):
        X = random_connected_set(rng, 3, int(rng.integers(2, 15)))
        base = canonical_form(X)
        perm = rng.permutation(3)
        signs = rng.choice([-1, 1], size=3)
        Y = LatticeSet([tuple(int(signs[j] * pnt[perm[j]]) for j in range(3))
                        for pnt in X]).translate(
            tuple(int(c) for c in rng.integers(-4, 4, size=3)))
        assert canonical_form(Y) == base


def test_descent_step_fixed_point():
    B = lattice_ball(1.5, (0, 0, 0))
    for xi in rearrangement_directions(3):
        out = symmetrization_descent_step(B, xi, OBJ)
        assert canonical_form(out) == canonical_form(B)


def test_descent_step_improves_L_shape():
    # an elongated L: 12 points, strongly asymmetric
    X = LatticeSet([(t, 0, 0) for t in range(8)] + [(0, s, 0) for s in (1, 2, 3, 4)])
    xi = coordinate_direction(1, 3)
    v0 = OBJ.value_of(OBJ.solve(X))
    Xs = symmetrization_descent_step(X, xi, OBJ)
    v1 = OBJ.value_of(OBJ.solve(Xs))
    assert len(Xs) == len(X)
    assert v1 < v0 - 1e-9


def test_descent_step_cardinality_random(rng):
    for _ in range(50):
        X = random_connected_set(rng, 3, int(rng.integers(2, 20)))
        dirs = rearrangement_directions(3)
        xi = dirs[rng.integers(0, len(dirs))]
        Xs = symmetrization_descent_step(X, xi, OBJ)
        assert len(Xs) == len(X)


def test_exchange_move(rng):
    X = random_connected_set(rng, 3, 9)
    v0 = OBJ.value_of(OBJ.solve(X))
    Y, v1, accepted = exchange_move(X, OBJ, rng, current_value=v0)
    assert len(Y) == len(X)
    if accepted:
        assert v1 <= v0 + 1e-12
    else:
        assert Y == X and v1 == v0


def test_minimize_singleton():
    state = minimize(1, OBJ, d=3, seed=0, max_sweeps=2, exchange_batch=0)
    assert len(state.best_set) == 1
    direct = OBJ.value_of(OBJ.solve(LatticeSet([(0, 0, 0)])))
    assert state.best_value == pytest.approx(direct, rel=1e-12)


def test_minimize_descent_certificate():
    state = minimize(13, OBJ, d=3, seed=1, max_sweeps=3, exchange_batch=10)
    # greedy trajectory never increases beyond solver slack
    vals = [v for _, v in state.history]
    for a, b in zip(vals, vals[1:]):
        assert b <= a + 1e-9 * max(1.0, abs(a))
    # final value no worse than the quasi-ball start
    q = quasi_ball(13, 3)
    assert state.best_value <= OBJ.value_of(OBJ.solve(q)) + 1e-9


def test_minimize_direction_convex_output():
    state = minimize(33, OBJ, d=3, seed=0, max_sweeps=4, exchange_batch=10)
    X = state.best_set
    assert len(X) == 33
    for j in (1, 2, 3):
        assert is_direction_convex(X, j)


def test_minimize_relative_mode_feasibility():
    obj = Objective(kind="relative", R=2.5)
    state = minimize(9, obj, d=3, seed=0, max_sweeps=2, exchange_batch=8)
    assert obj.feasible(state.best_set)
    assert len(state.best_set) == 9


def test_minimize_eigen_positivity_set():
    obj = Objective(kind="eigen")
    state = minimize(11, obj, d=3, seed=0, max_sweeps=3, exchange_batch=8)
    res = obj.solve(state.best_set)
    u = obj.potential_of(res)
    assert level_set(u, 0.0, strict=True) == state.best_set


def test_structural_audit_ball():
    B = lattice_ball(2.0, (0, 0, 0))
    rep = structural_audit(B, OBJ)
    assert all(rep["direction_convex"].values())
    assert rep["diameter_ratio"] <= 3.0
    assert rep["level_one_is_X"]
    assert all(rep["walled_in"].values())


def test_structural_audit_column_flagged():
    col = LatticeSet([(0, 0, t) for t in range(16)])
    rep = structural_audit(col, OBJ)
    ball_rep = structural_audit(lattice_ball(1.5, (0, 0, 0)), OBJ)
    assert rep["diameter_ratio"] > 3.0
    assert rep["diameter_ratio"] > ball_rep["diameter_ratio"]


def test_objective_validation():
    with pytest.raises(Exception):
        Objective(kind="bogus")
    with pytest.raises(Exception):
        Objective(kind="relative")  # missing R
