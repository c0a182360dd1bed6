"""Search for minimizers of capacity and eigenvalue objectives at fixed N.

The workhorse move is the certified symmetrization-descent step: solve for
the equilibrium potential of the current set, rearrange it along one
direction, and read off the new set from the rearranged potential - the
objective can only go down (up to solver noise).  Local single-particle
exchange moves (greedy or annealed) escape the fixed points of the
rearrangement dynamics.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .capacity import eigen_ground_state, p_capacity, relative_capacity
from .energy import LatticeFunction
from .lattice import (
    Direction,
    LatticeError,
    LatticeSet,
    diameter,
    neighbors,
    quasi_ball,
    rearrangement_directions,
    scaled_perimeter,
    slice_of_point,
    is_direction_convex,
)
from .rearrange import level_set, symmetrize_direction, walled_in_check

__all__ = [
    "Objective",
    "SearchState",
    "symmetrization_descent_step",
    "exchange_move",
    "minimize",
    "structural_audit",
    "canonical_form",
]


@dataclass(frozen=True)
class Objective:
    """What to minimize over sets of fixed cardinality.

    kind: "p_cap" (truncated absolute p-capacity, scaled), "relative"
    (capacity with zero data on the ball of radius R * N^(1/d)), or
    "eigen" (smallest Dirichlet eigenvalue, scaled by N).  For "p_cap" a
    fixed truncation radius should be supplied when values across
    different sets must be comparable.
    """

    kind: str = "p_cap"
    p: float = 2.0
    R: float | None = None
    truncation: float | None = None
    max_sweeps: int = 400

    def __post_init__(self):
        if self.kind not in ("p_cap", "relative", "eigen"):
            raise LatticeError(f"unknown objective kind {self.kind!r}")
        if self.kind == "relative" and (self.R is None or self.R <= 0):
            raise LatticeError("relative objective needs R > 0")

    def solve(self, X: LatticeSet):
        if self.kind == "p_cap":
            return p_capacity(X, self.p, truncation=self.truncation,
                              max_sweeps=self.max_sweeps)
        if self.kind == "relative":
            return relative_capacity(X, self.R)
        return eigen_ground_state(X)

    def value_of(self, result) -> float:
        if self.kind == "eigen":
            return result.eigenvalue
        return result.value

    def potential_of(self, result) -> LatticeFunction:
        if self.kind == "eigen":
            u = result.eigenfunction
            # ground states are sign-normalized; clip stray negatives
            vals = np.maximum(u.values, 0.0)
            return LatticeFunction(u.offset, vals, dim=u.dim)
        return result.potential

    def feasible(self, X: LatticeSet) -> bool:
        if self.kind != "relative":
            return True
        rho = self.R * len(X) ** (1.0 / X.dim)
        return all(sum(c * c for c in pnt) <= rho * rho + 1e-9
                   for pnt in X.points)


def canonical_form(X: LatticeSet, fix_origin: bool = False) -> tuple:
    """Isometry-invariant key for a set.

    Minimizes the sorted point tuple over coordinate permutations and sign
    flips, and (unless fix_origin) over translations normalizing the
    minimal corner to the origin.
    """
    arr = X.as_array()
    d = X.dim
    best = None
    for perm in itertools.permutations(range(d)):
        pa = arr[:, perm]
        for signs in itertools.product((1, -1), repeat=d):
            sa = pa * np.array(signs, dtype=np.int64)
            if not fix_origin:
                sa = sa - sa.min(axis=0)
            key = tuple(sorted(map(tuple, sa.tolist())))
            if best is None or key < best:
                best = key
    return best


def _slice_rank(t: int, offset_class: int) -> int:
    """Position of t in the symmetrized fill order of its slice.

    Class 0 slices fill 0, 1, -1, 2, -2, ...; class 1 slices fill the
    reflected order 0, -1, 1, -2, 2, ...
    """
    if offset_class == 0:
        return 2 * t - 1 if t > 0 else -2 * t
    return -2 * t - 1 if t < 0 else 2 * t


def _top_n_points(u: LatticeFunction, xi: Direction, N: int) -> LatticeSet:
    """The N points carrying the largest values, ties by slice fill order."""
    items = list(u.items())
    if len(items) < N:
        raise LatticeError("potential support smaller than target cardinality")

    def key(item):
        pnt, val = item
        alpha, t = slice_of_point(pnt, xi)
        return (-val, _slice_rank(t, xi.dot(alpha)), alpha)

    items.sort(key=key)
    return LatticeSet((pnt for pnt, _ in items[:N]), dim=u.dim)


def _pad_to_cardinality(X: LatticeSet, N: int) -> LatticeSet:
    """Grow X to N points by repeatedly adding its smallest exterior neighbor."""
    pts = set(X.points)
    while len(pts) < N:
        cand = sorted({j for i in pts for j in neighbors(i)} - pts)
        if not cand:
            raise LatticeError("cannot grow the set")
        pts.add(cand[0])
    return LatticeSet(pts, dim=X.dim)


def symmetrization_descent_step(X: LatticeSet, xi: Direction,
                                objective: Objective) -> LatticeSet:
    """One certified descent step: rearrange the potential, reread the set.

    For capacity objectives the new set consists of the points where the
    rearranged potential equals its maximum 1 (the rearrangement permutes
    values, so exactly N such points exist).  For the eigenvalue the new
    set is the positivity set of the rearranged ground state, padded
    deterministically if the state vanished on part of a disconnected X.
    """
    N = len(X)
    result = objective.solve(X)
    u = objective.potential_of(result)
    us = symmetrize_direction(u, xi)
    if objective.kind == "eigen":
        Xs = us.support()
        if len(Xs) > N:
            Xs = _top_n_points(us, xi, N)
        elif len(Xs) < N:
            Xs = _pad_to_cardinality(Xs, N)
        return Xs
    return _top_n_points(us, xi, N)


def exchange_move(X: LatticeSet, objective: Objective, rng,
                  current_value: float | None = None,
                  temperature: float = 0.0) -> tuple[LatticeSet, float, bool]:
    """Propose a single-particle swap; returns (set, value, accepted).

    A boundary point (one with an exterior neighbor) moves to an exterior
    neighbor of the set.  Greedy mode (temperature 0) accepts only
    non-increasing values; otherwise standard annealing acceptance.
    """
    if len(X) < 2:
        raise LatticeError("exchange needs N >= 2")
    if current_value is None:
        current_value = objective.value_of(objective.solve(X))
    pts = set(X.points)
    boundary = sorted(i for i in pts if any(j not in pts for j in neighbors(i)))
    exterior = sorted({j for i in pts for j in neighbors(i)} - pts)
    if objective.kind == "relative":
        rho = objective.R * len(X) ** (1.0 / X.dim)
        exterior = [j for j in exterior
                    if sum(c * c for c in j) <= rho * rho + 1e-9]
    if not boundary or not exterior:
        return X, current_value, False
    x0 = boundary[rng.integers(0, len(boundary))]
    y0 = exterior[rng.integers(0, len(exterior))]
    cand = LatticeSet((pts - {x0}) | {y0}, dim=X.dim)
    value = objective.value_of(objective.solve(cand))
    delta = value - current_value
    accept = delta <= 0.0
    if not accept and temperature > 0.0:
        accept = rng.random() < math.exp(-delta / temperature)
    if accept:
        return cand, value, True
    return X, current_value, False


@dataclass
class SearchState:
    """Trajectory of one minimization run."""

    current: LatticeSet
    current_value: float
    best_set: LatticeSet
    best_value: float
    seed: int
    history: list = field(default_factory=list)
    evaluations: int = 0
    budget_exhausted: bool = False

    def record(self, kind: str, value: float):
        self.history.append((kind, value))
        if value < self.best_value:
            self.best_value = value
            self.best_set = self.current


def minimize(N: int, objective: Objective, d: int = 3, seed: int = 0,
             max_sweeps: int = 10, exchange_batch: int = 50,
             mode: str = "greedy", dedupe_directions: bool = False,
             initial: LatticeSet | None = None,
             rel_tol: float = 1e-10) -> SearchState:
    """Minimize the objective over N-point sets by descent plus exchanges.

    Starts from the quasi-ball, alternates full direction sweeps of
    symmetrization descent with batches of exchange proposals, and stops
    when a whole sweep plus batch improves by less than `rel_tol`
    relative or the sweep budget runs out.
    """
    if N < 1:
        raise LatticeError("N must be >= 1")
    rng = np.random.default_rng(seed)
    X = initial if initial is not None else quasi_ball(N, d)
    if len(X) != N:
        raise LatticeError("initial set has wrong cardinality")
    if not objective.feasible(X):
        raise LatticeError("initial set infeasible for the objective")

    cache: dict[tuple, float] = {}
    fix_origin = objective.kind == "relative"

    def value(Y: LatticeSet) -> float:
        key = canonical_form(Y, fix_origin=fix_origin)
        if key not in cache:
            cache[key] = objective.value_of(objective.solve(Y))
        return cache[key]

    state = SearchState(current=X, current_value=value(X), best_set=X,
                        best_value=value(X), seed=seed)
    state.record("init", state.current_value)
    dirs = rearrangement_directions(d, dedupe=dedupe_directions)

    temperature = 0.0
    if mode == "annealing":
        # initial temperature: median |objective change| of probe moves
        probes = []
        for _ in range(min(50, 10 * N)):
            _, v, acc = exchange_move(state.current, objective, rng,
                                      current_value=state.current_value,
                                      temperature=float("inf"))
            probes.append(abs(v - state.current_value))
        temperature = float(np.median(probes)) or 1e-6
    proposals = 0

    for sweep in range(max_sweeps):
        start_value = state.current_value
        for xi in dirs:
            Xs = symmetrization_descent_step(state.current, xi, objective)
            if len(Xs) != N:
                raise LatticeError("descent step changed the cardinality")
            v = value(Xs)
            state.evaluations += 1
            if v <= state.current_value:
                state.current = Xs
                state.current_value = v
            state.record(f"descent:{xi.vector}", state.current_value)
        for _ in range(exchange_batch):
            Xn, v, acc = exchange_move(state.current, objective, rng,
                                       current_value=state.current_value,
                                       temperature=temperature)
            state.evaluations += 1
            proposals += 1
            if mode == "annealing" and proposals % 100 == 0:
                temperature *= 0.95
            if acc:
                state.current = Xn
                state.current_value = v
                state.record("exchange", v)
        improvement = start_value - state.current_value
        if improvement <= rel_tol * max(1.0, abs(start_value)):
            break
    else:
        state.budget_exhausted = True

    if state.current_value < state.best_value:
        state.best_value = state.current_value
        state.best_set = state.current
    return state


def structural_audit(X: LatticeSet, objective: Objective) -> dict:
    """Geometry and potential diagnostics for a claimed near-minimizer."""
    d = X.dim
    N = len(X)
    result = objective.solve(X)
    u = objective.potential_of(result)
    report = {
        "N": N,
        "value": objective.value_of(result),
        "scaled_perimeter": scaled_perimeter(X),
        "diameter_ratio": diameter(X) / N ** (1.0 / d),
        "direction_convex": {j: is_direction_convex(X, j)
                             for j in range(1, d + 1)},
    }
    if objective.kind == "eigen":
        report["positivity_set_is_X"] = level_set(u, 0.0, strict=True) == X
    else:
        report["level_one_is_X"] = level_set(u, 1.0 - 1e-9) == X
    # dominated-slice (walled-in) scan on a few level sets of the potential
    vals = u.nonzero_values()
    thresholds = [float(vals[int(f * (vals.size - 1))])
                  for f in (0.25, 0.5, 0.9)] if vals.size else []
    center = tuple(int(round(c)) for c in X.as_array().mean(axis=0))
    walled = {}
    for t in sorted(set(thresholds)):
        if t <= 0:
            continue
        ok = all(walled_in_check(u, t, j, center, range(1, d + 1))[0]
                 for j in range(1, d + 1))
        walled[t] = ok
    report["walled_in"] = walled
    return report
