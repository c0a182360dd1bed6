"""Randomized invariant suites, runnable from the command line.

Each suite draws seeded random instances and checks the structural
identities and inequalities the library is built on.  The low-level
kernels a suite exercises can be overridden through the `kernels` mapping
(useful for mutation-style self-tests: replacing a kernel with a broken
variant must make its suite fail).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import energy as _energy
from . import rearrange as _rearrange
from .capacity import eigen_ground_state, p_capacity, relative_capacity, verify_potential
from .embedding import interpolation_energy, zeta_volume_bounds_check
from .energy import LatticeFunction, decompose_energy, energy_p
from .lattice import (
    LatticeSet,
    lattice_ball,
    min_sym_diff_to_ball,
    rearrangement_directions,
    is_direction_convex,
)
from .optimize import Objective, symmetrization_descent_step

__all__ = ["PropertyResult", "SuiteReport", "run_suite", "SUITES"]


@dataclass
class PropertyResult:
    name: str
    passed: bool
    checked: int
    witness: str | None = None


@dataclass
class SuiteReport:
    suite: str
    seed: int
    trials: int
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "results": [vars(r) for r in self.results],
        }


def _default_kernels() -> dict:
    return {
        "energy_1d": _energy.energy_1d,
        "interaction_1d": _energy.interaction_1d,
        "diag_1d": _energy.diag_1d,
        "symmetrize_1d": _rearrange.symmetrize_1d,
        "reflect": _rearrange.reflect,
    }


def _random_function(rng, d: int, side: int = 4, density: float = 0.7,
                     nonneg: bool = True) -> LatticeFunction:
    vals = rng.random(size=(side,) * d)
    vals[rng.random(size=vals.shape) > density] = 0.0
    if not nonneg:
        vals -= 0.5
    off = tuple(int(c) for c in rng.integers(-3, 3, size=d))
    return LatticeFunction(off, vals, dim=d)


def _random_set(rng, d: int, n: int) -> LatticeSet:
    """Random connected n-point set grown from the origin."""
    pts = {(0,) * d}
    from .lattice import neighbors
    while len(pts) < n:
        frontier = sorted({j for i in pts for j in neighbors(i)} - pts)
        pts.add(frontier[rng.integers(0, len(frontier))])
    return LatticeSet(pts, dim=d)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_lattice(seed: int, trials: int, kernels: dict) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    out = []

    ok, wit, n = True, None, 0
    for _ in range(max(trials // 10, 5)):
        r = float(rng.uniform(1.0, 4.0))
        z = tuple(int(c) for c in rng.integers(-5, 5, size=3))
        B = lattice_ball(r, z)
        if not all(is_direction_convex(B, j) for j in (1, 2, 3)):
            ok, wit = False, f"non-convex ball r={r}, z={z}"
            break
        zz, cnt = min_sym_diff_to_ball(B, r)
        if cnt != 0 or zz != z:
            ok, wit = False, f"ball self-match failed r={r}, z={z} -> {zz}, {cnt}"
            break
        n += 1
    out.append(PropertyResult("lattice_ball_convex_and_self_matching", ok, n, wit))
    return out


def suite_energy(seed: int, trials: int, kernels: dict) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    out = []

    ok, wit, n = True, None, 0
    for _ in range(trials):
        d = int(rng.choice([2, 3]))
        p = float(rng.choice([1.5, 2.0, 2.5]))
        u = _random_function(rng, d)
        dirs = rearrangement_directions(d)
        xi = dirs[rng.integers(0, len(dirs))]
        br = decompose_energy(u, xi, p)
        e = energy_p(u, p)
        if abs(br.total - e) > 1e-12 * max(1.0, e):
            ok, wit = False, f"decomposition gap {br.total - e} at d={d}, p={p}, xi={xi}"
            break
        n += 1
    out.append(PropertyResult("energy_decomposition_identity", ok, n, wit))

    ok, wit, n = True, None, 0
    for _ in range(trials):
        d = int(rng.choice([2, 3]))
        p = float(rng.uniform(1.2, 3.0))
        u = _random_function(rng, d, nonneg=False)
        lam = float(rng.uniform(-2.0, 2.0))
        e1 = energy_p(u.scale(lam), p)
        e2 = abs(lam) ** p * energy_p(u, p)
        if abs(e1 - e2) > 1e-10 * max(1.0, e2):
            ok, wit = False, f"homogeneity gap at p={p}, lam={lam}"
            break
        v = u.translate(tuple(int(c) for c in rng.integers(-4, 4, size=d)))
        if abs(energy_p(v, p) - energy_p(u, p)) > 1e-10 * max(1.0, energy_p(u, p)):
            ok, wit = False, "translation variance"
            break
        n += 1
    out.append(PropertyResult("energy_homogeneity_and_translation", ok, n, wit))

    ok, wit, n = True, None, 0
    for _ in range(trials):
        d = int(rng.choice([2, 3]))
        p = float(rng.uniform(1.2, 3.0))
        u = _random_function(rng, d, nonneg=False)
        v = _random_function(rng, d, nonneg=False)
        t = float(rng.random())
        lhs = energy_p(u.scale(t) + v.scale(1 - t), p)
        rhs = t * energy_p(u, p) + (1 - t) * energy_p(v, p)
        if lhs > rhs + 1e-10 * max(1.0, rhs):
            ok, wit = False, f"convexity violated at p={p}, t={t}"
            break
        n += 1
    out.append(PropertyResult("energy_convexity", ok, n, wit))
    return out


def suite_rearrangement(seed: int, trials: int, kernels: dict) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    out = []
    sym1 = kernels["symmetrize_1d"]
    refl = kernels["reflect"]
    inter = kernels["interaction_1d"]
    diag = kernels["diag_1d"]

    ok, wit, n = True, None, 0
    for _ in range(trials):
        d = int(rng.choice([2, 3]))
        p = float(rng.choice([1.5, 2.0, 3.0]))
        u = _random_function(rng, d)
        dirs = rearrangement_directions(d)
        xi = dirs[rng.integers(0, len(dirs))]
        us = _rearrange.symmetrize_direction(u, xi)
        e0, e1 = energy_p(u, p), energy_p(us, p)
        if e1 > e0 + 1e-12 * max(1.0, e0):
            ok, wit = False, f"energy increased: {e0} -> {e1} along {xi}"
            break
        if not np.array_equal(np.sort(u.nonzero_values()),
                              np.sort(us.nonzero_values())):
            ok, wit = False, f"value multiset changed along {xi}"
            break
        n += 1
    out.append(PropertyResult("symmetrization_monotone_and_measure_preserving",
                              ok, n, wit))

    ok, wit, n = True, None, 0
    for _ in range(trials):
        p = float(rng.choice([1.2, 2.0, 3.7]))
        a1, a2, b1, b2 = rng.random(4) * 3
        lhs = (abs(min(a1, a2) - min(b1, b2)) ** p
               + abs(max(a1, a2) - max(b1, b2)) ** p)
        rhs = abs(a1 - b1) ** p + abs(a2 - b2) ** p
        if lhs > rhs + 1e-12 * max(1.0, rhs):
            ok, wit = False, f"min-max violated at {(a1, a2, b1, b2, p)}"
            break
        n += 1
    out.append(PropertyResult("minmax_inequality", ok, n, wit))

    ok, wit, n = True, None, 0
    for _ in range(trials):
        p = float(rng.choice([1.5, 2.0, 3.0]))
        w = rng.random(rng.integers(1, 9)) * 2
        v = rng.random(rng.integers(1, 9)) * 2
        ws, vs = sym1(w), sym1(v)

        def window(seq, lo, hi):
            return np.array([_rearrange.seq_value(seq, i)
                             for i in range(lo, hi + 1)])

        lo, hi = -12, 12
        wa, va = window(ws, lo, hi), window(vs, lo, hi)
        if inter(wa, va, p) > inter(w, np.pad(v, (0, max(0, w.size - v.size))),
                                    p) + 1e-12:
            ok, wit = False, "neighbouring-lines inequality violated"
            break
        rvs = refl(vs)
        ra = window(rvs, lo, hi)
        if diag(wa, ra, p) > diag(w, np.pad(v, (0, max(0, w.size - v.size))),
                                  p) + 1e-12:
            ok, wit = False, "diagonal interaction inequality violated"
            break
        n += 1
    out.append(PropertyResult("paired_line_inequalities", ok, n, wit))

    ok, wit, n = True, None, 0
    for _ in range(trials):
        d = int(rng.choice([2, 3]))
        u = _random_function(rng, d)
        dirs = rearrangement_directions(d)
        xi = dirs[rng.integers(0, len(dirs))]
        once = _rearrange.symmetrize_direction(u, xi)
        twice = _rearrange.symmetrize_direction(once, xi)
        if once != twice:
            ok, wit = False, f"not idempotent along {xi}"
            break
        n += 1
    out.append(PropertyResult("symmetrization_idempotent", ok, n, wit))
    return out


def suite_capacity(seed: int, trials: int, kernels: dict) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    out = []

    ok, wit, n = True, None, 0
    for _ in range(max(trials // 20, 3)):
        d = 3
        X = _random_set(rng, d, int(rng.integers(2, 15)))
        res = relative_capacity(X, R=3.0)
        rep = verify_potential(res.potential, X, 2.0, mode="relative", R=3.0)
        if (rep.max_bound_violation > 1e-12 or rep.max_constraint_violation > 1e-12
                or rep.max_defect > 1e-10):
            ok, wit = False, f"potential residuals {rep} at N={len(X)}"
            break
        n += 1
    out.append(PropertyResult("relative_potential_residuals", ok, n, wit))

    ok, wit, n = True, None, 0
    for _ in range(max(trials // 20, 3)):
        X = _random_set(rng, 3, int(rng.integers(2, 12)))
        Y = LatticeSet(set(X.points) | set(
            _random_set(rng, 3, int(rng.integers(2, 8))).points), dim=3)
        radius = 25.0
        rx = p_capacity(X, 2.0, truncation=radius)
        ry = p_capacity(Y, 2.0, truncation=radius)
        if rx.raw_value > ry.raw_value + 1e-9:
            ok, wit = False, f"monotonicity violated: {rx.raw_value} > {ry.raw_value}"
            break
        n += 1
    out.append(PropertyResult("capacity_monotone_in_set", ok, n, wit))

    ok, wit, n = True, None, 0
    for _ in range(max(trials // 20, 3)):
        X = _random_set(rng, 3, int(rng.integers(1, 20)))
        res = eigen_ground_state(X)
        norm = float(np.sum(res.eigenfunction.values ** 2))
        if abs(norm - len(X)) > 1e-9 * len(X):
            ok, wit = False, f"eigenfunction normalization {norm} != {len(X)}"
            break
        n += 1
    out.append(PropertyResult("eigen_normalization", ok, n, wit))
    return out


def suite_embedding(seed: int, trials: int, kernels: dict) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    out = []

    ok, wit, n = True, None, 0
    for _ in range(max(trials // 5, 5)):
        d = int(rng.choice([2, 3]))
        p = float(rng.choice([1.5, 2.0, 2.5]))
        u = _random_function(rng, d, nonneg=False)
        gap = abs(interpolation_energy(u, p, norm="lp") - energy_p(u, p))
        if gap > 1e-9 * max(1.0, energy_p(u, p)):
            ok, wit = False, f"interpolation identity gap {gap} at d={d}, p={p}"
            break
        n += 1
    out.append(PropertyResult("interpolation_energy_identity", ok, n, wit))

    ok, wit, n = True, None, 0
    for _ in range(max(trials // 10, 5)):
        X = _random_set(rng, 3, int(rng.integers(1, 25)))
        rep = zeta_volume_bounds_check(X)
        if not (rep["upper_ok"] and rep["lower_ok"]):
            ok, wit = False, f"volume bounds failed: {rep}"
            break
        n += 1
    out.append(PropertyResult("embedding_volume_bounds", ok, n, wit))
    return out


def suite_optimizer(seed: int, trials: int, kernels: dict) -> list[PropertyResult]:
    rng = np.random.default_rng(seed)
    out = []

    ok, wit, n = True, None, 0
    obj = Objective(kind="p_cap", p=2.0, truncation=20.0)
    for _ in range(max(trials // 50, 3)):
        X = _random_set(rng, 3, int(rng.integers(4, 20)))
        dirs = rearrangement_directions(3)
        xi = dirs[rng.integers(0, len(dirs))]
        v0 = obj.value_of(obj.solve(X))
        Xs = symmetrization_descent_step(X, xi, obj)
        v1 = obj.value_of(obj.solve(Xs))
        if len(Xs) != len(X):
            ok, wit = False, f"cardinality changed {len(X)} -> {len(Xs)}"
            break
        if v1 > v0 + 1e-9 * max(1.0, v0):
            ok, wit = False, f"descent increased objective {v0} -> {v1}"
            break
        n += 1
    out.append(PropertyResult("descent_step_certified", ok, n, wit))
    return out


SUITES = {
    "lattice": suite_lattice,
    "energy": suite_energy,
    "rearrangement": suite_rearrangement,
    "capacity": suite_capacity,
    "embedding": suite_embedding,
    "optimizer": suite_optimizer,
}


def run_suite(name: str, seed: int = 0, trials: int = 200,
              kernels: dict | None = None) -> SuiteReport:
    """Run one named suite (or 'all') and collect the results."""
    merged = _default_kernels()
    if kernels:
        merged.update(kernels)
    report = SuiteReport(suite=name, seed=seed, trials=trials)
    if name == "all":
        for key, fn in SUITES.items():
            report.results.extend(fn(seed, trials, merged))
    elif name in SUITES:
        report.results.extend(SUITES[name](seed, trials, merged))
    else:
        raise ValueError(f"unknown suite {name!r}")
    return report
