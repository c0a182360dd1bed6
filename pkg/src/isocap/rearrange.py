"""Discrete Schwarz-type rearrangements.

One-dimensional symmetrization about the origin, directional rearrangement
of lattice functions along coordinate or diagonal directions, iterated
plans, window flips, level sets, the sequence-robustness check (does every
bounded chain of rearrangements preserve the energy?) and the dominated
("walled-in") slice test.

One-dimensional sequences are passed as either a bare array-like (first
entry at index 0) or a pair (offset, array); functions returning sequences
always return the (offset, ndarray) form trimmed to the support.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .energy import LatticeFunction, _SliceTable, energy_p
from .lattice import (
    Direction,
    LatticeError,
    LatticeSet,
    Point,
    rearrangement_directions,
)

__all__ = [
    "RearrangementPlan",
    "PnReport",
    "symmetrize_1d",
    "reflect",
    "flip",
    "symmetrize_direction",
    "iterate_symmetrize",
    "check_Pn",
    "level_set",
    "walled_in_check",
]

PN_SEQUENCE_CAP = 100_000


def _as_seq(w) -> tuple[int, np.ndarray]:
    if isinstance(w, tuple) and len(w) == 2 and np.isscalar(w[0]):
        off, arr = int(w[0]), np.asarray(w[1], dtype=np.float64)
    else:
        off, arr = 0, np.asarray(w, dtype=np.float64)
    if arr.ndim != 1:
        raise LatticeError("sequence must be one-dimensional")
    return off, arr


def _trim_seq(off: int, arr: np.ndarray) -> tuple[int, np.ndarray]:
    nz = np.nonzero(arr)[0]
    if nz.size == 0:
        return 0, np.zeros(0)
    return off + int(nz[0]), np.ascontiguousarray(arr[nz[0]:nz[-1] + 1])


def _symmetric_positions(m: int) -> list[int]:
    """The first m positions in the order 0, 1, -1, 2, -2, ..."""
    out = [0]
    k = 1
    while len(out) < m:
        out.append(k)
        if len(out) < m:
            out.append(-k)
        k += 1
    return out[:m]


def symmetrize_1d(w) -> tuple[int, np.ndarray]:
    """Rearrange a nonnegative sequence so values decrease along 0,1,-1,2,-2,...

    The output is a permutation of the value multiset: the r-th largest
    value lands on the r-th position of the alternating order.  Ties keep
    their original left-to-right order (stable).
    """
    off, arr = _as_seq(w)
    if arr.size and arr.min() < 0:
        raise LatticeError("symmetrization requires nonnegative values")
    nz = arr[arr != 0.0]
    if nz.size == 0:
        return 0, np.zeros(0)
    order = np.argsort(-nz, kind="stable")
    positions = _symmetric_positions(nz.size)
    out = {positions[r]: float(nz[order[r]]) for r in range(nz.size)}
    lo = min(out)
    res = np.zeros(max(out) - lo + 1)
    for pos, v in out.items():
        res[pos - lo] = v
    return lo, res


def reflect(w) -> tuple[int, np.ndarray]:
    """Reflection about the origin: (Rw)(i) = w(-i)."""
    off, arr = _as_seq(w)
    if arr.size == 0:
        return 0, arr
    new_off = -(off + arr.size - 1)
    return _trim_seq(new_off, arr[::-1])


def flip(w, l: int, m: int) -> tuple[int, np.ndarray]:
    """Reverse a sequence on the window [l, m]: w'(i) = w(m + l - i) there."""
    if l >= m:
        raise LatticeError("flip needs l < m")
    off, arr = _as_seq(w)
    lo = min(off, l)
    hi = max(off + arr.size - 1, m) if arr.size else m
    full = np.zeros(hi - lo + 1)
    if arr.size:
        full[off - lo: off - lo + arr.size] = arr
    full[l - lo: m - lo + 1] = full[l - lo: m - lo + 1][::-1]
    return _trim_seq(lo, full)


def seq_value(w, i: int) -> float:
    """Value of a sequence at index i (0 outside the window)."""
    off, arr = _as_seq(w)
    k = i - off
    if 0 <= k < arr.size:
        return float(arr[k])
    return 0.0


@dataclass(frozen=True)
class RearrangementPlan:
    """An ordered list of directions to symmetrize along, left to right."""

    directions: tuple
    dedupe: bool = False

    def __post_init__(self):
        dirs = tuple(self.directions)
        for xi in dirs:
            if not isinstance(xi, Direction):
                raise LatticeError("plan entries must be Direction instances")
        object.__setattr__(self, "directions", dirs)

    @classmethod
    def full_sweep(cls, d: int, dedupe: bool = False) -> "RearrangementPlan":
        return cls(tuple(rearrangement_directions(d, dedupe=dedupe)), dedupe=dedupe)


def symmetrize_direction(u: LatticeFunction, xi: Direction) -> LatticeFunction:
    """Rearrange every slice of u along xi.

    Slices whose base has offset class 0 receive the symmetrized
    arrangement; for diagonal directions, slices with offset class 1
    receive the reflected symmetrized arrangement.  (Lattice points are
    partitioned by the residue of xi . i modulo |xi|^2.)  The global value
    multiset is preserved exactly.
    """
    if u.dim != xi.dim:
        raise LatticeError("direction dimension mismatch")
    if u.values.size and u.values.min() < 0:
        raise LatticeError("symmetrization requires nonnegative values")
    tbl = _SliceTable(u, xi)
    out: dict[Point, float] = {}
    for alpha, (t0, arr) in tbl.seqs.items():
        cls = xi.dot(alpha)
        sym = symmetrize_1d((t0, arr))
        if cls == 1:
            sym = reflect(sym)
        s_off, s_arr = sym
        for k in range(s_arr.size):
            if s_arr[k] != 0.0:
                t = s_off + k
                out[tuple(a + t * b for a, b in zip(alpha, xi.vector))] = float(s_arr[k])
    if not out:
        return LatticeFunction.zero(u.dim)
    return LatticeFunction.from_dict(out, dim=u.dim)


def iterate_symmetrize(u: LatticeFunction, plan: RearrangementPlan) -> LatticeFunction:
    """Apply the plan's directions left to right."""
    for xi in plan.directions:
        u = symmetrize_direction(u, xi)
    return u


@dataclass
class PnReport:
    """Outcome of testing energy preservation over direction sequences."""

    n: int
    preserved: bool
    worst_sequence: tuple | None
    energy_before: float
    energy_after: float
    sampled: bool = False
    tested: int = 0


def check_Pn(u: LatticeFunction, n: int, p: float, tol: float = 1e-12,
             cap: int = PN_SEQUENCE_CAP, seed: int = 0) -> PnReport:
    """Test whether every length-n rearrangement chain preserves the energy.

    All |B|^n direction sequences are tried when that count fits the cap;
    otherwise a fixed-seed random sample of `cap` sequences is drawn and
    the report is flagged as sampled.  `preserved` means no tested chain
    decreased the energy by more than `tol` (relative).
    """
    if n < 1:
        raise LatticeError("n must be >= 1")
    dirs = rearrangement_directions(u.dim)
    e0 = energy_p(u, p)
    total = len(dirs) ** n
    sampled = total > cap

    if sampled:
        rng = np.random.default_rng(seed)
        def gen():
            for _ in range(cap):
                yield tuple(dirs[i] for i in rng.integers(0, len(dirs), size=n))
        seqs = gen()
        count = cap
    else:
        seqs = itertools.product(dirs, repeat=n)
        count = total

    worst = None
    worst_energy = e0
    scale = max(abs(e0), 1.0)
    for seq in seqs:
        v = u
        for xi in seq:
            v = symmetrize_direction(v, xi)
        e1 = energy_p(v, p)
        if e1 < worst_energy:
            worst_energy = e1
            worst = tuple(seq)
    preserved = (e0 - worst_energy) <= tol * scale
    return PnReport(n=n, preserved=preserved,
                    worst_sequence=None if preserved else worst,
                    energy_before=e0, energy_after=worst_energy,
                    sampled=sampled, tested=count)


def level_set(u: LatticeFunction, t: float, strict: bool = False) -> LatticeSet:
    """{i : u(i) >= t} (or > t when strict).  The threshold must keep it finite."""
    if (not strict and t <= 0) or (strict and t < 0):
        raise LatticeError("level set is infinite at this threshold")
    if strict:
        mask = u.values > t
    else:
        mask = u.values >= t
    idx = np.argwhere(mask)
    off = np.array(u.offset, dtype=np.int64)
    return LatticeSet((tuple(int(c) for c in row + off) for row in idx), dim=u.dim)


def walled_in_check(u: LatticeFunction, t: float, j: int, x0: Point,
                    axes) -> tuple[bool, Point | None]:
    """Does one slice dominate all others inside an affine sublattice?

    Slices run along axis j (1-based) inside the sublattice through x0
    spanned by `axes` (1-based, must contain j).  Returns (True, alpha)
    when the level set of the slice through alpha contains the level set
    of every other slice of the sublattice; (False, None) otherwise.
    """
    if u.values.size and u.values.min() < 0:
        raise LatticeError("walled-in test requires nonnegative values")
    axes = tuple(sorted(set(int(a) for a in axes)))
    if j not in axes:
        raise LatticeError("axes must contain the slicing axis j")
    d = u.dim
    if any(a < 1 or a > d for a in axes):
        raise LatticeError("axis out of range")
    x0 = tuple(int(c) for c in x0)
    j0 = j - 1
    free = [a - 1 for a in axes]
    fixed = [k for k in range(d) if k not in free]

    levels: dict[Point, set[int]] = {}
    for pnt, val in u.items():
        if any(pnt[k] != x0[k] for k in fixed):
            continue
        if val < t:
            continue
        base = tuple(x0[j0] if k == j0 else pnt[k] for k in range(d))
        levels.setdefault(base, set()).add(pnt[j0])

    if not levels:
        return True, None
    # only a slice of maximal level-set size can dominate
    alpha = max(levels, key=lambda b: (len(levels[b]), tuple(-c for c in b)))
    big = levels[alpha]
    for base, ls in levels.items():
        if not ls.issubset(big):
            return False, None
    return True, alpha
