"""Discrete p-Dirichlet energies on finitely supported lattice functions.

Provides the `LatticeFunction` container (dense window + integer offset),
the full lattice energy with its scaled variant, the one-dimensional slice
kernels, and the exact slice decomposition of the energy along a
rearrangement direction.

Convention: the full energy `energy_p` sums |u(i)-u(j)|^p over *ordered*
nearest-neighbor pairs, so every unordered edge contributes twice.  The
1-d kernels (`energy_1d`, `interaction_1d`, `diag_1d`) are single-counted
line sums; `decompose_energy` scales its stored components so that they
recombine to the double-counted total.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import (
    Direction,
    LatticeError,
    LatticeSet,
    Point,
    SliceIndex,
    slice_of_point,
)

__all__ = [
    "LatticeFunction",
    "EnergyBreakdown",
    "energy_p",
    "energy_scaled",
    "edge_energy",
    "energy_1d",
    "interaction_1d",
    "diag_1d",
    "decompose_energy",
]

_FSUM_THRESHOLD = 10_000


def _accurate_sum(x: np.ndarray) -> float:
    """Sum with extra care for long accumulations.

    numpy's pairwise summation is already well conditioned; above a size
    threshold we accumulate in extended precision to keep decomposition
    identities tight.
    """
    x = np.asarray(x)
    if x.size > _FSUM_THRESHOLD:
        return float(np.sum(x, dtype=np.longdouble))
    return float(np.sum(x))


class LatticeFunction:
    """Finitely supported real function on Z^d.

    Stored as a dense array over the bounding box of the support plus an
    integer offset; points outside the window read as 0.  Instances are
    value-immutable: do not write into `values` after construction.
    """

    __slots__ = ("dim", "offset", "values")

    def __init__(self, offset, values, dim: int | None = None, _trim: bool = True):
        values = np.asarray(values, dtype=np.float64)
        if dim is None:
            dim = values.ndim
        if values.ndim != dim:
            raise LatticeError(f"values must be {dim}-dimensional")
        if not np.all(np.isfinite(values)):
            raise LatticeError("lattice function values must be finite")
        offset = tuple(int(c) for c in offset)
        if len(offset) != dim:
            raise LatticeError("offset length must equal dimension")
        if _trim:
            offset, values = _trim_window(offset, values)
        self.dim = dim
        self.offset = offset
        self.values = values

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, d: int) -> "LatticeFunction":
        return cls((0,) * d, np.zeros((0,) * d), dim=d, _trim=False)

    @classmethod
    def from_dict(cls, mapping, dim: int | None = None) -> "LatticeFunction":
        items = [(tuple(int(c) for c in p), float(v)) for p, v in mapping.items()]
        items = [(p, v) for p, v in items if v != 0.0]
        if not items:
            if dim is None:
                raise LatticeError("empty function requires an explicit dimension")
            return cls.zero(dim)
        d = len(items[0][0])
        if any(len(p) != d for p, _ in items):
            raise LatticeError("points of mixed dimension")
        if dim is not None and dim != d:
            raise LatticeError(f"dim={dim} but points have length {d}")
        pts = np.array([p for p, _ in items], dtype=np.int64)
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        arr = np.zeros(tuple(hi - lo + 1), dtype=np.float64)
        for (p, v) in items:
            arr[tuple(np.array(p) - lo)] = v
        return cls(tuple(lo), arr, dim=d, _trim=False)

    @classmethod
    def indicator(cls, X: LatticeSet) -> "LatticeFunction":
        if not X.points:
            return cls.zero(X.dim)
        arr = X.as_array()
        lo = arr.min(axis=0)
        vals = np.zeros(tuple(arr.max(axis=0) - lo + 1), dtype=np.float64)
        vals[tuple((arr - lo).T)] = 1.0
        return cls(tuple(lo), vals, dim=X.dim, _trim=False)

    # -- access --------------------------------------------------------

    def __call__(self, p) -> float:
        p = tuple(int(c) for c in p)
        idx = tuple(c - o for c, o in zip(p, self.offset))
        if any(i < 0 or i >= s for i, s in zip(idx, self.values.shape)):
            return 0.0
        return float(self.values[idx])

    def items(self):
        """Yield (point, value) for every nonzero entry, in C order."""
        nz = np.argwhere(self.values != 0.0)
        off = np.array(self.offset, dtype=np.int64)
        for idx in nz:
            yield tuple(int(c) for c in (idx + off)), float(self.values[tuple(idx)])

    def to_dict(self) -> dict[Point, float]:
        return dict(self.items())

    def support(self) -> LatticeSet:
        return LatticeSet((p for p, _ in self.items()), dim=self.dim)

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.values))

    def nonzero_values(self) -> np.ndarray:
        """The multiset of nonzero values, sorted ascending."""
        v = self.values[self.values != 0.0]
        return np.sort(v)

    def norm(self, q: float) -> float:
        return float(_accurate_sum(np.abs(self.values) ** q) ** (1.0 / q))

    def max(self) -> float:
        return float(self.values.max()) if self.values.size else 0.0

    def min_nonzero_or_zero(self) -> float:
        return float(self.values.min()) if self.values.size else 0.0

    def padded(self, margin: int = 1) -> tuple[tuple[int, ...], np.ndarray]:
        """(offset, array) with a zero margin of the given width on every side."""
        out = np.pad(self.values, margin)
        off = tuple(o - margin for o in self.offset)
        return off, out

    # -- algebra -------------------------------------------------------

    def scale(self, a: float) -> "LatticeFunction":
        return LatticeFunction(self.offset, a * self.values, dim=self.dim)

    def __mul__(self, a: float) -> "LatticeFunction":
        return self.scale(float(a))

    __rmul__ = __mul__

    def __add__(self, other: "LatticeFunction") -> "LatticeFunction":
        if not isinstance(other, LatticeFunction):
            return NotImplemented
        if self.dim != other.dim:
            raise LatticeError("dimension mismatch")
        if self.values.size == 0:
            return other
        if other.values.size == 0:
            return self
        lo = np.minimum(self.offset, other.offset)
        hi = np.maximum(np.array(self.offset) + self.values.shape,
                        np.array(other.offset) + other.values.shape)
        out = np.zeros(tuple(hi - lo), dtype=np.float64)
        for f in (self, other):
            sl = tuple(slice(o - l, o - l + s)
                       for o, l, s in zip(f.offset, lo, f.values.shape))
            out[sl] += f.values
        return LatticeFunction(tuple(lo), out, dim=self.dim)

    def translate(self, v) -> "LatticeFunction":
        off = tuple(o + int(c) for o, c in zip(self.offset, v))
        return LatticeFunction(off, self.values, dim=self.dim, _trim=False)

    # -- comparisons ---------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeFunction):
            return NotImplemented
        return (self.dim == other.dim and self.offset == other.offset
                and self.values.shape == other.values.shape
                and bool(np.array_equal(self.values, other.values)))

    def __hash__(self):
        raise TypeError("LatticeFunction is not hashable")

    def allclose(self, other: "LatticeFunction", tol: float = 1e-12) -> bool:
        diff = self + other.scale(-1.0)
        m = float(np.abs(diff.values).max()) if diff.values.size else 0.0
        return m <= tol

    def __repr__(self) -> str:
        return (f"LatticeFunction(d={self.dim}, support={self.support_size}, "
                f"box={self.values.shape} at {self.offset})")


def _trim_window(offset, values):
    """Shrink the window to the bounding box of the nonzero entries."""
    if values.size == 0 or not np.any(values):
        d = values.ndim
        return (0,) * d, np.zeros((0,) * d, dtype=np.float64)
    nz = np.nonzero(values)
    lo = [int(ax.min()) for ax in nz]
    hi = [int(ax.max()) for ax in nz]
    sl = tuple(slice(a, b + 1) for a, b in zip(lo, hi))
    return tuple(o + a for o, a in zip(offset, lo)), np.ascontiguousarray(values[sl])


# ---------------------------------------------------------------------------
# full-lattice energies
# ---------------------------------------------------------------------------

def _single_edge_sum(u: LatticeFunction, p: float) -> float:
    """Sum of |u(i)-u(j)|^p over unordered nearest-neighbor edges."""
    if u.values.size == 0:
        return 0.0
    _, a = u.padded(1)
    total = 0.0
    for ax in range(u.dim):
        d = np.abs(np.diff(a, axis=ax))
        total += _accurate_sum(d ** p)
    return total


def energy_p(u: LatticeFunction, p: float) -> float:
    """Discrete p-Dirichlet energy over ordered neighbor pairs.

    Each unordered edge contributes |u(i)-u(j)|^p twice, once per
    orientation.
    """
    if p <= 1:
        raise LatticeError("p must exceed 1")
    return 2.0 * _single_edge_sum(u, p)


def edge_energy(u: LatticeFunction, p: float) -> float:
    """Single-counted variant of `energy_p`: one term per unordered edge."""
    if p <= 1:
        raise LatticeError("p must exceed 1")
    return _single_edge_sum(u, p)


def energy_scaled(u: LatticeFunction, p: float, N: int) -> float:
    """N^((p-d)/d) times the p-Dirichlet energy."""
    if N < 1:
        raise LatticeError("N must be >= 1")
    d = u.dim
    return float(N) ** ((p - d) / d) * energy_p(u, p)


# ---------------------------------------------------------------------------
# one-dimensional kernels (single-counted line sums)
# ---------------------------------------------------------------------------

def energy_1d(w, p: float) -> float:
    """Sum of |w(i+1)-w(i)|^p along a line; w reads as 0 outside the window."""
    w = np.asarray(w, dtype=np.float64)
    if w.size == 0:
        return 0.0
    wp = np.pad(w, 1)
    return _accurate_sum(np.abs(np.diff(wp)) ** p)


def _common(w, v):
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    n = max(w.size, v.size)
    if w.size < n:
        w = np.pad(w, (0, n - w.size))
    if v.size < n:
        v = np.pad(v, (0, n - v.size))
    return w, v


def interaction_1d(w, v, p: float) -> float:
    """Pointwise p-distance of two aligned sequences: sum |w(i)-v(i)|^p.

    Both sequences are taken to start at the same index and read as 0
    beyond their windows.
    """
    w, v = _common(w, v)
    return _accurate_sum(np.abs(w - v) ** p)


def diag_1d(w, v, p: float) -> float:
    """Vertical plus shifted interaction: sum |w(i)-v(i)|^p + sum |w(i+1)-v(i)|^p."""
    w, v = _common(w, v)
    wp = np.pad(w, 1)
    vp = np.pad(v, 1)
    vertical = _accurate_sum(np.abs(wp - vp) ** p)
    shifted = _accurate_sum(np.abs(wp[1:] - vp[:-1]) ** p)
    return vertical + shifted


# ---------------------------------------------------------------------------
# slice decomposition
# ---------------------------------------------------------------------------

@dataclass
class EnergyBreakdown:
    """Slice decomposition of the lattice energy along one direction.

    `per_slice` holds line (or diagonal-pair) energies keyed by slice;
    `cross_terms` holds interactions between a slice and its translate by a
    coordinate axis, keyed by (slice, 1-based axis).  Components are scaled
    so that their grand total matches the double-counted `energy_p`.
    """

    total: float
    per_slice: dict = field(default_factory=dict)
    cross_terms: dict = field(default_factory=dict)


class _SliceTable:
    """All 1-d slices of a lattice function along a fixed direction."""

    def __init__(self, u: LatticeFunction, xi: Direction):
        self.xi = xi
        table: dict[Point, dict[int, float]] = {}
        for pnt, val in u.items():
            alpha, t = slice_of_point(pnt, xi)
            table.setdefault(alpha, {})[t] = val
        self.seqs: dict[Point, tuple[int, np.ndarray]] = {}
        for alpha, m in table.items():
            t0 = min(m)
            t1 = max(m)
            arr = np.zeros(t1 - t0 + 1, dtype=np.float64)
            for t, v in m.items():
                arr[t - t0] = v
            self.seqs[alpha] = (t0, arr)

    def bases(self):
        return self.seqs.keys()

    def window_at(self, a: Point) -> tuple[int, np.ndarray]:
        """Window of t -> u(a + t*xi), start index in the a-based parameter.

        `a` need not be a canonical slice base; the stored window of its
        slice is re-indexed accordingly.
        """
        alpha, s = slice_of_point(a, self.xi)
        seq = self.seqs.get(alpha)
        if seq is None:
            return 0, np.zeros(0)
        return seq[0] - s, seq[1]

    def aligned(self, a: Point, b: Point) -> tuple[np.ndarray, np.ndarray]:
        """Windows of t -> u(a + t*xi) and t -> u(b + t*xi) on a common range."""
        ta, wa0 = self.window_at(a)
        tb, wb0 = self.window_at(b)
        if wa0.size == 0 and wb0.size == 0:
            z = np.zeros(0)
            return z, z
        starts = [t for t, w in ((ta, wa0), (tb, wb0)) if w.size]
        ends = [t + w.size for t, w in ((ta, wa0), (tb, wb0)) if w.size]
        t0, t1 = min(starts), max(ends)
        wa = np.zeros(t1 - t0)
        wb = np.zeros(t1 - t0)
        wa[ta - t0: ta - t0 + wa0.size] = wa0
        wb[tb - t0: tb - t0 + wb0.size] = wb0
        return wa, wb

    def single(self, a: Point) -> np.ndarray:
        s = self.seqs.get(a)
        return s[1] if s is not None else np.zeros(0)


def _shift(alpha: Point, axis0: int, by: int = 1) -> Point:
    out = list(alpha)
    out[axis0] += by
    return tuple(out)


def decompose_energy(u: LatticeFunction, xi: Direction, p: float) -> EnergyBreakdown:
    """Rewrite the lattice energy as line energies plus cross-line terms.

    Coordinate direction: one line energy per slice plus, for every other
    axis k, the interaction of each slice with its k-translate.  Diagonal
    direction e_j +/- e_l: one diagonal-pair energy per slice base (pairing
    each base with its e_j-translate; consecutive pairs interleave so every
    e_j and e_l edge is counted exactly once) plus, for axes k outside
    {j, l}, the interaction of each slice with its k-translate.  All stored
    components carry the factor 2 of the ordered-pair energy.
    """
    if xi.dim != u.dim:
        raise LatticeError("direction dimension mismatch")
    if p <= 1:
        raise LatticeError("p must exceed 1")
    tbl = _SliceTable(u, xi)
    per_slice: dict[SliceIndex, float] = {}
    cross: dict[tuple[SliceIndex, int], float] = {}

    if xi.is_coordinate:
        j0 = xi.axes[0]
        for alpha in tbl.bases():
            per_slice[SliceIndex(alpha, xi)] = 2.0 * energy_1d(tbl.single(alpha), p)
        for k0 in range(u.dim):
            if k0 == j0:
                continue
            bases = set(tbl.bases()) | {_shift(a, k0, -1) for a in tbl.bases()}
            for alpha in bases:
                wa, wb = tbl.aligned(alpha, _shift(alpha, k0))
                val = 2.0 * interaction_1d(wa, wb, p)
                if val != 0.0:
                    cross[(SliceIndex(alpha, xi), k0 + 1)] = val
    else:
        ax_pos = [i for i, c in enumerate(xi.vector) if c == 1]
        # j is an axis with coefficient +1 so that xi - e_j is a unit vector
        j0 = ax_pos[0]
        l0 = next(a for a in xi.axes if a != j0)
        sign_l = int(xi.vector[l0])
        jl = set(xi.axes)
        # Every base pairs with its e_j-translate; a supported slice can
        # also appear as the upper half of the pair based one step below.
        pair_bases = set(tbl.bases())
        for b in tbl.bases():
            if xi.dot(b) == 1:
                pair_bases.add(_shift(b, j0, -1))
            else:
                pair_bases.add(_shift(b, l0, sign_l))
        for beta in pair_bases:
            wa, wb = tbl.aligned(beta, _shift(beta, j0))
            per_slice[SliceIndex(beta, xi)] = 2.0 * diag_1d(wa, wb, p)
        for k0 in range(u.dim):
            if k0 in jl:
                continue
            cand = set(tbl.bases()) | {_shift(a, k0, -1) for a in tbl.bases()}
            for alpha in cand:
                wa, wb = tbl.aligned(alpha, _shift(alpha, k0))
                val = 2.0 * interaction_1d(wa, wb, p)
                if val != 0.0:
                    cross[(SliceIndex(alpha, xi), k0 + 1)] = val

    total = math.fsum(per_slice.values()) + math.fsum(cross.values())
    return EnergyBreakdown(total=total, per_slice=per_slice, cross_terms=cross)
