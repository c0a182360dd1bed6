"""Lattice geometry primitives on Z^d.

Finite point sets, neighbor enumeration, edge perimeter, diameters,
direction convexity, lattice balls and symmetric differences.  All
functions are pure; `LatticeSet` is immutable after construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

Point = tuple[int, ...]


class LatticeError(ValueError):
    """Raised on malformed lattice inputs (dimension mismatch, empty set...)."""


class LatticeSet:
    """Finite subset of Z^d.

    Points are stored as a frozenset of integer tuples plus a sorted tuple
    for deterministic iteration.  Membership is O(1).
    """

    __slots__ = ("points", "dim", "_sorted")

    def __init__(self, points, dim: int | None = None):
        pts = frozenset(tuple(int(c) for c in p) for p in points)
        if not pts:
            if dim is None:
                raise LatticeError("empty set requires an explicit dimension")
            self.dim = int(dim)
        else:
            d = len(next(iter(pts)))
            if any(len(p) != d for p in pts):
                raise LatticeError("points of mixed dimension")
            if dim is not None and dim != d:
                raise LatticeError(f"dim={dim} but points have length {d}")
            self.dim = d
        if self.dim < 1:
            raise LatticeError("dimension must be >= 1")
        self.points = pts
        self._sorted = tuple(sorted(pts))

    @property
    def cardinality(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.points

    def __iter__(self):
        return iter(self._sorted)

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeSet) and self.dim == other.dim \
            and self.points == other.points

    def __hash__(self) -> int:
        return hash((self.dim, self.points))

    def __repr__(self) -> str:
        return f"LatticeSet(d={self.dim}, N={len(self)})"

    def as_array(self) -> np.ndarray:
        """(N, d) integer array in sorted order."""
        if not self.points:
            return np.empty((0, self.dim), dtype=np.int64)
        return np.array(self._sorted, dtype=np.int64)

    def translate(self, v) -> "LatticeSet":
        v = tuple(int(c) for c in v)
        return LatticeSet((tuple(a + b for a, b in zip(p, v)) for p in self.points),
                          dim=self.dim)

    def bounding_box(self) -> tuple[Point, Point]:
        if not self.points:
            raise LatticeError("empty set has no bounding box")
        arr = self.as_array()
        return tuple(arr.min(axis=0)), tuple(arr.max(axis=0))


@dataclass(frozen=True)
class Direction:
    """A rearrangement direction: a coordinate vector e_j or a diagonal e_j +/- e_l."""

    vector: Point

    def __post_init__(self):
        nz = [c for c in self.vector if c != 0]
        if len(nz) == 1:
            if nz[0] != 1:
                raise LatticeError(f"coordinate direction must be +e_j, got {self.vector}")
        elif len(nz) == 2:
            # e_i + e_j, e_i - e_j or e_j - e_i: two unit entries, at least one +1
            if any(abs(c) != 1 for c in nz) or 1 not in nz:
                raise LatticeError(f"diagonal must be of the form e_i +/- e_j, "
                                   f"got {self.vector}")
        else:
            raise LatticeError(f"not a valid direction vector: {self.vector}")

    @property
    def dim(self) -> int:
        return len(self.vector)

    @property
    def is_coordinate(self) -> bool:
        return sum(1 for c in self.vector if c != 0) == 1

    @property
    def axes(self) -> tuple[int, ...]:
        """Indices (0-based) of the nonzero entries."""
        return tuple(i for i, c in enumerate(self.vector) if c != 0)

    def dot(self, p) -> int:
        return sum(a * b for a, b in zip(self.vector, p))

    def norm_sq(self) -> int:
        return sum(c * c for c in self.vector)

    def __repr__(self) -> str:
        return f"Direction{self.vector}"


def coordinate_direction(j: int, d: int) -> Direction:
    """e_j for 1-based axis j in dimension d."""
    v = [0] * d
    v[j - 1] = 1
    return Direction(tuple(v))


def rearrangement_directions(d: int, dedupe: bool = False) -> list[Direction]:
    """The direction set used for symmetrization: all e_i and all e_i +/- e_j.

    Both e_i - e_j and e_j - e_i are present by default (they are each
    other's negatives and generate the same slice families); `dedupe=True`
    keeps one representative per slice family, namely the diagonal whose
    first nonzero entry is +1.
    """
    dirs = [coordinate_direction(j, d) for j in range(1, d + 1)]
    seen = set()
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            for sign in (1, -1):
                v = [0] * d
                v[i], v[j] = 1, sign
                vec = tuple(v)
                if dedupe:
                    # collapse xi and -xi to the representative with leading +1
                    if vec[min(i, j)] == -1:
                        continue
                if vec in seen:
                    continue
                seen.add(vec)
                dirs.append(Direction(vec))
    return dirs


@dataclass(frozen=True)
class SliceIndex:
    """A 1-d slice of Z^d: the line {base + t*direction : t in Z}.

    `offset_class` is direction . base, which is 0 for coordinate
    directions and 0 or 1 for diagonals.
    """

    base: Point
    direction: Direction

    def __post_init__(self):
        c = self.direction.dot(self.base)
        if self.direction.is_coordinate:
            if c != 0:
                raise LatticeError("coordinate slice base must satisfy xi.alpha = 0")
        elif c not in (0, 1):
            raise LatticeError("diagonal slice base must satisfy xi.alpha in {0, 1}")

    @property
    def offset_class(self) -> int:
        return self.direction.dot(self.base)

    def point(self, t: int) -> Point:
        return tuple(a + t * b for a, b in zip(self.base, self.direction.vector))


def slice_of_point(p: Point, xi: Direction) -> tuple[Point, int]:
    """Decompose p = alpha + t*xi with alpha a valid slice base; returns (alpha, t)."""
    s = xi.dot(p)
    q = xi.norm_sq()
    c = s % q  # 0 for coordinate; 0/1 for diagonal
    t = (s - c) // q
    alpha = tuple(a - t * b for a, b in zip(p, xi.vector))
    return alpha, t


def neighbors(i: Point) -> list[Point]:
    """The 2d nearest neighbors of a lattice point."""
    out = []
    for k in range(len(i)):
        for s in (1, -1):
            j = list(i)
            j[k] += s
            out.append(tuple(j))
    return out


def perimeter(X: LatticeSet) -> int:
    """Edge perimeter: number of lattice edges from X to its complement."""
    if not X.points:
        raise LatticeError("perimeter of empty set")
    return sum(1 for i in X.points for j in neighbors(i) if j not in X.points)


def scaled_perimeter(X: LatticeSet) -> float:
    """Perimeter rescaled by N^((1-d)/d) (perimeter per particle-surface unit)."""
    N = len(X)
    return N ** ((1 - X.dim) / X.dim) * perimeter(X)


def diameter(X: LatticeSet, metric: str = "euclidean") -> float:
    """Largest pairwise distance in X.  `metric` is 'euclidean' or 'linf'."""
    if not X.points:
        raise LatticeError("diameter of empty set")
    arr = X.as_array().astype(np.float64)
    if len(arr) == 1:
        return 0.0
    best = 0.0
    chunk = max(1, int(2e6) // max(len(arr), 1))
    for s in range(0, len(arr), chunk):
        block = arr[s:s + chunk]
        diff = block[:, None, :] - arr[None, :, :]
        if metric == "euclidean":
            dist = np.sqrt((diff ** 2).sum(axis=2))
        elif metric == "linf":
            dist = np.abs(diff).max(axis=2)
        else:
            raise LatticeError(f"unknown metric {metric!r}")
        best = max(best, float(dist.max()))
    return best


def is_direction_convex(X: LatticeSet, j: int) -> bool:
    """True iff every line of X parallel to axis j (1-based) is an integer interval."""
    xi = coordinate_direction(j, X.dim)
    lines: dict[Point, list[int]] = {}
    for p in X.points:
        alpha, t = slice_of_point(p, xi)
        lines.setdefault(alpha, []).append(t)
    for ts in lines.values():
        ts.sort()
        if ts[-1] - ts[0] != len(ts) - 1:
            return False
    return True


def is_convex(X: LatticeSet) -> bool:
    return all(is_direction_convex(X, j) for j in range(1, X.dim + 1))


def lattice_ball(r: float, z: Point | None = None, d: int | None = None) -> LatticeSet:
    """Closed Euclidean lattice ball {i in Z^d : |i - z| <= r}."""
    if z is None:
        if d is None:
            raise LatticeError("lattice_ball needs a center or a dimension")
        z = (0,) * d
    z = tuple(int(c) for c in z)
    d = len(z)
    if r <= 0:
        raise LatticeError("radius must be positive")
    k = int(np.floor(r + 1e-9))
    rng = np.arange(-k, k + 1)
    grids = np.meshgrid(*([rng] * d), indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)
    mask = (coords.astype(np.float64) ** 2).sum(axis=1) <= r * r + 1e-9
    pts = coords[mask]
    return LatticeSet((tuple(int(c + zc) for c, zc in zip(row, z)) for row in pts), dim=d)


def quasi_ball(N: int, d: int) -> LatticeSet:
    """The N lattice points closest to the origin (ties by lexicographic order)."""
    if N < 1:
        raise LatticeError("N must be >= 1")
    # generous radius so the candidate pool certainly holds N points
    r = 1.0
    while len(ball := lattice_ball(r, (0,) * d)) < N:
        r *= 1.5
    cand = sorted(ball.points, key=lambda p: (sum(c * c for c in p), p))
    return LatticeSet(cand[:N], dim=d)


def sym_diff_count(X: LatticeSet, Y: LatticeSet) -> int:
    """#(X \\ Y) + #(Y \\ X)."""
    if X.dim != Y.dim:
        raise LatticeError("dimension mismatch in symmetric difference")
    return len(X.points.symmetric_difference(Y.points))


def barycenter(X: LatticeSet) -> Point:
    arr = X.as_array()
    return tuple(int(round(c)) for c in arr.mean(axis=0))


def min_sym_diff_to_ball(X: LatticeSet, r: float) -> tuple[Point, int]:
    """Best lattice translate of the radius-r lattice ball, in symmetric difference.

    Minimizes #(X \\Delta (z + B_r cap Z^d)) over all centers z; the overlap
    #(X cap (z + B)) is computed for every z at once by FFT cross-correlation,
    which covers (a superset of) the window around the barycenter where the
    minimum can occur.  Ties broken by lexicographically smallest z.
    """
    if not X.points:
        raise LatticeError("empty configuration")
    d = X.dim
    ball = lattice_ball(r, (0,) * d)
    barr = ball.as_array()
    bmin = barr.min(axis=0)
    bshape = barr.max(axis=0) - bmin + 1
    bgrid = np.zeros(bshape, dtype=np.float64)
    bgrid[tuple((barr - bmin).T)] = 1.0

    xarr = X.as_array()
    xmin = xarr.min(axis=0)
    xshape = xarr.max(axis=0) - xmin + 1
    xgrid = np.zeros(xshape, dtype=np.float64)
    xgrid[tuple((xarr - xmin).T)] = 1.0

    flipped = bgrid[tuple(slice(None, None, -1) for _ in range(d))]
    overlap = fftconvolve(xgrid, flipped, mode="full")
    overlap = np.rint(overlap).astype(np.int64)
    overlap[overlap < 0] = 0

    best = int(overlap.max())
    # output index k maps to center z = k + xmin - bmin - (bshape - 1)
    idx = np.argwhere(overlap == best)
    zs = idx + xmin - bmin - (bshape - 1)
    z_best = tuple(int(c) for c in min(map(tuple, zs)))
    count = len(X) + len(ball) - 2 * best
    return z_best, int(count)
