"""Closed-form continuum reference quantities for radial capacities.

Exact unit-ball capacities and capacitary profiles, ball volumes,
equivalent radii, and discretized radial test functions whose lattice
energy upper-bounds the discrete capacity of lattice balls.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import LatticeFunction
from .lattice import LatticeError

__all__ = [
    "ContinuumBallData",
    "ball_volume",
    "r_alpha",
    "radial_potential_p",
    "radial_potential_relative",
    "cap_p_ball",
    "cap_relative_ball",
    "truncation_correction",
    "discretized_test_function",
    "test_function_tail_fraction",
]

# unit-ball volumes for small dimensions via the recurrence
# V_d = 2*pi/d * V_{d-2}, V_0 = 1, V_1 = 2 (exact up to rounding)
_VOLUMES = {0: 1.0, 1: 2.0}
for _d in range(2, 11):
    _VOLUMES[_d] = 2.0 * math.pi / _d * _VOLUMES[_d - 2]


def ball_volume(d: int) -> float:
    """Volume of the d-dimensional Euclidean unit ball."""
    if d < 1:
        raise LatticeError("dimension must be >= 1")
    if d in _VOLUMES:
        return _VOLUMES[d]
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def r_alpha(alpha: float, d: int) -> float:
    """Radius of the d-ball with volume alpha."""
    if alpha < 0:
        raise LatticeError("volume must be nonnegative")
    return (alpha / ball_volume(d)) ** (1.0 / d)


def _check_p(p: float, d: int):
    if not (1 < p < d):
        raise LatticeError(f"need 1 < p < d, got p={p}, d={d}")


def radial_potential_p(x: float, p: float, d: int) -> float:
    """Capacitary profile of the unit ball: 1 inside, x^((p-d)/(p-1)) outside."""
    _check_p(p, d)
    if x <= 1.0:
        return 1.0
    return x ** ((p - d) / (p - 1.0))


def radial_potential_relative(x: float, R: float, d: int) -> float:
    """Harmonic capacitary profile of the unit ball inside the ball of radius R."""
    if R <= 1:
        raise LatticeError("R must exceed 1")
    if d < 3:
        raise LatticeError("relative profile needs d >= 3")
    if x <= 1.0:
        return 1.0
    if x >= R:
        return 0.0
    Rg = R ** (2.0 - d)
    return (x ** (2.0 - d) - Rg) / (1.0 - Rg)


def cap_p_ball(p: float, d: int) -> float:
    """p-capacity of the unit ball: ((p-1)/(d-p))^(1-p) * d * |B_1|."""
    _check_p(p, d)
    return ((p - 1.0) / (d - p)) ** (1.0 - p) * d * ball_volume(d)


def cap_relative_ball(R: float, d: int) -> float:
    """2-capacity of the unit ball relative to the concentric ball of radius R."""
    if R <= 1:
        raise LatticeError("R must exceed 1")
    if d < 3:
        raise LatticeError("relative capacity formula needs d >= 3")
    return ball_volume(d) * d * (d - 2.0) / (1.0 - R ** (2.0 - d))


@dataclass(frozen=True)
class ContinuumBallData:
    """Bundle of continuum unit-ball constants for one (d, p)."""

    dim: int
    p: float
    cap_value: float
    ball_vol: float

    @classmethod
    def make(cls, d: int, p: float) -> "ContinuumBallData":
        return cls(dim=d, p=p, cap_value=cap_p_ball(p, d), ball_vol=ball_volume(d))

    @property
    def scaled_target(self) -> float:
        """|B_1|^((p-d)/d) * cap_p(B_1): the limit of scaled ball capacities."""
        return self.ball_vol ** ((self.p - self.dim) / self.dim) * self.cap_value


def truncation_correction(raw_value: float, truncation_radius: float,
                          N: int, p: float, d: int) -> float:
    """Remove the leading bias of computing a capacity on a truncated domain.

    For a radial configuration of volume N the free-space capacity relates
    to the one with zero boundary data at radius rho by the exact factor
    (1 - (rho/r_eff)^((p-d)/(p-1)))^(p-1), with r_eff the radius of the
    volume-N ball.  For p = 2 this reduces to the familiar 1 - R_eff^(2-d).
    """
    _check_p(p, d)
    r_eff = r_alpha(float(N), d)
    R_eff = truncation_radius / r_eff
    if R_eff <= 1.0:
        raise LatticeError("truncation radius must exceed the effective set radius")
    gamma = (p - d) / (p - 1.0)
    return raw_value * (1.0 - R_eff ** gamma) ** (p - 1.0)


def test_function_tail_fraction(p: float, d: int, m: int) -> float:
    """Relative energy carried beyond radius 2^m * k by the radial profile.

    The profile r^gamma with gamma = (p-d)/(p-1) has tail Dirichlet energy
    beyond radius rho proportional to rho^gamma, so cutting at 2^m times
    the ball radius leaves a fraction (2^m)^gamma of the total.
    """
    _check_p(p, d)
    gamma = (p - d) / (p - 1.0)
    return float(2.0 ** (m * gamma))


def _dyadic_shells_needed(p: float, d: int, rel_tol: float) -> int:
    gamma = (p - d) / (p - 1.0)
    m = 1
    while 2.0 ** (m * gamma) > rel_tol:
        m += 1
    return m


def discretized_test_function(k: float, p: float, d: int,
                              cutoff: float | None = None,
                              tail_tol: float = 1e-3,
                              max_points: float = 3e6) -> LatticeFunction:
    """Sample the radial capacitary profile on the lattice at scale k.

    u(i) = profile(|i|/k), truncated to 0 beyond the cutoff radius with a
    linear taper over the outermost dyadic shell [cutoff/2, cutoff].  When
    no cutoff is given, the dyadic cutoff 2^m * k is chosen so the
    analytic tail fraction drops below `tail_tol`, subject to a support
    budget of `max_points` lattice points; the realized tail fraction is
    available from `test_function_tail_fraction`.
    """
    _check_p(p, d)
    if k <= 0:
        raise LatticeError("k must be positive")
    if cutoff is None:
        m = _dyadic_shells_needed(p, d, tail_tol)
        while m > 1 and (2.0 * 2 ** m * k + 1) ** d > max_points:
            m -= 1
        cutoff = 2.0 ** m * k
    if cutoff <= k:
        raise LatticeError("cutoff must exceed the ball radius k")
    taper_start = max(k, cutoff / 2.0)

    K = int(math.floor(cutoff))
    rng = np.arange(-K, K + 1)
    grids = np.meshgrid(*([rng] * d), indexing="ij")
    rad = np.sqrt(sum(g.astype(np.float64) ** 2 for g in grids))
    gamma = (p - d) / (p - 1.0)
    with np.errstate(divide="ignore"):
        vals = np.where(rad <= k, 1.0, (rad / k) ** gamma)
    # linear taper to zero over the last dyadic shell
    width = cutoff - taper_start
    taper = np.clip((cutoff - rad) / width, 0.0, 1.0)
    vals = vals * taper
    vals[rad > cutoff] = 0.0
    return LatticeFunction((-K,) * d, vals, dim=d)
