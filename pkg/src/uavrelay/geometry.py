"""Polar-coordinate arithmetic on the ground plane.

Positions are (radius, angle) pairs with the cell center as origin. All
angles are kept normalized to [0, 2*pi); radius upper bounds are a caller
concern (the UAV radius space is unbounded, the cell bound applies to
ground nodes only).
"""

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Reduce an angle to the canonical interval [0, 2*pi)."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    out = math.fmod(theta, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    # fmod can round back up to 2*pi for tiny negative inputs
    if out >= TWO_PI:
        out -= TWO_PI
    return out


@dataclass(frozen=True)
class PolarPos:
    """Ground-plane position: radius in meters, angle in radians."""

    r: float
    psi: float

    def __post_init__(self):
        if not (self.r >= 0.0):
            raise ValueError(f"radius must be >= 0, got {self.r!r}")
        object.__setattr__(self, "psi", normalize_angle(self.psi))


def chord_distance(p1: PolarPos, p2: PolarPos) -> float:
    """Straight-line ground distance between two polar positions."""
    sq = p1.r * p1.r + p2.r * p2.r - 2.0 * p1.r * p2.r * math.cos(p1.psi - p2.psi)
    return math.sqrt(max(sq, 0.0))


def relative_state(q_u: PolarPos, q_g: PolarPos) -> tuple[float, float, float]:
    """Express a UAV/ground-node pair as (r_u, r_g, theta_g).

    theta_g is the node angle relative to the UAV angle; rotating both
    inputs by the same amount leaves the result unchanged.
    """
    return q_u.r, q_g.r, normalize_angle(q_g.psi - q_u.psi)


def sample_request(rng: np.random.Generator, a: float) -> PolarPos:
    """Draw a request location uniformly over the disc of radius ``a``.

    The radius follows density 2r/a^2 (inverse CDF r = a*sqrt(u)), the
    angle is uniform on [0, 2*pi).
    """
    if not a > 0.0:
        raise ValueError(f"cell radius must be positive, got {a!r}")
    u = rng.random()
    return PolarPos(a * math.sqrt(u), rng.random() * TWO_PI)
