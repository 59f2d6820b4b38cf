"""State and action discretization.

The UAV radius axis carries ``n_radii`` equispaced points from 0 to the
cell radius; ground-node positions sit on the same rings, with the node
count per ring growing linearly outward so equal node weights track the
uniform-over-area request law; radial speeds are equispaced and include
zero. The waiting-step duration is backed out of the configured per-step
no-arrival probability.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig


@dataclass(frozen=True, eq=False)
class StateGrid:
    radii: np.ndarray        # shared UAV / ring radius grid, radii[0] == 0
    gn_r: np.ndarray         # ground-node radius per node
    gn_theta: np.ndarray     # ground-node angle per node
    gn_weights: np.ndarray   # node probabilities (equal, sum to 1)
    v_r_grid: np.ndarray     # radial speed actions
    delta0: float            # waiting-step duration [s]
    p_stay: float            # per-step no-arrival probability
    v_max: float

    def __post_init__(self):
        r = self.radii
        if r.ndim != 1 or r.size < 1 or r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise ValueError("radii must be ascending and start at 0")
        if not math.isclose(float(self.gn_weights.sum()), 1.0, rel_tol=1e-12):
            raise ValueError("node weights must sum to 1")
        if 0.0 not in self.v_r_grid:
            raise ValueError("radial speed grid must contain 0")

    @property
    def n_radii(self) -> int:
        return self.radii.size

    @property
    def n_gn(self) -> int:
        return self.gn_r.size

    @property
    def n_speeds(self) -> int:
        return self.v_r_grid.size

    @property
    def cell_radius(self) -> float:
        return float(self.radii[-1])

    @property
    def spacing(self) -> float:
        return float(self.radii[1] - self.radii[0]) if self.n_radii > 1 else 1.0


def build_grid(cfg: SystemConfig) -> StateGrid:
    """Discretize a scenario into a :class:`StateGrid`."""
    n, m = cfg.n_radii, cfg.gn_arity
    radii = np.linspace(0.0, cfg.cell_radius, n)
    gn_r = [0.0]
    gn_theta = [0.0]
    extra = 1 if cfg.gn_grid_variant == "plus-one" else 0
    for j in range(1, n):
        count = j * m + extra
        for k in range(count):
            gn_r.append(radii[j])
            gn_theta.append(2.0 * math.pi * k / count)
    gn_r = np.asarray(gn_r)
    gn_theta = np.asarray(gn_theta)
    weights = np.full(gn_r.size, 1.0 / gn_r.size)
    v_r = np.linspace(-cfg.v_max, cfg.v_max, cfg.n_radial_speeds)
    v_r[cfg.n_radial_speeds // 2] = 0.0  # exact zero at the center point
    return StateGrid(radii=radii, gn_r=gn_r, gn_theta=gn_theta, gn_weights=weights,
                     v_r_grid=v_r, delta0=cfg.delta0, p_stay=cfg.p_stay, v_max=cfg.v_max)


@dataclass(frozen=True, eq=False)
class SearchGrids:
    """Receive-position and leg-speed search grids for the greedy stage."""

    gu_radii: np.ndarray
    gu_angles: np.ndarray
    speed_step: float


def search_grids_from_config(cfg: SystemConfig) -> SearchGrids:
    r = np.linspace(0.0, cfg.cell_radius * cfg.gu_radius_factor, cfg.gu_radii)
    ang = np.linspace(0.0, 2.0 * math.pi, cfg.gu_angles, endpoint=False)
    return SearchGrids(gu_radii=r, gu_angles=ang, speed_step=cfg.speed_step)


def next_radius_split(grid: StateGrid, r_idx: int, v_r: float) -> tuple[int, int, float]:
    """Split a displaced radius onto adjacent grid points.

    Returns (j_lo, j_hi, w_hi): the displaced radius, clamped to the cell,
    lands on ``j_hi`` with probability ``w_hi`` and on ``j_lo`` otherwise.
    """
    r_new = min(max(grid.radii[r_idx] + v_r * grid.delta0, 0.0), grid.cell_radius)
    if grid.n_radii == 1:
        return 0, 0, 0.0
    j_lo = int(np.clip(np.searchsorted(grid.radii, r_new) - 1, 0, grid.n_radii - 2))
    w_hi = float(np.clip((r_new - grid.radii[j_lo]) / grid.spacing, 0.0, 1.0))
    return j_lo, j_lo + 1, w_hi
