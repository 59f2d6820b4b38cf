"""Greedy (inner-scale) optimization of the per-stage Lagrangian cost.

The outer dynamic program only fixes the radial speed of a waiting step
and the end radius of a service; every other action component (circling
rate while waiting; receive position, relay angle, and leg speeds while
serving) affects neither the transition law nor the steady state, so it
is optimized greedily per stage, here.

Two exact reductions shrink the service search from five dimensions to a
2-D receive-position scan:

* each travel leg contributes distance * c(v) with
  c(v) = [(1 - nu*P_avg) + nu*P_mob(v)] / v, so one speed, the minimizer
  of c, is optimal for both legs of every service;
* the relay hover time depends on the relay radius only, so the relay
  angle aligns with the receive angle and the second leg length collapses
  to |r_receive - r_relay|.

Both reductions require the travel and hover cost coefficients to be
positive, which bounds the admissible multiplier range.
"""

import hashlib
import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import accel, kernels
from .comm import ChannelParams
from .geometry import PolarPos
from .grids import SearchGrids, StateGrid
from .opt1d import grid_then_golden
from .power import PowerParams, is_unimodal, min_power_speed, mobility_power


@lru_cache(maxsize=32)
def curve_profile(pw: PowerParams, v_max: float) -> tuple[float, float, bool]:
    """(most efficient speed, power there, curve unimodal?) — cached."""
    v_min, p_min = min_power_speed(pw, v_max)
    return v_min, p_min, is_unimodal(pw, v_max)

TABLE_FORMAT = "uav-relay-tables/1"


class InadmissibleDualError(ValueError):
    """Dual variable out of admissible range: a travel or hover cost
    coefficient is non-positive and the greedy stage problem would favor
    unbounded travel."""


@dataclass(frozen=True)
class LagrangianParams:
    """Stage-cost weights: multiplier nu [s/J], power target [W], step length [s]."""

    nu: float
    p_avg: float
    delta0: float

    def __post_init__(self):
        if self.nu < 0.0:
            raise ValueError("multiplier must be >= 0")
        if not (self.p_avg > 0.0 and self.delta0 > 0.0):
            raise ValueError("power target and step duration must be positive")


@dataclass(frozen=True)
class CommGreedyResult:
    ell_star: float
    q_gu_star: PolarPos
    v1_star: float
    v3_star: float
    theta_ub_star: float
    delta_c: float
    e_c: float


def waiting_theta_star(v_r: float, r_u: float, pw: PowerParams, v_max: float) -> float:
    """Power-minimizing circling rate [rad/s] for a waiting step.

    For a unimodal power curve the total speed should sit at the curve
    minimum when the radial component allows it: theta = 0 once |v_r|
    exceeds the most efficient speed, else the rate that tops the speed
    up to it. At the cell center circling cannot change the speed, so the
    rate is 0 there. Non-unimodal curves fall back to a numeric scan.
    """
    if abs(v_r) > v_max:
        raise ValueError("|v_r| exceeds the speed limit")
    if r_u == 0.0:
        return 0.0
    s = _waiting_speed_star(v_r, pw, v_max)
    return math.sqrt(max(s * s - v_r * v_r, 0.0)) / r_u


def _waiting_speed_star(v_r: float, pw: PowerParams, v_max: float) -> float:
    v_min, _p, unimodal = curve_profile(pw, v_max)
    if unimodal:
        return min(max(v_min, abs(v_r)), v_max)
    s, _ = grid_then_golden(lambda x: mobility_power(x, pw), abs(v_r), v_max,
                            step=max((v_max - abs(v_r)) / 400.0, 1e-6), tol=1e-6)
    return s


def waiting_ell(v_r: float, r_u: float, lp: LagrangianParams, pw: PowerParams,
                v_max: float) -> float:
    """Greedy Lagrangian cost of one waiting step; negative when the
    achievable power sits below the target."""
    if abs(v_r) > v_max:
        raise ValueError("|v_r| exceeds the speed limit")
    speed = abs(v_r) if r_u == 0.0 else _waiting_speed_star(v_r, pw, v_max)
    return lp.nu * (mobility_power(speed, pw) - lp.p_avg) * lp.delta0


def hover_cost_coeff(lp: LagrangianParams, pw: PowerParams) -> float:
    """Cost per second of hovering in the service objective."""
    return (1.0 - lp.nu * lp.p_avg) + lp.nu * mobility_power(0.0, pw)


def check_admissible(lp: LagrangianParams, pw: PowerParams, v_max: float):
    p_min = curve_profile(pw, v_max)[1]
    if 1.0 + lp.nu * (p_min - lp.p_avg) <= 0.0:
        raise InadmissibleDualError(
            f"dual variable out of admissible range: nu={lp.nu} makes the travel "
            f"cost coefficient non-positive (min stage power {p_min:.3f} W, "
            f"target {lp.p_avg:.3f} W)")


def travel_speed_star(lp: LagrangianParams, pw: PowerParams, v_max: float,
                      step: float = 0.5) -> tuple[float, float]:
    """Leg speed minimizing the per-meter travel cost c(v), and c at it.

    Independent of the endpoints, so it is shared by both legs of every
    service at a given multiplier.
    """
    check_admissible(lp, pw, v_max)
    scale = 1.0 - lp.nu * lp.p_avg

    def c(v):
        return (scale + lp.nu * mobility_power(v, pw)) / v

    lo = min(step, v_max / 2.0)
    v_star, c_star = grid_then_golden(c, lo, v_max, step=step, tol=1e-6)
    if c_star <= 0.0:
        raise InadmissibleDualError(
            f"dual variable out of admissible range: per-meter travel cost is "
            f"{c_star} at v={v_star}")
    return v_star, c_star


def nu_cap(p_avg: float, pw: PowerParams, v_max: float, margin: float = 1e-3) -> float:
    """Largest admissible multiplier (up to ``margin``) for a power target.

    Infinite when the target sits below the minimum of the power curve,
    since the travel coefficient then stays positive for every nu.
    """
    p_min = min_power_speed(pw, v_max)[1]
    if p_avg <= p_min:
        return math.inf
    return (1.0 - margin) / (p_avg - p_min)


def relay_hover_times(radii: np.ndarray, ch: ChannelParams) -> np.ndarray:
    """Relay hover time [s] for each candidate end radius."""
    d2 = (ch.h_uav - ch.h_bs) ** 2 + radii ** 2
    return ch.payload_bits / (ch.bandwidth * np.log2(1.0 + ch.gamma_ub / d2))


def receive_hover_time(gu_r, gu_ang, gn_r: float, gn_theta: float,
                       ch: ChannelParams) -> np.ndarray:
    """Receive hover time [s] at positions (gu_r, gu_ang) for one node."""
    ground2 = gu_r ** 2 + gn_r ** 2 - 2.0 * gu_r * gn_r * np.cos(gu_ang - gn_theta)
    d2 = ch.h_uav ** 2 + np.maximum(ground2, 0.0)
    return ch.payload_bits / (ch.bandwidth * np.log2(1.0 + ch.gamma_gu / d2))


def comm_greedy(s: tuple[float, float, float], r_ub: float, lp: LagrangianParams,
                ch: ChannelParams, pw: PowerParams, v_max: float,
                grids: SearchGrids) -> CommGreedyResult:
    """Greedy service cost for state ``s = (r_u, r_g, theta_g)`` and end radius.

    Scans the receive-position grid with the two reductions applied; the
    first grid point attaining the minimum wins.
    """
    if r_ub < 0.0:
        raise ValueError("end radius must be >= 0")
    r_u, r_g, theta_g = s
    v_star, c_star = travel_speed_star(lp, pw, v_max, grids.speed_step)
    h0 = hover_cost_coeff(lp, pw)
    if h0 <= 0.0:
        raise InadmissibleDualError("dual variable out of admissible range: "
                                    "hover cost coefficient is non-positive")
    rr, aa = np.meshgrid(grids.gu_radii, grids.gu_angles, indexing="ij")
    trav = np.sqrt(np.maximum(r_u ** 2 + rr ** 2 - 2.0 * r_u * rr * np.cos(aa), 0.0))
    recv = receive_hover_time(rr, aa, r_g, theta_g, ch)
    hover4 = float(relay_hover_times(np.array([r_ub]), ch)[0])
    dist = trav + np.abs(rr - r_ub)
    obj = c_star * dist + h0 * (recv + hover4)
    flat = int(obj.argmin())
    i, j = np.unravel_index(flat, obj.shape)
    delta_c = dist[i, j] / v_star + recv[i, j] + hover4
    e_c = (dist[i, j] / v_star * mobility_power(v_star, pw)
           + (recv[i, j] + hover4) * mobility_power(0.0, pw))
    return CommGreedyResult(
        ell_star=float(obj[i, j]),
        q_gu_star=PolarPos(float(rr[i, j]), float(aa[i, j])),
        v1_star=v_star, v3_star=v_star,
        theta_ub_star=float(aa[i, j]),
        delta_c=float(delta_c), e_c=float(e_c),
    )


@dataclass(frozen=True, eq=False)
class GreedyTables:
    """Dense greedy costs over the discrete state grid at one multiplier."""

    nu: float
    v_star: float             # shared leg speed
    c_star: float             # per-meter travel cost at v_star
    hover_coeff: float
    p_leg: float              # power at v_star
    p_hover: float
    wait_ell: np.ndarray      # (n_radii, n_speeds)
    wait_theta: np.ndarray    # (n_radii, n_speeds)
    wait_power: np.ndarray    # (n_radii, n_speeds)
    comm_ell: np.ndarray      # (n_radii, n_gn, n_radii)
    comm_delta: np.ndarray
    comm_energy: np.ndarray
    comm_r_gu: np.ndarray
    comm_psi_gu: np.ndarray


def build_tables(grid: StateGrid, lp: LagrangianParams, ch: ChannelParams,
                 pw: PowerParams, grids: SearchGrids,
                 cache_dir: str | None = None, cache_key: str | None = None,
                 backend: str | None = None) -> GreedyTables:
    """Tabulate greedy costs for every discrete state and outer choice.

    With ``cache_dir`` set, tables are stored per (cache_key, backend)
    and a hit is bit-identical to recomputation.
    """
    if cache_dir is not None:
        path = _cache_path(cache_dir, cache_key, backend)
        if os.path.exists(path):
            return _load_tables(path)
    tables = _compute_tables(grid, lp, ch, pw, grids, backend)
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        _save_tables(_cache_path(cache_dir, cache_key, backend), tables)
    return tables


def _compute_tables(grid, lp, ch, pw, grids, backend=None):
    v_star, c_star = travel_speed_star(lp, pw, grid.v_max, grids.speed_step)
    h0 = hover_cost_coeff(lp, pw)
    if h0 <= 0.0:
        raise InadmissibleDualError("dual variable out of admissible range: "
                                    "hover cost coefficient is non-positive")
    p_leg = mobility_power(v_star, pw)
    p_hover = mobility_power(0.0, pw)

    n_r, n_g, n_k = grid.n_radii, grid.n_gn, grid.n_speeds
    wait_ell = np.empty((n_r, n_k))
    wait_theta = np.empty((n_r, n_k))
    wait_power = np.empty((n_r, n_k))
    for i in range(n_r):
        for k in range(n_k):
            v_r = grid.v_r_grid[k]
            theta = waiting_theta_star(v_r, grid.radii[i], pw, grid.v_max)
            speed = math.sqrt(v_r * v_r + (grid.radii[i] * theta) ** 2)
            p = mobility_power(speed, pw)
            wait_theta[i, k] = theta
            wait_power[i, k] = p
            wait_ell[i, k] = lp.nu * (p - lp.p_avg) * grid.delta0

    n_bins = grids.gu_radii.size
    n_ang = grids.gu_angles.size
    rr, aa = np.meshgrid(grids.gu_radii, grids.gu_angles, indexing="ij")
    grid_r = rr.ravel()
    grid_ang = aa.ravel()
    trav = np.empty((n_r, grid_r.size))
    for i in range(n_r):
        r_u = grid.radii[i]
        trav[i] = np.sqrt(np.maximum(
            r_u ** 2 + grid_r ** 2 - 2.0 * r_u * grid_r * np.cos(grid_ang), 0.0))
    recv = np.empty((n_g, grid_r.size))
    for g in range(n_g):
        recv[g] = receive_hover_time(grid_r, grid_ang, grid.gn_r[g], grid.gn_theta[g], ch)
    hover4 = relay_hover_times(grid.radii, ch)

    ell, delta, energy, r_gu, psi_gu = kernels.comm_tables(
        trav, recv, grid_r, grid_ang, n_bins, n_ang, grid.radii, hover4,
        c_star, h0, v_star, p_leg, p_hover, force_backend=backend)

    return GreedyTables(
        nu=lp.nu, v_star=v_star, c_star=c_star, hover_coeff=h0,
        p_leg=float(p_leg), p_hover=float(p_hover),
        wait_ell=wait_ell, wait_theta=wait_theta, wait_power=wait_power,
        comm_ell=ell, comm_delta=delta, comm_energy=energy,
        comm_r_gu=r_gu, comm_psi_gu=psi_gu)


def table_cache_key(config_digest: str, nu: float) -> str:
    raw = f"{TABLE_FORMAT}|{config_digest}|{nu!r}"
    return hashlib.sha256(raw.encode()).hexdigest()[:32]


def _cache_path(cache_dir, cache_key, backend):
    if cache_key is None:
        raise ValueError("cache_dir requires cache_key")
    b = backend or accel.backend_name()
    return os.path.join(cache_dir, f"tables-{cache_key}-{b}.npz")


_ARRAY_FIELDS = ("wait_ell", "wait_theta", "wait_power", "comm_ell", "comm_delta",
                 "comm_energy", "comm_r_gu", "comm_psi_gu")
_SCALAR_FIELDS = ("nu", "v_star", "c_star", "hover_coeff", "p_leg", "p_hover")


def _save_tables(path, tables: GreedyTables):
    payload = {name: getattr(tables, name) for name in _ARRAY_FIELDS}
    payload["scalars"] = np.array([getattr(tables, name) for name in _SCALAR_FIELDS])
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        np.savez(fh, **payload)
    os.replace(tmp, path)


def _load_tables(path) -> GreedyTables:
    with np.load(path) as data:
        scalars = dict(zip(_SCALAR_FIELDS, data["scalars"]))
        arrays = {name: data[name] for name in _ARRAY_FIELDS}
    return GreedyTables(**{k: float(v) for k, v in scalars.items()}, **arrays)
