"""Cost model of the four-operation decode-and-forward service procedure.

Serving one request means: (1) fly to a receive position, (2) hover while
the ground node uploads the payload, (3) fly to a relay position, (4)
hover while forwarding to the base station. Transmission only happens
while hovering, and each fixed-rate link follows a log2(1 + snr/d^2)
rate law referenced at one meter.

All positions here live in the frame where the UAV angular coordinate is
zero; only the node angle relative to the UAV matters.
"""

import math
from dataclasses import dataclass

from .geometry import PolarPos, chord_distance
from .power import PowerParams, mobility_power


@dataclass(frozen=True)
class ChannelParams:
    """Link and payload constants.

    bandwidth: channel bandwidth [Hz]
    gamma_gu: node->UAV SNR at 1 m (linear)
    gamma_ub: UAV->BS SNR at 1 m (linear)
    h_uav: UAV flight height [m]
    h_bs: BS antenna height [m]
    payload_bits: request payload [bits]
    """

    bandwidth: float
    gamma_gu: float
    gamma_ub: float
    h_uav: float
    h_bs: float
    payload_bits: float

    def __post_init__(self):
        for name in ("bandwidth", "gamma_gu", "gamma_ub", "h_uav", "h_bs", "payload_bits"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"channel parameter {name} must be positive")
        if not self.h_uav > self.h_bs:
            raise ValueError("UAV height must exceed BS antenna height")


@dataclass(frozen=True)
class CommAction:
    """Free components of one service trajectory."""

    q_gu: PolarPos   # receive position
    v1: float        # speed on the first leg [m/s]
    q_ub: PolarPos   # relay position
    v3: float        # speed on the second leg [m/s]


@dataclass(frozen=True)
class PhaseCost:
    """Per-operation durations plus phase totals."""

    d1: float
    d2: float
    d3: float
    d4: float
    delta_c: float   # total delay [s]
    e_c: float       # total energy [J]


def rate_gu(d_gu: float, ch: ChannelParams) -> float:
    """Uplink rate [bit/s] of the node->UAV link at 3-D distance ``d_gu``."""
    if not d_gu > 0.0:
        raise ValueError("distance must be positive")
    return ch.bandwidth * math.log2(1.0 + ch.gamma_gu / (d_gu * d_gu))


def rate_ub(d_ub: float, ch: ChannelParams) -> float:
    """Rate [bit/s] of the UAV->BS link at 3-D distance ``d_ub``."""
    if not d_ub > 0.0:
        raise ValueError("distance must be positive")
    return ch.bandwidth * math.log2(1.0 + ch.gamma_ub / (d_ub * d_ub))


def gu_distance(q_gu: PolarPos, gn: tuple[float, float], ch: ChannelParams) -> float:
    """3-D distance between a hovering UAV at ``q_gu`` and the node ``gn``.

    ``gn`` is (radius, angle) in the UAV-relative frame.
    """
    ground = chord_distance(q_gu, PolarPos(gn[0], gn[1]))
    return math.hypot(ch.h_uav, ground)


def ub_distance(r_ub: float, ch: ChannelParams) -> float:
    """3-D distance between a UAV at ground radius ``r_ub`` and the BS antenna."""
    if r_ub < 0.0:
        raise ValueError("radius must be >= 0")
    return math.hypot(ch.h_uav - ch.h_bs, r_ub)


def _leg_time(dist: float, v: float, v_max: float, which: str) -> float:
    # zero-length legs cost nothing regardless of the nominal speed, so the
    # 0/0 quotient is never formed
    if dist == 0.0:
        return 0.0
    if not (0.0 < v <= v_max):
        raise ValueError(f"{which} must be in (0, v_max] for a non-degenerate leg")
    return dist / v


def phase_cost(r_u: float, gn: tuple[float, float], action: CommAction,
               ch: ChannelParams, pw: PowerParams, v_max: float) -> PhaseCost:
    """Delay and energy of serving ``gn`` from UAV radius ``r_u`` with ``action``."""
    q_u = PolarPos(r_u, 0.0)
    d1 = _leg_time(chord_distance(q_u, action.q_gu), action.v1, v_max, "v1")
    d2 = ch.payload_bits / rate_gu(gu_distance(action.q_gu, gn, ch), ch)
    d3 = _leg_time(chord_distance(action.q_gu, action.q_ub), action.v3, v_max, "v3")
    d4 = ch.payload_bits / rate_ub(ub_distance(action.q_ub.r, ch), ch)
    p_hover = mobility_power(0.0, pw)
    e_c = (d1 * (mobility_power(action.v1, pw) if d1 > 0.0 else 0.0)
           + d3 * (mobility_power(action.v3, pw) if d3 > 0.0 else 0.0)
           + (d2 + d4) * p_hover)
    return PhaseCost(d1, d2, d3, d4, d1 + d2 + d3 + d4, e_c)
