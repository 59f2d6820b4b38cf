"""Rotary-wing forward-flight propulsion power.

The power curve has three parts: blade profile power (grows with V^2),
induced power (falls off with V), and fuselage drag (grows with V^3). It
is non-convex and typically unimodal with a minimum at a strictly
positive speed: hovering is not the most power-efficient operating point.
"""

from dataclasses import dataclass

import numpy as np

from .opt1d import grid_then_golden


@dataclass(frozen=True)
class PowerParams:
    """Coefficients of the propulsion power curve.

    p0: blade-profile power at hover [W]
    pi: induced power at hover [W]
    u_tip: rotor blade tip speed [m/s]
    v0: mean rotor induced velocity while hovering [m/s]
    beta: fuselage drag coefficient, d0*rho*s*A/2 [kg/m]
    """

    p0: float
    pi: float
    u_tip: float
    v0: float
    beta: float

    def __post_init__(self):
        for name in ("p0", "pi", "u_tip", "v0", "beta"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"power parameter {name} must be positive")


def beta_from_airframe(drag_ratio: float, air_density: float, rotor_solidity: float,
                       rotor_disc_area: float) -> float:
    """Fuselage drag coefficient from its four physical factors."""
    return 0.5 * drag_ratio * air_density * rotor_solidity * rotor_disc_area


def mobility_power(v, params: PowerParams):
    """Propulsion power [W] at forward speed ``v`` [m/s] (scalar or array).

    The induced term sqrt(sqrt(1+y^2) - y) with y = v^2/(2 v0^2) is
    evaluated as sqrt(1/(sqrt(1+y^2) + y)) to avoid cancellation at high
    speed.
    """
    v = np.asarray(v, dtype=float)
    if np.any(v < 0.0):
        raise ValueError("speed must be >= 0")
    y = v * v / (2.0 * params.v0 * params.v0)
    induced = np.sqrt(1.0 / (np.sqrt(1.0 + y * y) + y))
    out = (params.p0 * (1.0 + 3.0 * v * v / (params.u_tip * params.u_tip))
           + params.pi * induced
           + params.beta * v * v * v)
    return float(out) if out.ndim == 0 else out


def min_power_speed(params: PowerParams, v_max: float) -> tuple[float, float]:
    """Speed in [0, v_max] minimizing the power curve, and the power there.

    Coarse 0.05 m/s scan bracketing a golden-section refine; the curve is
    non-convex so a plain local method could stall on the wrong side of
    the induced-power knee.
    """
    if not v_max > 0.0:
        raise ValueError("v_max must be positive")
    f = lambda v: mobility_power(v, params)
    v_min, p_min = grid_then_golden(f, 0.0, v_max, step=0.05, tol=1e-4)
    return v_min, p_min


def is_unimodal(params: PowerParams, v_max: float, step: float = 0.05) -> bool:
    """True when the curve decreases then increases on a ``step`` grid."""
    v = np.arange(0.0, v_max + step / 2, step)
    d = np.diff(mobility_power(v, params))
    falling = True
    for x in d:
        if falling:
            if x > 0.0:
                falling = False
        elif x < 0.0:
            return False
    return True
