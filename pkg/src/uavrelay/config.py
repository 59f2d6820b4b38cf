"""Scenario configuration: one INI file holds every constant of a run.

The shipped defaults describe a 1600 m cell with 1 MHz links at 40 dB
one-meter SNR, a 120 m UAV relaying to a 60 m BS antenna, 1 Mbit
payloads, and the small-UAV propulsion coefficients. dB values are
converted to linear once here; everything downstream is linear.
"""

import configparser
import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .comm import ChannelParams
from .power import PowerParams, beta_from_airframe


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending key."""


# Propulsion coefficients for a ~2 kg class rotary-wing UAV (hover at
# ~168 W, most efficient near 10 m/s).
POWER_SMALL_UAV = PowerParams(
    p0=79.8563, pi=88.6279, u_tip=120.0, v0=4.03,
    beta=beta_from_airframe(0.6, 1.225, 0.05, 0.503),
)

# Heavier platform (hover at ~1.37 kW, most efficient near 21 m/s); used
# for the informational high-power checks.
POWER_LARGE_UAV = PowerParams(
    p0=580.65, pi=790.6715, u_tip=200.0, v0=7.2,
    beta=beta_from_airframe(0.3, 1.225, 0.05, 0.79),
)


@dataclass(frozen=True)
class SystemConfig:
    # cell
    cell_radius: float = 1600.0
    arrival_rate: float = 2.693e-9          # requests / (s * m^2)
    # channel
    bandwidth: float = 1.0e6
    gamma_gu_db: float = 40.0
    gamma_ub_db: float = 40.0
    uav_height: float = 120.0
    bs_height: float = 60.0
    payload_bits: float = 1.0e6
    # propulsion
    power: PowerParams = field(default_factory=lambda: POWER_SMALL_UAV)
    v_max: float = 55.0
    # state/action discretization
    n_radii: int = 10
    gn_arity: int = 3                       # angular positions per ring step
    n_radial_speeds: int = 13
    stay_probability: float = 0.93          # per-step no-arrival probability
    step_seconds: Optional[float] = None    # overrides stay_probability when set
    gn_grid_variant: str = "standard"       # standard | plus-one
    # receive-position search grid
    gu_radii: int = 60
    gu_angles: int = 72
    gu_radius_factor: float = 1.0
    speed_step: float = 0.5
    # dynamic programming
    rvi_tol: float = 1e-9
    rvi_max_iter: int = 200_000
    # dual optimization
    target_power: float = 1000.0
    bracket_points: int = 20
    dual_tol: float = 1e-3                  # relative width for the multiplier search
    feasibility_margin: float = 1e-3
    dual_method: str = "bracket"            # bracket | subgradient
    # simulation
    sim_batches: int = 32
    burn_in_cycles: int = 50

    def __post_init__(self):
        _validate(self)

    # -- derived quantities -------------------------------------------------

    @property
    def gamma_gu(self) -> float:
        return 10.0 ** (self.gamma_gu_db / 10.0)

    @property
    def gamma_ub(self) -> float:
        return 10.0 ** (self.gamma_ub_db / 10.0)

    @property
    def total_arrival_rate(self) -> float:
        """Cell-wide request rate [1/s]."""
        return math.pi * self.cell_radius ** 2 * self.arrival_rate

    @property
    def delta0(self) -> float:
        """Duration of one waiting step [s]."""
        if self.step_seconds is not None:
            return self.step_seconds
        lam = self.total_arrival_rate
        if lam <= 0.0:
            raise ConfigError("[cell] arrival_rate_per_m2_s: must be positive unless "
                              "[grid] step_seconds is given")
        return -math.log(self.stay_probability) / lam

    @property
    def p_stay(self) -> float:
        """Probability that a waiting step sees no arrival."""
        if self.step_seconds is not None:
            return math.exp(-self.total_arrival_rate * self.step_seconds)
        return self.stay_probability

    def channel(self) -> ChannelParams:
        return ChannelParams(
            bandwidth=self.bandwidth, gamma_gu=self.gamma_gu, gamma_ub=self.gamma_ub,
            h_uav=self.uav_height, h_bs=self.bs_height, payload_bits=self.payload_bits,
        )

    def with_target_power(self, p_avg: float) -> "SystemConfig":
        return replace(self, target_power=p_avg)

    def with_payload(self, bits: float) -> "SystemConfig":
        return replace(self, payload_bits=bits)

    def to_dict(self) -> dict:
        d = {
            "cell_radius": self.cell_radius, "arrival_rate": self.arrival_rate,
            "bandwidth": self.bandwidth, "gamma_gu_db": self.gamma_gu_db,
            "gamma_ub_db": self.gamma_ub_db, "uav_height": self.uav_height,
            "bs_height": self.bs_height, "payload_bits": self.payload_bits,
            "power": {"p0": self.power.p0, "pi": self.power.pi, "u_tip": self.power.u_tip,
                      "v0": self.power.v0, "beta": self.power.beta},
            "v_max": self.v_max, "n_radii": self.n_radii, "gn_arity": self.gn_arity,
            "n_radial_speeds": self.n_radial_speeds,
            "stay_probability": self.stay_probability, "step_seconds": self.step_seconds,
            "gn_grid_variant": self.gn_grid_variant,
            "gu_radii": self.gu_radii, "gu_angles": self.gu_angles,
            "gu_radius_factor": self.gu_radius_factor, "speed_step": self.speed_step,
            "rvi_tol": self.rvi_tol, "rvi_max_iter": self.rvi_max_iter,
            "target_power": self.target_power, "bracket_points": self.bracket_points,
            "dual_tol": self.dual_tol, "feasibility_margin": self.feasibility_margin,
            "dual_method": self.dual_method, "sim_batches": self.sim_batches,
            "burn_in_cycles": self.burn_in_cycles,
        }
        return d

    def digest(self) -> str:
        raw = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(raw.encode()).hexdigest()


def config_from_dict(d: dict) -> SystemConfig:
    p = d["power"]
    power = PowerParams(p0=p["p0"], pi=p["pi"], u_tip=p["u_tip"], v0=p["v0"], beta=p["beta"])
    kwargs = {k: v for k, v in d.items() if k != "power"}
    return SystemConfig(power=power, **kwargs)


def _validate(cfg: SystemConfig):
    def positive(name, value):
        if not (isinstance(value, (int, float)) and value > 0):
            raise ConfigError(f"{name}: must be positive, got {value!r}")

    positive("[cell] radius_m", cfg.cell_radius)
    if cfg.arrival_rate < 0:
        raise ConfigError(f"[cell] arrival_rate_per_m2_s: must be >= 0, got {cfg.arrival_rate!r}")
    positive("[channel] bandwidth_hz", cfg.bandwidth)
    positive("[channel] uav_height_m", cfg.uav_height)
    positive("[channel] bs_height_m", cfg.bs_height)
    if cfg.uav_height <= cfg.bs_height:
        raise ConfigError("[channel] uav_height_m: must exceed bs_height_m")
    positive("[channel] payload_bits", cfg.payload_bits)
    positive("[power] max_speed_m_s", cfg.v_max)
    if cfg.n_radii < 2:
        raise ConfigError(f"[grid] n_radii: must be >= 2, got {cfg.n_radii}")
    if cfg.gn_arity < 1:
        raise ConfigError(f"[grid] gn_angles_per_ring: must be >= 1, got {cfg.gn_arity}")
    if cfg.n_radial_speeds < 1 or cfg.n_radial_speeds % 2 == 0:
        raise ConfigError(f"[grid] n_radial_speeds: must be odd so 0 is a grid speed, "
                          f"got {cfg.n_radial_speeds}")
    if cfg.step_seconds is None and not (0.0 < cfg.stay_probability < 1.0):
        raise ConfigError(f"[grid] stay_probability: must be in (0, 1), "
                          f"got {cfg.stay_probability!r}")
    if cfg.step_seconds is not None and not cfg.step_seconds > 0:
        raise ConfigError(f"[grid] step_seconds: must be positive, got {cfg.step_seconds!r}")
    if cfg.gn_grid_variant not in ("standard", "plus-one"):
        raise ConfigError(f"[grid] gn_grid_variant: unknown value {cfg.gn_grid_variant!r}")
    for name, value in (("[search] gu_radii", cfg.gu_radii), ("[search] gu_angles", cfg.gu_angles)):
        if value < 2:
            raise ConfigError(f"{name}: must be >= 2, got {value}")
    positive("[search] gu_radius_factor", cfg.gu_radius_factor)
    positive("[search] speed_step_m_s", cfg.speed_step)
    positive("[solver] rvi_tol", cfg.rvi_tol)
    positive("[solver] rvi_max_iter", cfg.rvi_max_iter)
    positive("[dual] target_power_w", cfg.target_power)
    if cfg.bracket_points < 4:
        raise ConfigError(f"[dual] bracket_points: must be >= 4, got {cfg.bracket_points}")
    positive("[dual] dual_tol", cfg.dual_tol)
    positive("[dual] feasibility_margin", cfg.feasibility_margin)
    if cfg.dual_method not in ("bracket", "subgradient"):
        raise ConfigError(f"[dual] method: unknown value {cfg.dual_method!r}")
    if cfg.sim_batches < 2:
        raise ConfigError(f"[sim] batches: must be >= 2, got {cfg.sim_batches}")
    if cfg.burn_in_cycles < 0:
        raise ConfigError(f"[sim] burn_in_cycles: must be >= 0, got {cfg.burn_in_cycles}")


# (section, key) -> (attribute, parser)
_SCHEMA = {
    ("cell", "radius_m"): ("cell_radius", float),
    ("cell", "arrival_rate_per_m2_s"): ("arrival_rate", float),
    ("channel", "bandwidth_hz"): ("bandwidth", float),
    ("channel", "gn_uav_snr_1m_db"): ("gamma_gu_db", float),
    ("channel", "uav_bs_snr_1m_db"): ("gamma_ub_db", float),
    ("channel", "uav_height_m"): ("uav_height", float),
    ("channel", "bs_height_m"): ("bs_height", float),
    ("channel", "payload_bits"): ("payload_bits", float),
    ("power", "max_speed_m_s"): ("v_max", float),
    ("grid", "n_radii"): ("n_radii", int),
    ("grid", "gn_angles_per_ring"): ("gn_arity", int),
    ("grid", "n_radial_speeds"): ("n_radial_speeds", int),
    ("grid", "stay_probability"): ("stay_probability", float),
    ("grid", "step_seconds"): ("step_seconds", float),
    ("grid", "gn_grid_variant"): ("gn_grid_variant", str),
    ("search", "gu_radii"): ("gu_radii", int),
    ("search", "gu_angles"): ("gu_angles", int),
    ("search", "gu_radius_factor"): ("gu_radius_factor", float),
    ("search", "speed_step_m_s"): ("speed_step", float),
    ("solver", "rvi_tol"): ("rvi_tol", float),
    ("solver", "rvi_max_iter"): ("rvi_max_iter", int),
    ("dual", "target_power_w"): ("target_power", float),
    ("dual", "bracket_points"): ("bracket_points", int),
    ("dual", "dual_tol"): ("dual_tol", float),
    ("dual", "feasibility_margin"): ("feasibility_margin", float),
    ("dual", "method"): ("dual_method", str),
    ("sim", "batches"): ("sim_batches", int),
    ("sim", "burn_in_cycles"): ("burn_in_cycles", int),
}

_POWER_KEYS = ("blade_profile_w", "induced_w", "tip_speed_m_s", "hover_induced_m_s")
_BETA_KEY = "fuselage_drag_kg_m"
_AIRFRAME_KEYS = ("fuselage_drag_ratio", "air_density_kg_m3", "rotor_solidity", "rotor_disc_m2")


def load_config(path: str) -> SystemConfig:
    """Read an INI scenario file; unknown or malformed keys are an error."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc

    kwargs = {}
    power_raw = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if section == "power" and key in _POWER_KEYS + (_BETA_KEY,) + _AIRFRAME_KEYS:
                power_raw[key] = _parse(section, key, raw, float)
                continue
            try:
                attr, typ = _SCHEMA[(section, key)]
            except KeyError:
                raise ConfigError(f"[{section}] {key}: unknown key") from None
            kwargs[attr] = _parse(section, key, raw, typ)

    if power_raw:
        missing = [k for k in _POWER_KEYS if k not in power_raw]
        if missing:
            raise ConfigError(f"[power] missing keys: {', '.join(missing)}")
        if _BETA_KEY in power_raw:
            beta = power_raw[_BETA_KEY]
            if any(k in power_raw for k in _AIRFRAME_KEYS):
                raise ConfigError(f"[power] give either {_BETA_KEY} or the four "
                                  "airframe factors, not both")
        else:
            missing = [k for k in _AIRFRAME_KEYS if k not in power_raw]
            if missing:
                raise ConfigError(f"[power] missing keys: {', '.join(missing)} "
                                  f"(or give {_BETA_KEY} directly)")
            beta = beta_from_airframe(*(power_raw[k] for k in _AIRFRAME_KEYS))
        try:
            kwargs["power"] = PowerParams(
                p0=power_raw["blade_profile_w"], pi=power_raw["induced_w"],
                u_tip=power_raw["tip_speed_m_s"], v0=power_raw["hover_induced_m_s"],
                beta=beta)
        except ValueError as exc:
            raise ConfigError(f"[power] {exc}") from None

    try:
        return SystemConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _parse(section, key, raw, typ):
    try:
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        return raw.strip()
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} as {typ.__name__}") from None


def save_config(cfg: SystemConfig, path: str):
    """Write ``cfg`` as an INI file that ``load_config`` reads back identically."""
    parser = configparser.ConfigParser()
    for (section, key), (attr, _typ) in _SCHEMA.items():
        value = getattr(cfg, attr)
        if value is None:
            continue
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, repr(value) if isinstance(value, float) else str(value))
    if not parser.has_section("power"):
        parser.add_section("power")
    pw = cfg.power
    for key, value in (("blade_profile_w", pw.p0), ("induced_w", pw.pi),
                       ("tip_speed_m_s", pw.u_tip), ("hover_induced_m_s", pw.v0),
                       (_BETA_KEY, pw.beta)):
        parser.set("power", key, repr(value))
    with open(path, "w") as fh:
        parser.write(fh)
