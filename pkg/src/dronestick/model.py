"""Shared domain types for the flying-joystick simulator.

Units are SI everywhere: meters, seconds, radians, newtons, world z axis
up. No degrees anywhere. All types are immutable values; constructors
reject invariant violations with an error naming the offending field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Tuple

Vec3 = Tuple[float, float, float]


class ConfigError(ValueError):
    """A configuration or state invariant was violated."""


def require_finite(name: str, value: Any) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return value


def require_vec3(name: str, value: Any) -> tuple[float, float, float]:
    try:
        vec = tuple(float(c) for c in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a 3-vector of numbers") from exc
    if len(vec) != 3:
        raise ConfigError(f"{name} must have exactly 3 components, got {len(vec)}")
    if not all(math.isfinite(c) for c in vec):
        raise ConfigError(f"{name} must be finite, got {vec!r}")
    return vec


class Mode(str, Enum):
    """Mission mode of the whole system."""

    DOCKED = "Docked"
    DEPLOYING = "Deploying"
    ACTIVE = "Active"
    EMERGENCY = "Emergency"
    LANDED = "Landed"


# Legal transitions (self-loops are always allowed). Emergency is reachable
# from Deploying as well as Active: the stop must work during ascent.
LEGAL_MODE_TRANSITIONS = {
    (Mode.DOCKED, Mode.DEPLOYING),
    (Mode.DEPLOYING, Mode.ACTIVE),
    (Mode.DEPLOYING, Mode.EMERGENCY),
    (Mode.ACTIVE, Mode.EMERGENCY),
    (Mode.EMERGENCY, Mode.LANDED),
}


def mode_transition_legal(old: Mode, new: Mode) -> bool:
    return old is new or (old, new) in LEGAL_MODE_TRANSITIONS


@dataclass(frozen=True)
class LeaderState:
    """Pose and rates of the leader quadrotor in the world frame."""

    position: tuple[float, float, float]
    velocity: tuple[float, float, float]
    pitch: float
    roll: float
    yaw: float
    yaw_rate: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", require_vec3("position", self.position))
        object.__setattr__(self, "velocity", require_vec3("velocity", self.velocity))
        object.__setattr__(self, "pitch", require_finite("pitch", self.pitch))
        object.__setattr__(self, "roll", require_finite("roll", self.roll))
        object.__setattr__(self, "yaw", require_finite("yaw", self.yaw))
        object.__setattr__(self, "yaw_rate", require_finite("yaw_rate", self.yaw_rate))
        half_pi = math.pi / 2
        if not -half_pi < self.pitch < half_pi:
            raise ConfigError(f"pitch out of range (-pi/2, pi/2): {self.pitch}")
        if not -half_pi < self.roll < half_pi:
            raise ConfigError(f"roll out of range (-pi/2, pi/2): {self.roll}")
        if not -math.pi <= self.yaw < math.pi:
            raise ConfigError(f"yaw out of range [-pi, pi): {self.yaw}")

    def to_dict(self) -> dict:
        return {
            "pos": list(self.position),
            "vel": list(self.velocity),
            "pitch": self.pitch,
            "roll": self.roll,
            "yaw": self.yaw,
            "yaw_rate": self.yaw_rate,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "LeaderState":
        return cls(
            position=tuple(d["pos"]),
            velocity=tuple(d["vel"]),
            pitch=d["pitch"],
            roll=d["roll"],
            yaw=d["yaw"],
            yaw_rate=d["yaw_rate"],
        )


@dataclass(frozen=True)
class JoystickConfig:
    """Gains, setpoints and deadzone limits of the command law.

    k_v scales, per axis, how far a leader deviation translates into
    follower velocity (or yaw for the last component). The *_lim values
    are the deadzone half-widths that keep hover noise from commanding
    motion.
    """

    k_v: tuple[float, float, float, float]
    z_d: float
    yaw_d: float
    angle_lim: float
    z_lim: float
    yaw_lim: float

    def __post_init__(self) -> None:
        try:
            gains = tuple(float(g) for g in self.k_v)
        except (TypeError, ValueError) as exc:
            raise ConfigError("k_v must be a 4-vector of numbers") from exc
        if len(gains) != 4:
            raise ConfigError(f"k_v must have exactly 4 components, got {len(gains)}")
        object.__setattr__(self, "k_v", gains)
        for i, g in enumerate(gains):
            require_finite(f"k_v[{i}]", g)
            if g < 0:
                raise ConfigError(f"k_v[{i}]: negative gain")
        object.__setattr__(self, "z_d", require_finite("z_d", self.z_d))
        object.__setattr__(self, "yaw_d", require_finite("yaw_d", self.yaw_d))
        for name in ("angle_lim", "z_lim", "yaw_lim"):
            value = require_finite(name, getattr(self, name))
            object.__setattr__(self, name, value)
            if value < 0:
                raise ConfigError(f"{name}: negative limit")
        if self.z_d <= 0:
            raise ConfigError(f"z_d must be > 0 (hover setpoint above ground), got {self.z_d}")

    def to_dict(self) -> dict:
        return {
            "k_v": list(self.k_v),
            "z_d": self.z_d,
            "yaw_d": self.yaw_d,
            "angle_lim": self.angle_lim,
            "z_lim": self.z_lim,
            "yaw_lim": self.yaw_lim,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "JoystickConfig":
        return cls(
            k_v=tuple(d["k_v"]),
            z_d=d["z_d"],
            yaw_d=d["yaw_d"],
            angle_lim=d["angle_lim"],
            z_lim=d["z_lim"],
            yaw_lim=d["yaw_lim"],
        )


@dataclass(frozen=True)
class SafetyConfig:
    """Attitude / altitude envelope beyond which the motors cut out."""

    pitch_max: float
    roll_max: float
    z_floor: float
    z_ceiling: float

    def __post_init__(self) -> None:
        for name in ("pitch_max", "roll_max", "z_floor", "z_ceiling"):
            object.__setattr__(self, name, require_finite(name, getattr(self, name)))
        if self.pitch_max <= 0:
            raise ConfigError(f"pitch_max must be > 0, got {self.pitch_max}")
        if self.roll_max <= 0:
            raise ConfigError(f"roll_max must be > 0, got {self.roll_max}")
        if self.z_floor < 0:
            raise ConfigError(f"z_floor must be >= 0, got {self.z_floor}")
        if self.z_floor >= self.z_ceiling:
            raise ConfigError(
                f"z_floor must be below z_ceiling, got {self.z_floor} >= {self.z_ceiling}"
            )

    def to_dict(self) -> dict:
        return {
            "pitch_max": self.pitch_max,
            "roll_max": self.roll_max,
            "z_floor": self.z_floor,
            "z_ceiling": self.z_ceiling,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SafetyConfig":
        return cls(
            pitch_max=d["pitch_max"],
            roll_max=d["roll_max"],
            z_floor=d["z_floor"],
            z_ceiling=d["z_ceiling"],
        )


@dataclass(frozen=True)
class CommandVector:
    """Velocity (m/s per axis) plus absolute yaw setpoint for the fleet."""

    v_x: float
    v_y: float
    v_z: float
    alpha: float

    def __post_init__(self) -> None:
        for name in ("v_x", "v_y", "v_z", "alpha"):
            object.__setattr__(self, name, require_finite(name, getattr(self, name)))

    @classmethod
    def zero(cls) -> "CommandVector":
        return cls(0.0, 0.0, 0.0, 0.0)

    def is_zero(self) -> bool:
        return self.v_x == 0.0 and self.v_y == 0.0 and self.v_z == 0.0 and self.alpha == 0.0

    def to_dict(self) -> dict:
        return {"v_x": self.v_x, "v_y": self.v_y, "v_z": self.v_z, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, d: Mapping) -> "CommandVector":
        return cls(v_x=d["v_x"], v_y=d["v_y"], v_z=d["v_z"], alpha=d["alpha"])


@dataclass(frozen=True)
class GripInput:
    """Operator-side boundary condition: where the handgrip is held."""

    position: tuple[float, float, float]
    yaw_twist: float
    held: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", require_vec3("grip position", self.position))
        object.__setattr__(self, "yaw_twist", require_finite("yaw_twist", self.yaw_twist))
        object.__setattr__(self, "held", bool(self.held))

    def validate_twist(self, twist_max: float) -> "GripInput":
        if abs(self.yaw_twist) > twist_max:
            raise ConfigError(
                f"yaw_twist exceeds twist_max: |{self.yaw_twist}| > {twist_max}"
            )
        return self

    def to_dict(self) -> dict:
        return {"pos": list(self.position), "twist": self.yaw_twist, "held": self.held}

    @classmethod
    def from_dict(cls, d: Mapping) -> "GripInput":
        return cls(position=tuple(d["pos"]), yaw_twist=d["twist"], held=d["held"])


def validate_config(cfg: JoystickConfig, safety: SafetyConfig) -> "tuple[JoystickConfig, SafetyConfig]":
    """Cross-check the joystick deadzones against the safety envelope.

    The e-stop thresholds must sit strictly outside the deadzones or the
    joystick would have no usable range on that axis.
    """
    if safety.pitch_max <= cfg.angle_lim:
        raise ConfigError("pitch_max must exceed angle_lim")
    if safety.roll_max <= cfg.angle_lim:
        raise ConfigError("roll_max must exceed angle_lim")
    return cfg, safety
