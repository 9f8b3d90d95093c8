"""Follower kinematics: velocity-command integration and safe landing.

Followers are kinematic integrators, not dynamic plants; the command IS
their velocity. Three kinds cover the heterogeneous fleet: free-flying
quads, planar ground vehicles, and a workspace-boxed arm end effector.
Followers never interact with each other.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Optional, Tuple

from .control import wrap_angle, wrap_yaw
from .model import CommandVector, ConfigError, Mode, Vec3, require_finite, require_vec3

# Altitudes this close to the ground collapse to exact contact so that a
# landing takes the arithmetically expected number of ticks.
GROUND_SNAP = 1e-9


class FollowerKind(str, Enum):
    QUAD = "quad"
    GROUND = "ground"
    ARM = "arm"


@dataclass(frozen=True)
class Box:
    """Axis-aligned workspace box, lo <= hi per axis."""

    lo: Vec3
    hi: Vec3

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", require_vec3("workspace min", self.lo))
        object.__setattr__(self, "hi", require_vec3("workspace max", self.hi))
        for axis in range(3):
            if self.lo[axis] > self.hi[axis]:
                raise ConfigError(
                    f"workspace min exceeds max on axis {axis}: "
                    f"{self.lo[axis]} > {self.hi[axis]}"
                )

    def contains(self, p: Vec3) -> bool:
        return all(self.lo[i] <= p[i] <= self.hi[i] for i in range(3))

    def clamp(self, p: Vec3) -> Vec3:
        return tuple(min(max(p[i], self.lo[i]), self.hi[i]) for i in range(3))

    def to_dict(self) -> dict:
        return {"min": list(self.lo), "max": list(self.hi)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Box":
        return cls(lo=tuple(d["min"]), hi=tuple(d["max"]))


@dataclass(frozen=True)
class Follower:
    id: int
    kind: FollowerKind
    position: Vec3
    yaw: float
    offset: Vec3
    workspace: Optional[Box]
    landed: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", FollowerKind(self.kind))
        object.__setattr__(self, "position", require_vec3("position", self.position))
        object.__setattr__(self, "offset", require_vec3("offset", self.offset))
        object.__setattr__(self, "yaw", require_finite("yaw", self.yaw))
        if self.kind is FollowerKind.GROUND and self.position[2] != 0.0:
            raise ConfigError(f"ground follower {self.id} must have z = 0, got {self.position[2]}")
        if self.kind is FollowerKind.ARM:
            if self.workspace is None:
                raise ConfigError(f"arm follower {self.id} requires a workspace box")
            if not self.workspace.contains(self.position):
                raise ConfigError(
                    f"arm follower {self.id} position {self.position} outside workspace"
                )
        if self.landed and self.kind is FollowerKind.QUAD and self.position[2] != 0.0:
            raise ConfigError(f"landed quad {self.id} must have z = 0, got {self.position[2]}")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "pos": list(self.position),
            "yaw": self.yaw,
            "offset": list(self.offset),
            "workspace": self.workspace.to_dict() if self.workspace else None,
            "landed": self.landed,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Follower":
        ws = d.get("workspace")
        return cls(
            id=d["id"],
            kind=FollowerKind(d["kind"]),
            position=tuple(d["pos"]),
            yaw=d["yaw"],
            offset=tuple(d["offset"]),
            workspace=Box.from_dict(ws) if ws else None,
            landed=d["landed"],
        )


@dataclass(frozen=True)
class FleetParams:
    v_land: float
    yaw_rate_max: float
    v_max: float

    def __post_init__(self) -> None:
        for name in ("v_land", "yaw_rate_max", "v_max"):
            value = require_finite(name, getattr(self, name))
            object.__setattr__(self, name, value)
            if value <= 0:
                raise ConfigError(f"{name} must be > 0, got {value}")

    def to_dict(self) -> dict:
        return {"v_land": self.v_land, "yaw_rate_max": self.yaw_rate_max, "v_max": self.v_max}

    @classmethod
    def from_dict(cls, d: Mapping) -> "FleetParams":
        return cls(v_land=d["v_land"], yaw_rate_max=d["yaw_rate_max"], v_max=d["v_max"])


def _clip(value: float, bound: float) -> float:
    return -bound if value < -bound else bound if value > bound else value


def apply_command(f: Follower, cmd: CommandVector, params: FleetParams, dt: float) -> Follower:
    """Integrate one velocity command into the follower, kind-projected."""
    if f.landed:
        return f
    dx = _clip(cmd.v_x, params.v_max) * dt
    dy = _clip(cmd.v_y, params.v_max) * dt
    dz = _clip(cmd.v_z, params.v_max) * dt

    if f.kind is FollowerKind.ARM:
        yaw_step = 0.0
        new_yaw = f.yaw
    else:
        yaw_step = _clip(wrap_angle(cmd.alpha - f.yaw), params.yaw_rate_max * dt)
        new_yaw = wrap_yaw(f.yaw + yaw_step)

    if dx == 0.0 and dy == 0.0 and dz == 0.0 and yaw_step == 0.0:
        return f

    x, y, z = f.position
    if f.kind is FollowerKind.GROUND:
        pos = (x + dx, y + dy, 0.0)
    elif f.kind is FollowerKind.ARM:
        pos = f.workspace.clamp((x + dx, y + dy, z + dz))
    else:
        pos = (x + dx, y + dy, z + dz)
    return replace(f, position=pos, yaw=new_yaw)


def safe_land(f: Follower, params: FleetParams, dt: float) -> Follower:
    """Emergency behavior: quads descend in place, everything else freezes."""
    if f.landed:
        return f
    if f.kind is not FollowerKind.QUAD:
        return replace(f, landed=True)
    z = f.position[2] - params.v_land * dt
    if z < GROUND_SNAP:
        z = 0.0
    pos = (f.position[0], f.position[1], z)
    return replace(f, position=pos, landed=(z == 0.0))


def fleet_step(
    fleet: Tuple[Follower, ...],
    cmd: CommandVector,
    mode: Mode,
    params: FleetParams,
    dt: float,
) -> Tuple[Follower, ...]:
    """Advance every follower one tick according to the mission mode."""
    if mode is Mode.ACTIVE:
        return tuple(apply_command(f, cmd, params, dt) for f in fleet)
    if mode is Mode.EMERGENCY:
        return tuple(safe_land(f, params, dt) for f in fleet)
    return fleet
