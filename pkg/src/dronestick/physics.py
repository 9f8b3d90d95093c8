"""Leader plant: a hover-holding quadrotor and the elastic grip tether.

The plant is the smallest model that turns an operator pull into a
persistent, measurable state deviation: point-mass translation driven by
a PD position controller whose horizontal acceleration is realized by
leaning, with the lean tracking its command through a first-order lag.
The controller is PD only, on purpose: integral action would null the
steady-state offsets that *are* the joystick signal.

Lean sign convention (shared with the command law): positive pitch
accelerates the body toward +x, positive roll toward -y. Holding
position against a pull toward +x therefore settles at negative pitch,
and against +y at positive roll.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .control import wrap_angle, wrap_yaw
from .model import ConfigError, GripInput, LeaderState, Vec3, require_finite, require_vec3

# Guards against a zero attachment offset in the twist inertia proxy.
TWIST_INERTIA_EPS = 1e-9


@dataclass(frozen=True)
class LeaderParams:
    """Mass, gravity and controller gains of the leader plant."""

    mass: float
    gravity: float
    kp_pos: float
    kd_pos: float
    tilt_tau: float
    kp_yaw: float
    kd_yaw: float
    tilt_cap: float

    def __post_init__(self) -> None:
        for name in (
            "mass",
            "gravity",
            "kp_pos",
            "kd_pos",
            "tilt_tau",
            "kp_yaw",
            "kd_yaw",
            "tilt_cap",
        ):
            value = require_finite(name, getattr(self, name))
            object.__setattr__(self, name, value)
            if value <= 0:
                raise ConfigError(f"{name} must be > 0, got {value}")
        if self.tilt_cap >= math.pi / 2:
            raise ConfigError(f"tilt_cap must be below pi/2, got {self.tilt_cap}")

    def to_dict(self) -> dict:
        return {
            "mass": self.mass,
            "gravity": self.gravity,
            "kp_pos": self.kp_pos,
            "kd_pos": self.kd_pos,
            "tilt_tau": self.tilt_tau,
            "kp_yaw": self.kp_yaw,
            "kd_yaw": self.kd_yaw,
            "tilt_cap": self.tilt_cap,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "LeaderParams":
        return cls(**{k: d[k] for k in (
            "mass", "gravity", "kp_pos", "kd_pos", "tilt_tau", "kp_yaw", "kd_yaw", "tilt_cap"
        )})


@dataclass(frozen=True)
class TetherConfig:
    """Coiled-wire tether between the leader's belly and the handgrip."""

    rest_length: float
    stiffness: float
    damping: float
    attach_offset: float
    twist_max: float

    def __post_init__(self) -> None:
        for name in ("rest_length", "stiffness", "damping", "attach_offset", "twist_max"):
            object.__setattr__(self, name, require_finite(name, getattr(self, name)))
        if self.rest_length <= 0:
            raise ConfigError(f"rest_length must be > 0, got {self.rest_length}")
        if self.stiffness < 0:
            raise ConfigError(f"stiffness must be >= 0, got {self.stiffness}")
        if self.damping < 0:
            raise ConfigError(f"damping must be >= 0, got {self.damping}")
        if self.attach_offset < 0:
            raise ConfigError(f"attach_offset must be >= 0, got {self.attach_offset}")
        if self.twist_max < 0:
            raise ConfigError(f"twist_max must be >= 0, got {self.twist_max}")

    def to_dict(self) -> dict:
        return {
            "rest_length": self.rest_length,
            "stiffness": self.stiffness,
            "damping": self.damping,
            "attach_offset": self.attach_offset,
            "twist_max": self.twist_max,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TetherConfig":
        return cls(**{k: d[k] for k in (
            "rest_length", "stiffness", "damping", "attach_offset", "twist_max"
        )})


def attach_point(leader: LeaderState, tether: TetherConfig) -> Vec3:
    """Where the wire leaves the leader: attach_offset below its center."""
    x, y, z = leader.position
    return (x, y, z - tether.attach_offset)


def tether_force(grip: GripInput, leader: LeaderState, tether: TetherConfig) -> Vec3:
    """Tension the stretched wire applies to the leader, in newtons.

    A coiled wire cannot push: the force is zero when the grip is not
    held or the wire is slack, and otherwise points from the attachment
    toward the grip. Damping dissipates only while the extension grows
    (the leader backing away from a quasi-static grip); a recoiling
    slack bight dissipates nothing.
    """
    if not grip.held:
        return (0.0, 0.0, 0.0)
    ax, ay, az = attach_point(leader, tether)
    dx = grip.position[0] - ax
    dy = grip.position[1] - ay
    dz = grip.position[2] - az
    length = math.sqrt(dx * dx + dy * dy + dz * dz)
    if length <= tether.rest_length:
        return (0.0, 0.0, 0.0)
    ux, uy, uz = dx / length, dy / length, dz / length
    vx, vy, vz = leader.velocity
    extension_rate = -(ux * vx + uy * vy + uz * vz)
    tension = tether.stiffness * (length - tether.rest_length)
    tension += tether.damping * max(0.0, extension_rate)
    return (tension * ux, tension * uy, tension * uz)


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def step_leader(
    state: LeaderState,
    ext_force: Vec3,
    twist: float,
    params: LeaderParams,
    setpoint: Vec3,
    dt: float,
    yaw_hold: float = 0.0,
    attach_offset: float = 0.05,
) -> LeaderState:
    """One semi-implicit Euler step of the position-holding leader.

    Order per step: PD desired acceleration from the current pose, lean
    command from its horizontal part (exact thrust-vector geometry, so a
    steady side force settles at a lean of arctan(F / (m g))), lean
    relaxed one step toward that command, then translation integrated
    with the new lean. Thrust is abstracted as canceling gravity exactly
    plus the vertical PD term, which makes an undisturbed hover a true
    fixed point. Yaw is PD-held at the deployment heading, with the
    operator twist acting through a small inertia proxy.
    """
    if not (isinstance(dt, (int, float)) and math.isfinite(dt) and dt > 0):
        raise ConfigError(f"dt must be a finite positive number, got {dt!r}")
    fx, fy, fz = require_vec3("ext_force", ext_force)
    twist = require_finite("twist", twist)
    sx, sy, sz = require_vec3("setpoint", setpoint)

    px, py, pz = state.position
    vx, vy, vz = state.velocity
    g = params.gravity

    ax_des = params.kp_pos * (sx - px) - params.kd_pos * vx
    ay_des = params.kp_pos * (sy - py) - params.kd_pos * vy
    az_des = params.kp_pos * (sz - pz) - params.kd_pos * vz

    pitch_cmd = _clamp(math.atan(ax_des / g), -params.tilt_cap, params.tilt_cap)
    roll_cmd = _clamp(math.atan(-ay_des / g), -params.tilt_cap, params.tilt_cap)
    blend = dt / params.tilt_tau
    pitch = state.pitch + blend * (pitch_cmd - state.pitch)
    roll = state.roll + blend * (roll_cmd - state.roll)

    ax = g * math.tan(pitch) + fx / params.mass
    ay = -g * math.tan(roll) + fy / params.mass
    az = az_des + fz / params.mass

    vx += ax * dt
    vy += ay * dt
    vz += az * dt
    px += vx * dt
    py += vy * dt
    pz += vz * dt

    inertia = params.mass * attach_offset * attach_offset + TWIST_INERTIA_EPS
    yaw_dev = wrap_angle(state.yaw - yaw_hold)
    yaw_accel = (
        params.kp_yaw * wrap_angle(-yaw_dev)
        - params.kd_yaw * state.yaw_rate
        + twist / inertia
    )
    yaw_rate = state.yaw_rate + yaw_accel * dt
    yaw = wrap_yaw(state.yaw + yaw_rate * dt)

    return LeaderState(
        position=(px, py, pz),
        velocity=(vx, vy, vz),
        pitch=pitch,
        roll=roll,
        yaw=yaw,
        yaw_rate=yaw_rate,
    )


def step_leader_unpowered(
    state: LeaderState,
    ext_force: Vec3,
    twist: float,
    params: LeaderParams,
    dt: float,
    attach_offset: float = 0.05,
) -> LeaderState:
    """Motors-off step: no thrust, lean command zero, ground stops all.

    Used after an emergency stop. The body falls under gravity (a held
    tether can still carry it), the lean decays toward level with the
    same lag as under power, and touching z = 0 zeroes all rates.
    """
    if not (isinstance(dt, (int, float)) and math.isfinite(dt) and dt > 0):
        raise ConfigError(f"dt must be a finite positive number, got {dt!r}")
    fx, fy, fz = require_vec3("ext_force", ext_force)
    twist = require_finite("twist", twist)

    blend = dt / params.tilt_tau
    pitch = state.pitch + blend * (0.0 - state.pitch)
    roll = state.roll + blend * (0.0 - state.roll)

    m = params.mass
    vx = state.velocity[0] + (fx / m) * dt
    vy = state.velocity[1] + (fy / m) * dt
    vz = state.velocity[2] + (-params.gravity + fz / m) * dt
    px = state.position[0] + vx * dt
    py = state.position[1] + vy * dt
    pz = state.position[2] + vz * dt

    inertia = m * attach_offset * attach_offset + TWIST_INERTIA_EPS
    yaw_rate = state.yaw_rate + (twist / inertia) * dt
    yaw = wrap_yaw(state.yaw + yaw_rate * dt)

    if pz <= 0.0:
        pz = 0.0
        vx = vy = vz = 0.0
        yaw_rate = 0.0

    return LeaderState(
        position=(px, py, pz),
        velocity=(vx, vy, vz),
        pitch=pitch,
        roll=roll,
        yaw=yaw,
        yaw_rate=yaw_rate,
    )
