"""Command law: leader state deviations -> gated fleet commands.

The mapping is memoryless. Each tick the four deviations of the leader
from its hold setpoint (lean angles, altitude offset, heading offset)
are passed through a hard per-axis deadzone and scaled by the per-axis
gain. A component strictly inside its deadzone emits exactly 0.0, so
hover jitter never moves the fleet; the smoothing of what does pass is
left to the elasticity of the physical tether.

Also home to the e-stop predicate and the mission mode state machine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    CommandVector,
    ConfigError,
    JoystickConfig,
    LeaderState,
    Mode,
    SafetyConfig,
    require_finite,
)


def wrap_angle(value: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(value, math.tau)
    if wrapped <= -math.pi:
        wrapped += math.tau
    return wrapped


def wrap_yaw(value: float) -> float:
    """Wrap an angle to [-pi, pi), the storage convention for yaw."""
    wrapped = math.remainder(value, math.tau)
    return -math.pi if wrapped >= math.pi else wrapped


@dataclass(frozen=True)
class Deviation:
    """Leader state minus its hold setpoint, one entry per command axis."""

    d_pitch: float
    d_roll: float
    d_z: float
    d_yaw: float

    def __post_init__(self) -> None:
        for name in ("d_pitch", "d_roll", "d_z", "d_yaw"):
            object.__setattr__(self, name, require_finite(name, getattr(self, name)))

    def negated(self) -> "Deviation":
        return Deviation(-self.d_pitch, -self.d_roll, -self.d_z, -self.d_yaw)


def deviations(state: LeaderState, cfg: JoystickConfig) -> Deviation:
    """Extract the four command-axis deviations from the leader state.

    Pitch enters negated: with the plant's lean convention a pull toward
    +x leaves the leader holding negative pitch, and the negation turns
    that into a positive +x command so followers move with the pull. The
    yaw offset is wrapped to (-pi, pi] before gating so a hold heading
    near +/-pi cannot produce a full-turn deviation.
    """
    return Deviation(
        d_pitch=-state.pitch,
        d_roll=state.roll,
        d_z=state.position[2] - cfg.z_d,
        d_yaw=wrap_angle(state.yaw - cfg.yaw_d),
    )


def gate(value: float, limit: float) -> float:
    """Hard deadzone: pass value only when strictly beyond the limit.

    The boundary case |value| == limit yields 0.0. No offset is
    subtracted, so the output jumps from 0 to value at the threshold.
    """
    if limit < 0:
        raise ConfigError(f"gate limit must be >= 0, got {limit}")
    return value if abs(value) > limit else 0.0


def gated_command(dev: Deviation, cfg: JoystickConfig) -> CommandVector:
    """Scale each gated deviation by its gain. Pure, axis-independent."""
    k = cfg.k_v
    return CommandVector(
        v_x=k[0] * gate(dev.d_pitch, cfg.angle_lim),
        v_y=k[1] * gate(dev.d_roll, cfg.angle_lim),
        v_z=k[2] * gate(dev.d_z, cfg.z_lim),
        alpha=k[3] * gate(dev.d_yaw, cfg.yaw_lim),
    )


def compute_command(state: LeaderState, cfg: JoystickConfig) -> CommandVector:
    """Full command law: deviations, deadzones, gains, in that order."""
    return gated_command(deviations(state, cfg), cfg)


def command_within_bounds(
    cmd: CommandVector, cfg: JoystickConfig, safety: SafetyConfig
) -> bool:
    """Check a command against the largest deviation each axis can reach.

    Attitude axes are bounded by the e-stop envelope (a larger lean cuts
    the motors before the command is consumed), altitude by the distance
    from the hover setpoint to the floor/ceiling, and yaw by the wrap.
    """
    z_span = max(safety.z_ceiling - cfg.z_d, cfg.z_d - safety.z_floor)
    return (
        abs(cmd.v_x) <= cfg.k_v[0] * safety.pitch_max
        and abs(cmd.v_y) <= cfg.k_v[1] * safety.roll_max
        and abs(cmd.v_z) <= cfg.k_v[2] * z_span
        and abs(cmd.alpha) <= cfg.k_v[3] * math.pi
    )


def check_estop(state: LeaderState, safety: SafetyConfig) -> bool:
    """True when the leader left its safe attitude/altitude envelope."""
    z = state.position[2]
    return (
        abs(state.pitch) > safety.pitch_max
        or abs(state.roll) > safety.roll_max
        or z < safety.z_floor
        or z > safety.z_ceiling
    )


def step_mode(mode: Mode, estop: bool, deploy_done: bool, landed: bool) -> Mode:
    """Advance the mission mode one tick.

    Docked launches unconditionally (the scenario has started). The
    e-stop wins over deploy completion; Emergency only resolves to
    Landed, and Landed absorbs everything.
    """
    if mode is Mode.DOCKED:
        return Mode.DEPLOYING
    if mode is Mode.DEPLOYING or mode is Mode.ACTIVE:
        if estop:
            return Mode.EMERGENCY
        if mode is Mode.DEPLOYING and deploy_done:
            return Mode.ACTIVE
        return mode
    if mode is Mode.EMERGENCY:
        return Mode.LANDED if landed else Mode.EMERGENCY
    return Mode.LANDED
