"""Scenario files: the complete declarative description of one run.

A scenario is a UTF-8 JSON document with exactly the top-level keys
joystick, safety, tether, leader, fleet, feedback and sim. Unknown keys
are rejected at every level, all numbers are SI scalars, all times in
seconds. The document as given (after parsing) is what gets hashed for
the log header, so a byte-level edit of any value changes the identity.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Sequence, Tuple

from . import defaults
from .feedback import FeedbackConfig
from .fleet import Box, FleetParams, Follower, FollowerKind
from .model import (
    ConfigError,
    GripInput,
    JoystickConfig,
    SafetyConfig,
    Vec3,
    require_finite,
    require_vec3,
    validate_config,
)
from .physics import LeaderParams, TetherConfig

TOP_KEYS = ("joystick", "safety", "tether", "leader", "fleet", "feedback", "sim")
SIM_KEYS = (
    "dt",
    "duration",
    "seed",
    "deploy_target",
    "deploy_speed",
    "grip_timeline",
    "obstacles",
    "battery",
    "estop_at",
    "fleet_params",
)

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def canonical_json(doc: Any) -> str:
    """Canonical form used for hashing: sorted keys, no whitespace."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _check_keys(section: Any, allowed: Sequence[str], where: str) -> None:
    if not isinstance(section, Mapping):
        raise ConfigError(f"{where} must be an object")
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {where}")


def _require_keys(section: Mapping, required: Sequence[str], where: str) -> None:
    for key in required:
        if key not in section:
            raise ConfigError(f"missing key {key!r} in {where}")


@dataclass(frozen=True)
class GripKey:
    """One point of the scripted grip timeline."""

    t: float
    position: Vec3
    yaw_twist: float
    held: bool


@dataclass(frozen=True)
class Sphere:
    center: Vec3
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", require_vec3("obstacle center", self.center))
        object.__setattr__(self, "radius", require_finite("obstacle radius", self.radius))
        if self.radius < 0:
            raise ConfigError(f"obstacle radius must be >= 0, got {self.radius}")


@dataclass(frozen=True)
class Scenario:
    dt: float
    duration: float
    seed: int
    joystick: JoystickConfig
    safety: SafetyConfig
    tether: TetherConfig
    leader_params: LeaderParams
    fleet_params: FleetParams
    followers: Tuple[Follower, ...]
    feedback: FeedbackConfig
    grip_timeline: Tuple[GripKey, ...]
    obstacles: Tuple[Sphere, ...]
    battery_initial: float
    battery_drain: float
    deploy_target: Vec3
    deploy_speed: float
    estop_at: Optional[float]
    doc: dict

    def n_ticks(self) -> int:
        # The +1e-9 keeps e.g. 10 s / 0.01 s from flooring to 999.
        return int(math.floor(self.duration / self.dt + 1e-9))

    def hash(self) -> str:
        return format(fnv1a64(canonical_json(self.doc).encode("utf-8")), "016x")

    def launchpad(self) -> Vec3:
        return (self.deploy_target[0], self.deploy_target[1], 0.0)

    def rest_grip_point(self) -> Vec3:
        """Where the unheld grip dangles once the leader is on station."""
        tx, ty, tz = self.deploy_target
        return (tx, ty, tz - self.tether.attach_offset - self.tether.rest_length)

    def sample_grip(self, t: float) -> GripInput:
        """Sample the scripted timeline: linear in position and twist,
        step in held, clamped to the end values outside the keys."""
        keys = self.grip_timeline
        if not keys:
            return GripInput(self.rest_grip_point(), 0.0, False)
        times = [k.t for k in keys]
        idx = bisect_right(times, t)
        if idx == 0:
            return GripInput(self.rest_grip_point(), 0.0, False)
        before = keys[idx - 1]
        if idx == len(keys) or before.t == t:
            return GripInput(before.position, before.yaw_twist, before.held)
        after = keys[idx]
        u = (t - before.t) / (after.t - before.t)
        pos = tuple(before.position[i] + u * (after.position[i] - before.position[i]) for i in range(3))
        twist = before.yaw_twist + u * (after.yaw_twist - before.yaw_twist)
        return GripInput(pos, twist, before.held)


def _parse_grip_timeline(raw: Any, duration: float, twist_max: float) -> Tuple[GripKey, ...]:
    if not isinstance(raw, list):
        raise ConfigError("sim.grip_timeline must be a list")
    keys = []
    prev_t = -math.inf
    for i, entry in enumerate(raw):
        where = f"sim.grip_timeline[{i}]"
        if not isinstance(entry, Mapping):
            raise ConfigError(f"{where} must be an object")
        _check_keys(entry, ("t", "pos", "twist", "held"), where)
        _require_keys(entry, ("t", "pos", "held"), where)
        t = require_finite(f"{where}.t", entry["t"])
        if not 0.0 <= t <= duration:
            raise ConfigError(f"{where}.t outside [0, duration]: {t}")
        if t <= prev_t:
            raise ConfigError(f"{where}.t not strictly increasing: {t}")
        prev_t = t
        grip = GripInput(
            position=tuple(entry["pos"]),
            yaw_twist=entry.get("twist", 0.0),
            held=entry["held"],
        ).validate_twist(twist_max)
        keys.append(GripKey(t, grip.position, grip.yaw_twist, grip.held))
    return tuple(keys)


def _parse_fleet(raw: Any) -> Tuple[Follower, ...]:
    if not isinstance(raw, list):
        raise ConfigError("fleet must be a list of follower specs")
    followers = []
    for i, entry in enumerate(raw):
        where = f"fleet[{i}]"
        if not isinstance(entry, Mapping):
            raise ConfigError(f"{where} must be an object")
        _check_keys(entry, ("kind", "offset", "workspace"), where)
        _require_keys(entry, ("kind", "offset"), where)
        try:
            kind = FollowerKind(entry["kind"])
        except ValueError as exc:
            raise ConfigError(f"{where}.kind must be one of quad/ground/arm") from exc
        workspace = None
        if "workspace" in entry and entry["workspace"] is not None:
            ws = entry["workspace"]
            _check_keys(ws, ("min", "max"), f"{where}.workspace")
            _require_keys(ws, ("min", "max"), f"{where}.workspace")
            workspace = Box(lo=tuple(ws["min"]), hi=tuple(ws["max"]))
        offset = require_vec3(f"{where}.offset", entry["offset"])
        try:
            followers.append(
                Follower(
                    id=i,
                    kind=kind,
                    position=offset,
                    yaw=0.0,
                    offset=offset,
                    workspace=workspace,
                    landed=False,
                )
            )
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    return tuple(followers)


def _parse_obstacles(raw: Any) -> Tuple[Sphere, ...]:
    if not isinstance(raw, list):
        raise ConfigError("sim.obstacles must be a list")
    spheres = []
    for i, entry in enumerate(raw):
        where = f"sim.obstacles[{i}]"
        _check_keys(entry, ("center", "radius"), where)
        _require_keys(entry, ("center", "radius"), where)
        spheres.append(Sphere(center=tuple(entry["center"]), radius=entry["radius"]))
    return tuple(spheres)


def scenario_from_doc(doc: Mapping) -> Scenario:
    """Build and validate a Scenario from a parsed JSON document."""
    if not isinstance(doc, Mapping):
        raise ConfigError("scenario must be a JSON object")
    _check_keys(doc, TOP_KEYS, "scenario")
    _require_keys(doc, TOP_KEYS, "scenario")

    try:
        joystick = JoystickConfig.from_dict(doc["joystick"])
        _check_keys(doc["joystick"], tuple(joystick.to_dict()), "joystick")
        safety = SafetyConfig.from_dict(doc["safety"])
        _check_keys(doc["safety"], tuple(safety.to_dict()), "safety")
        tether = TetherConfig.from_dict(doc["tether"])
        _check_keys(doc["tether"], tuple(tether.to_dict()), "tether")
        leader_params = LeaderParams.from_dict(doc["leader"])
        _check_keys(doc["leader"], tuple(leader_params.to_dict()), "leader")
        feedback = FeedbackConfig.from_dict(doc["feedback"])
        _check_keys(doc["feedback"], tuple(feedback.to_dict()), "feedback")
    except KeyError as exc:
        raise ConfigError(f"missing key {exc.args[0]!r}") from exc
    validate_config(joystick, safety)

    sim = doc["sim"]
    _check_keys(sim, SIM_KEYS, "sim")
    _require_keys(sim, ("dt", "duration"), "sim")

    dt = require_finite("dt", sim["dt"])
    if dt <= 0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    duration = require_finite("duration", sim["duration"])
    if duration < 0:
        raise ConfigError(f"duration must be >= 0, got {duration}")
    seed = sim.get("seed", 0)
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")

    deploy_target = require_vec3(
        "sim.deploy_target", sim.get("deploy_target", [0.0, 0.0, joystick.z_d])
    )
    deploy_speed = require_finite("sim.deploy_speed", sim.get("deploy_speed", defaults.SIM["deploy_speed"]))
    if deploy_speed <= 0:
        raise ConfigError(f"sim.deploy_speed must be > 0, got {deploy_speed}")

    battery = sim.get("battery", defaults.SIM["battery"])
    _check_keys(battery, ("initial", "drain"), "sim.battery")
    battery_initial = require_finite("sim.battery.initial", battery.get("initial", 1.0))
    battery_drain = require_finite("sim.battery.drain", battery.get("drain", 0.0))
    if not 0.0 <= battery_initial <= 1.0:
        raise ConfigError(f"sim.battery.initial must be in [0, 1], got {battery_initial}")
    if battery_drain < 0:
        raise ConfigError(f"sim.battery.drain must be >= 0, got {battery_drain}")

    estop_at = sim.get("estop_at")
    if estop_at is not None:
        estop_at = require_finite("sim.estop_at", estop_at)
        if not 0.0 <= estop_at <= duration:
            raise ConfigError(f"sim.estop_at outside [0, duration]: {estop_at}")

    fp_doc = sim.get("fleet_params", defaults.FLEET_PARAMS)
    _check_keys(fp_doc, ("v_land", "yaw_rate_max", "v_max"), "sim.fleet_params")
    fleet_params = FleetParams(
        v_land=fp_doc.get("v_land", defaults.FLEET_PARAMS["v_land"]),
        yaw_rate_max=fp_doc.get("yaw_rate_max", defaults.FLEET_PARAMS["yaw_rate_max"]),
        v_max=fp_doc.get("v_max", defaults.FLEET_PARAMS["v_max"]),
    )

    followers = _parse_fleet(doc["fleet"])
    grip_timeline = _parse_grip_timeline(sim.get("grip_timeline", []), duration, tether.twist_max)
    obstacles = _parse_obstacles(sim.get("obstacles", []))

    return Scenario(
        dt=dt,
        duration=duration,
        seed=seed,
        joystick=joystick,
        safety=safety,
        tether=tether,
        leader_params=leader_params,
        fleet_params=fleet_params,
        followers=followers,
        feedback=feedback,
        grip_timeline=grip_timeline,
        obstacles=obstacles,
        battery_initial=battery_initial,
        battery_drain=battery_drain,
        deploy_target=deploy_target,
        deploy_speed=deploy_speed,
        estop_at=estop_at,
        doc=json.loads(canonical_json(doc)),
    )


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"scenario file is not valid JSON: {exc}") from exc
    return scenario_from_doc(doc)


def default_scenario(**sim_overrides) -> Scenario:
    return scenario_from_doc(defaults.default_scenario_doc(**sim_overrides))
