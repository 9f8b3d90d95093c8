"""Deterministic fixed-step world loop, logging and bit-exact replay.

One mutable world advanced tick by tick in a fixed order; no randomness
anywhere, so a run is a pure function of its scenario (plus any recorded
live inputs) and repeated runs serialize byte-identically. Frames are
JSON-Lines: line one is a header with the schema version and the
scenario hash, then one canonical frame per line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, List, Mapping, Optional, Tuple

from .control import check_estop, compute_command, step_mode
from .feedback import BATTERY, PROXIMITY, VibroEvent, battery_alarm, proximity_alarm, schedule_impulses
from .fleet import Follower, fleet_step
from .model import CommandVector, ConfigError, GripInput, LeaderState, Mode, Vec3
from .physics import step_leader, step_leader_unpowered, tether_force
from .scenario import Scenario

SCHEMA_VERSION = 1

# Deployment completes when the leader parks this close to the target,
# this slow.
DEPLOY_POS_TOL = 0.05
DEPLOY_SPEED_TOL = 0.05

# Sub-tick slack when comparing tick-grid times against scripted times.
TIME_EPS = 1e-9


class SimulationFault(RuntimeError):
    """A non-finite value appeared in the world state."""

    def __init__(self, field_name: str, tick: int, detail: str = ""):
        message = detail or f"non-finite value in {field_name}"
        super().__init__(f"{message} at tick {tick}")
        self.field_name = field_name
        self.tick = tick


class ReplayMismatch(ValueError):
    """The log header does not belong to the scenario being replayed."""


@dataclass(frozen=True)
class WorldState:
    t: float
    tick: int
    mode: Mode
    leader: LeaderState
    grip: GripInput
    fleet: Tuple[Follower, ...]
    battery: float
    command: CommandVector
    vibro_last_end: "dict[str, float]"
    estop_latched: bool


@dataclass(frozen=True)
class TickInputs:
    """Live overrides for one tick (gateway or replay)."""

    grip: Optional[GripInput] = None
    estop: bool = False


@dataclass(frozen=True)
class Frame:
    """One tick's full world snapshot plus the impulses emitted in it."""

    tick: int
    t: float
    mode: Mode
    leader: LeaderState
    grip: GripInput
    live_grip: bool
    operator_estop: bool
    fleet: Tuple[Follower, ...]
    battery: float
    command: CommandVector
    vibro: Tuple[VibroEvent, ...]
    vibro_last_end: "dict[str, float]"
    estop_latched: bool

    def to_dict(self) -> dict:
        return {
            "tick": self.tick,
            "t": self.t,
            "mode": self.mode.value,
            "leader": self.leader.to_dict(),
            "grip": self.grip.to_dict(),
            "live_grip": self.live_grip,
            "operator_estop": self.operator_estop,
            "fleet": [f.to_dict() for f in self.fleet],
            "battery": self.battery,
            "command": self.command.to_dict(),
            "vibro": [v.to_dict() for v in self.vibro],
            "vibro_last_end": dict(self.vibro_last_end),
            "estop_latched": self.estop_latched,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Frame":
        return cls(
            tick=d["tick"],
            t=d["t"],
            mode=Mode(d["mode"]),
            leader=LeaderState.from_dict(d["leader"]),
            grip=GripInput.from_dict(d["grip"]),
            live_grip=d["live_grip"],
            operator_estop=d["operator_estop"],
            fleet=tuple(Follower.from_dict(f) for f in d["fleet"]),
            battery=d["battery"],
            command=CommandVector.from_dict(d["command"]),
            vibro=tuple(VibroEvent.from_dict(v) for v in d["vibro"]),
            vibro_last_end=dict(d["vibro_last_end"]),
            estop_latched=d["estop_latched"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "Frame":
        return cls.from_dict(json.loads(line))

    def world(self) -> WorldState:
        return WorldState(
            t=self.t,
            tick=self.tick,
            mode=self.mode,
            leader=self.leader,
            grip=self.grip,
            fleet=self.fleet,
            battery=self.battery,
            command=self.command,
            vibro_last_end=dict(self.vibro_last_end),
            estop_latched=self.estop_latched,
        )


@dataclass
class Log:
    header: dict
    frames: List[Frame]
    lines: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.lines:
            self.lines = [frame.to_json() for frame in self.frames]

    def dumps(self) -> str:
        head = json.dumps(self.header, sort_keys=True, separators=(",", ":"))
        return "\n".join([head] + self.lines) + "\n"

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def from_lines(cls, lines: List[str]) -> "Log":
        lines = [ln for ln in (raw.strip("\n") for raw in lines) if ln]
        if not lines:
            raise ValueError("log is empty")
        header = json.loads(lines[0])
        frames = []
        for ln in lines[1:]:
            try:
                frames.append(Frame.from_json(ln))
            except Exception:
                frames.append(None)  # unparseable line; flagged during replay
        return cls(header=header, frames=frames, lines=lines[1:])

    @classmethod
    def read(cls, path: str) -> "Log":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_lines(fh.readlines())


def log_header(scenario: Scenario) -> dict:
    return {"schema_version": SCHEMA_VERSION, "scenario_hash": scenario.hash()}


def initial_world(scenario: Scenario) -> WorldState:
    leader = LeaderState(
        position=scenario.launchpad(),
        velocity=(0.0, 0.0, 0.0),
        pitch=0.0,
        roll=0.0,
        yaw=0.0,
        yaw_rate=0.0,
    )
    return WorldState(
        t=0.0,
        tick=0,
        mode=Mode.DOCKED,
        leader=leader,
        grip=scenario.sample_grip(0.0),
        fleet=scenario.followers,
        battery=scenario.battery_initial,
        command=CommandVector.zero(),
        vibro_last_end={},
        estop_latched=False,
    )


def deploy_setpoint(scenario: Scenario, t: float) -> Vec3:
    """Hover setpoint: ramps launchpad -> deploy target, then holds."""
    lx, ly, lz = scenario.launchpad()
    tx, ty, tz = scenario.deploy_target
    dx, dy, dz = tx - lx, ty - ly, tz - lz
    dist = math.sqrt(dx * dx + dy * dy + dz * dz)
    if dist == 0.0:
        return scenario.deploy_target
    frac = min(1.0, scenario.deploy_speed * t / dist)
    if frac == 1.0:
        return scenario.deploy_target
    return (lx + frac * dx, ly + frac * dy, lz + frac * dz)


def _dist(a: Vec3, b: Vec3) -> float:
    dx, dy, dz = a[0] - b[0], a[1] - b[1], a[2] - b[2]
    # products, not **: squaring a huge finite float must give inf, not raise
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def _speed(v: Vec3) -> float:
    return math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])


def _check_finite(world: WorldState, tick: int) -> None:
    def scan(name: str, value: float) -> None:
        if not math.isfinite(value):
            raise SimulationFault(name, tick)

    for i, c in enumerate(world.leader.position):
        scan(f"leader.pos[{i}]", c)
    for i, c in enumerate(world.leader.velocity):
        scan(f"leader.vel[{i}]", c)
    scan("leader.pitch", world.leader.pitch)
    scan("leader.roll", world.leader.roll)
    scan("leader.yaw", world.leader.yaw)
    scan("leader.yaw_rate", world.leader.yaw_rate)
    for f in world.fleet:
        for i, c in enumerate(f.position):
            scan(f"fleet[{f.id}].pos[{i}]", c)
        scan(f"fleet[{f.id}].yaw", f.yaw)
    scan("battery", world.battery)
    for name in ("v_x", "v_y", "v_z", "alpha"):
        scan(f"command.{name}", getattr(world.command, name))


def tick(
    world: WorldState, scenario: Scenario, inputs: Optional[TickInputs] = None
) -> "tuple[WorldState, Frame]":
    """Advance the world by one dt and emit the frame for the new state.

    Fixed execution order, which defines the semantics:
      1. sample the grip (live override wins over the timeline)
      2. tether force on the leader
      3. leader step (powered while Deploying/Active, free-fall in
         Emergency, parked in Docked/Landed)
      4. command law, consumed only if the tick ends Active
      5. e-stop sources -> mode machine (state e-stop is armed in Active
         only; the scripted/operator stop also works while Deploying)
      6. fleet step under the new mode
      7. battery, alarms, vibro impulse scheduling
      8. frame emission, with a finiteness scan as the fatal-error net

    Fleet motion therefore lags the leader state by one tick.
    """
    k = world.tick + 1
    t = k * scenario.dt
    dt = scenario.dt

    if inputs is not None and inputs.grip is not None:
        grip, live = inputs.grip, True
    else:
        grip, live = scenario.sample_grip(t), False
    operator_estop = bool(inputs.estop) if inputs is not None else False

    force = tether_force(grip, world.leader, scenario.tether)
    twist = grip.yaw_twist if grip.held else 0.0

    mode = world.mode
    try:
        if mode is Mode.DEPLOYING or mode is Mode.ACTIVE:
            setpoint = scenario.deploy_target if mode is Mode.ACTIVE else deploy_setpoint(scenario, t)
            leader = step_leader(
                world.leader,
                force,
                twist,
                scenario.leader_params,
                setpoint,
                dt,
                yaw_hold=0.0,
                attach_offset=scenario.tether.attach_offset,
            )
        elif mode is Mode.EMERGENCY:
            leader = step_leader_unpowered(
                world.leader,
                force,
                twist,
                scenario.leader_params,
                dt,
                attach_offset=scenario.tether.attach_offset,
            )
        else:
            leader = world.leader
    except ConfigError as exc:
        # Divergence inside the step (overflow to inf/nan) is fatal.
        raise SimulationFault("leader", k, detail=f"leader step diverged: {exc}") from exc

    raw_command = (
        compute_command(leader, scenario.joystick) if mode is Mode.ACTIVE else CommandVector.zero()
    )

    state_estop = mode is Mode.ACTIVE and check_estop(leader, scenario.safety)
    scripted_estop = scenario.estop_at is not None and t >= scenario.estop_at - TIME_EPS
    estop = state_estop or scripted_estop or operator_estop
    deploy_done = (
        mode is Mode.DEPLOYING
        and _dist(leader.position, scenario.deploy_target) <= DEPLOY_POS_TOL
        and _speed(leader.velocity) < DEPLOY_SPEED_TOL
    )
    landed = (
        mode is Mode.EMERGENCY
        and leader.position[2] == 0.0
        and all(f.landed for f in world.fleet)
    )
    new_mode = step_mode(mode, estop, deploy_done, landed)

    command = raw_command if new_mode is Mode.ACTIVE else CommandVector.zero()
    fleet = fleet_step(world.fleet, command, new_mode, scenario.fleet_params, dt)

    battery = world.battery
    if scenario.battery_drain > 0.0:
        battery = max(0.0, scenario.battery_initial - scenario.battery_drain * t)
    alarms = set()
    if proximity_alarm(fleet, [(o.center, o.radius) for o in scenario.obstacles], scenario.feedback.d_warn):
        alarms.add(PROXIMITY)
    if battery_alarm(battery, scenario.feedback.b_warn):
        alarms.add(BATTERY)
    vibro, last_end = schedule_impulses(alarms, t, world.vibro_last_end, scenario.feedback)

    new_world = WorldState(
        t=t,
        tick=k,
        mode=new_mode,
        leader=leader,
        grip=grip,
        fleet=fleet,
        battery=battery,
        command=command,
        vibro_last_end=last_end,
        estop_latched=world.estop_latched or new_mode is Mode.EMERGENCY,
    )
    _check_finite(new_world, k)

    frame = Frame(
        tick=k,
        t=t,
        mode=new_mode,
        leader=leader,
        grip=grip,
        live_grip=live,
        operator_estop=operator_estop,
        fleet=fleet,
        battery=battery,
        command=command,
        vibro=vibro,
        vibro_last_end=last_end,
        estop_latched=new_world.estop_latched,
    )
    return new_world, frame


def run(
    scenario: Scenario,
    input_feed: Optional[Callable[[int], Optional[TickInputs]]] = None,
) -> Log:
    """Execute a scenario headless: exactly floor(duration/dt) frames."""
    world = initial_world(scenario)
    frames: List[Frame] = []
    for k in range(1, scenario.n_ticks() + 1):
        inputs = input_feed(k) if input_feed is not None else None
        world, frame = tick(world, scenario, inputs)
        frames.append(frame)
    return Log(header=log_header(scenario), frames=frames)


@dataclass(frozen=True)
class ReplayReport:
    match: bool
    divergent_tick: Optional[int]
    frames_checked: int
    detail: str


def replay(log: Log, scenario: Scenario) -> ReplayReport:
    """Re-execute a logged scenario and compare frame bytes.

    Live grip inputs and operator stops recorded in the frames are fed
    back in, so logs captured from interactive sessions replay exactly.
    """
    expected_hash = scenario.hash()
    got_hash = log.header.get("scenario_hash")
    if got_hash != expected_hash:
        raise ReplayMismatch(
            f"scenario hash mismatch: log has {got_hash!r}, scenario is {expected_hash!r}"
        )
    world = initial_world(scenario)
    for idx, line in enumerate(log.lines):
        k = idx + 1
        recorded = log.frames[idx]
        inputs = None
        if recorded is not None and (recorded.live_grip or recorded.operator_estop):
            inputs = TickInputs(
                grip=recorded.grip if recorded.live_grip else None,
                estop=recorded.operator_estop,
            )
        world, frame = tick(world, scenario, inputs)
        if frame.to_json() != line:
            return ReplayReport(
                match=False,
                divergent_tick=k,
                frames_checked=k,
                detail=f"frame mismatch at tick {k}",
            )
    return ReplayReport(
        match=True,
        divergent_tick=None,
        frames_checked=len(log.lines),
        detail="exact match",
    )
