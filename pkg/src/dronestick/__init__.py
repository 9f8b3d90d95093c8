"""Deterministic flying-joystick simulator and control library."""

from .control import (
    Deviation,
    check_estop,
    compute_command,
    deviations,
    gate,
    gated_command,
    step_mode,
    wrap_angle,
)
from .engine import Frame, Log, TickInputs, WorldState, initial_world, replay, run, tick
from .feedback import FeedbackConfig, VibroEvent, battery_alarm, proximity_alarm, schedule_impulses
from .fleet import Box, FleetParams, Follower, FollowerKind, apply_command, fleet_step, safe_land
from .model import (
    CommandVector,
    ConfigError,
    GripInput,
    JoystickConfig,
    LeaderState,
    Mode,
    SafetyConfig,
    validate_config,
)
from .physics import LeaderParams, TetherConfig, step_leader, step_leader_unpowered, tether_force
from .scenario import Scenario, default_scenario, load_scenario, scenario_from_doc

__version__ = "0.1.0"
