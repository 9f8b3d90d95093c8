"""Vibrotactile alarm scheduling for the handgrip.

Two alarm causes: an obstacle closer than the warning distance to any
follower, and a battery level under the warning fraction. While a cause
stays active the grip pulses periodically: a fixed-length impulse, then
a refractory gap, independently per cause.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Tuple

from .fleet import Follower
from .model import ConfigError, Vec3, require_finite

PROXIMITY = "proximity"
BATTERY = "battery"
CAUSES = (PROXIMITY, BATTERY)

# Absorbs float rounding of tick-grid times so a period of
# impulse_len + impulse_gap never slips by one tick.
SCHED_EPS = 1e-9


@dataclass(frozen=True)
class FeedbackConfig:
    d_warn: float
    b_warn: float
    impulse_len: float
    impulse_gap: float
    amplitude: float

    def __post_init__(self) -> None:
        for name in ("d_warn", "b_warn", "impulse_len", "impulse_gap", "amplitude"):
            object.__setattr__(self, name, require_finite(name, getattr(self, name)))
        if self.d_warn <= 0:
            raise ConfigError(f"d_warn must be > 0, got {self.d_warn}")
        if not 0.0 <= self.b_warn <= 1.0:
            raise ConfigError(f"b_warn must be in [0, 1], got {self.b_warn}")
        if self.impulse_len <= 0:
            raise ConfigError(f"impulse_len must be > 0, got {self.impulse_len}")
        if self.impulse_gap < 0:
            raise ConfigError(f"impulse_gap must be >= 0, got {self.impulse_gap}")
        if not 0.0 < self.amplitude <= 1.0:
            raise ConfigError(f"amplitude must be in (0, 1], got {self.amplitude}")

    def to_dict(self) -> dict:
        return {
            "d_warn": self.d_warn,
            "b_warn": self.b_warn,
            "impulse_len": self.impulse_len,
            "impulse_gap": self.impulse_gap,
            "amplitude": self.amplitude,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "FeedbackConfig":
        return cls(**{k: d[k] for k in (
            "d_warn", "b_warn", "impulse_len", "impulse_gap", "amplitude"
        )})


@dataclass(frozen=True)
class VibroEvent:
    t_start: float
    duration: float
    cause: str
    amplitude: float

    def __post_init__(self) -> None:
        if self.cause not in CAUSES:
            raise ConfigError(f"unknown vibro cause {self.cause!r}")
        object.__setattr__(self, "t_start", require_finite("t_start", self.t_start))
        object.__setattr__(self, "duration", require_finite("duration", self.duration))
        object.__setattr__(self, "amplitude", require_finite("amplitude", self.amplitude))

    def to_dict(self) -> dict:
        return {
            "t_start": self.t_start,
            "duration": self.duration,
            "cause": self.cause,
            "amplitude": self.amplitude,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "VibroEvent":
        return cls(
            t_start=d["t_start"],
            duration=d["duration"],
            cause=d["cause"],
            amplitude=d["amplitude"],
        )


def proximity_alarm(
    fleet: Sequence[Follower],
    obstacles: Sequence["tuple[Vec3, float]"],
    d_warn: float,
) -> bool:
    """True when any follower's clearance to any obstacle drops under d_warn."""
    for center, radius in obstacles:
        if radius < 0:
            raise ConfigError(f"obstacle radius must be >= 0, got {radius}")
        cx, cy, cz = center
        for f in fleet:
            dx = f.position[0] - cx
            dy = f.position[1] - cy
            dz = f.position[2] - cz
            if math.sqrt(dx * dx + dy * dy + dz * dz) - radius < d_warn:
                return True
    return False


def battery_alarm(level: float, b_warn: float) -> bool:
    """True when the battery fraction is strictly under the warning level."""
    if not 0.0 <= level <= 1.0:
        raise ConfigError(f"battery level must be in [0, 1], got {level}")
    return level < b_warn


def schedule_impulses(
    alarms: Iterable[str],
    now: float,
    last_end: Mapping[str, float],
    cfg: FeedbackConfig,
) -> "tuple[Tuple[VibroEvent, ...], dict[str, float]]":
    """Emit one impulse per active, non-refractory cause.

    A cause fires when its previous impulse ended at least impulse_gap
    ago, giving a continuously active alarm a train with period
    impulse_len + impulse_gap. Returns the events plus the updated
    per-cause end-time map; no hidden state.
    """
    if now < 0:
        raise ConfigError(f"now must be >= 0, got {now}")
    active = set(alarms)
    events = []
    new_last = dict(last_end)
    for cause in CAUSES:
        if cause not in active:
            continue
        prev_end = new_last.get(cause, -math.inf)
        if now + SCHED_EPS >= prev_end + cfg.impulse_gap:
            events.append(VibroEvent(now, cfg.impulse_len, cause, cfg.amplitude))
            new_last[cause] = now + cfg.impulse_len
    return tuple(events), new_last
