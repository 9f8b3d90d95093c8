"""Live operator gateway: message protocol and the paced engine session.

The engine runs in its own thread, connected to network I/O by exactly
two ordered queues: inbound operator messages, drained at the start of
every tick, and an outbound frame buffer capped at 256 entries that
drops oldest first (the stream is a view; the log is the record). One
operator connection at a time; a second one is refused as "occupied".
"""

from __future__ import annotations

import json
import math
import queue
import threading
import time
from collections import deque
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError

from .engine import Frame, TickInputs, initial_world, log_header, tick
from .model import GripInput
from .scenario import Scenario

# Host stalls beyond this pause the scenario instead of fast-forwarding.
MAX_STALL_S = 0.25
OUTBOUND_CAP = 256


class GripMsg(BaseModel):
    type: Literal["grip"]
    pos: "tuple[float, float, float]"
    twist: float = 0.0
    held: bool


class EstopMsg(BaseModel):
    type: Literal["estop"]


class PauseMsg(BaseModel):
    type: Literal["pause"]


class ResumeMsg(BaseModel):
    type: Literal["resume"]


InboundMsg = Annotated[
    Union[GripMsg, EstopMsg, PauseMsg, ResumeMsg], Field(discriminator="type")
]
_INBOUND = TypeAdapter(InboundMsg)


def parse_inbound(text: str):
    """Decode one inbound datagram; raises ValueError on anything malformed."""
    try:
        msg = _INBOUND.validate_json(text)
    except ValidationError as exc:
        raise ValueError(f"malformed message: {exc.errors()[0]['msg']}") from exc
    if isinstance(msg, GripMsg) and not all(math.isfinite(c) for c in (*msg.pos, msg.twist)):
        raise ValueError("malformed message: grip values must be finite")
    return msg


def encode_inbound(msg) -> str:
    return msg.model_dump_json()


def frame_payload(frame: Frame, seq: int, server_time: float) -> dict:
    """Outbound frame message; field names are part of the wire contract."""
    d = frame.to_dict()
    d["type"] = "frame"
    d["seq"] = seq
    d["server_time"] = server_time
    return d


class LiveSession:
    """Owns one scenario run: the engine thread, queues, and the log.

    pace scales wall-clock speed (1.0 = real time, 0 = as fast as
    possible); the tick schedule and the log are identical either way.
    """

    def __init__(
        self,
        scenario: Scenario,
        stream_hz: float = 50.0,
        pace: float = 1.0,
        log_path: Optional[str] = None,
    ):
        self.scenario = scenario
        self.stream_hz = stream_hz
        self.pace = pace
        self.log_path = log_path
        self.decimation = max(1, round(1.0 / (scenario.dt * stream_hz))) if stream_hz > 0 else 1

        self._inbound: "queue.Queue[object]" = queue.Queue()
        self._outbound: "deque[dict]" = deque(maxlen=OUTBOUND_CAP)
        self._out_lock = threading.Lock()
        self._client_lock = threading.Lock()
        self._client_attached = False
        self._stop = threading.Event()
        self._paused = False
        self._thread: Optional[threading.Thread] = None

        self._log_lines: List[str] = []
        self.finished = threading.Event()
        self.error: Optional[BaseException] = None

    # -- client slot ------------------------------------------------------

    def attach_client(self) -> bool:
        with self._client_lock:
            if self._client_attached:
                return False
            self._client_attached = True
            return True

    def detach_client(self) -> None:
        with self._client_lock:
            self._client_attached = False
        # Disconnect policy: the grip is no longer held by anyone.
        self._inbound.put(GripMsg(type="grip", pos=(0.0, 0.0, 0.0), held=False))

    # -- messaging --------------------------------------------------------

    def submit(self, msg) -> None:
        self._inbound.put(msg)

    def drain_outbound(self) -> List[dict]:
        with self._out_lock:
            items = list(self._outbound)
            self._outbound.clear()
        return items

    # -- lifecycle --------------------------------------------------------

    def start(self) -> None:
        self._thread = threading.Thread(target=self._run, name="dronestick-engine", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)

    def log_text(self) -> str:
        head = json.dumps(log_header(self.scenario), sort_keys=True, separators=(",", ":"))
        return "\n".join([head] + self._log_lines) + "\n"

    # -- engine loop ------------------------------------------------------

    def _apply_messages(self, grip_override: Optional[GripInput], estop: bool):
        while True:
            try:
                msg = self._inbound.get_nowait()
            except queue.Empty:
                break
            if isinstance(msg, GripMsg):
                twist_max = self.scenario.tether.twist_max
                twist = max(-twist_max, min(twist_max, msg.twist))
                pos = msg.pos
                if not msg.held and grip_override is not None:
                    # Keep the last position on release so the frame
                    # still shows where the grip was let go.
                    pos = grip_override.position
                grip_override = GripInput(position=pos, yaw_twist=twist, held=msg.held)
            elif isinstance(msg, EstopMsg):
                estop = True
            elif isinstance(msg, PauseMsg):
                self._paused = True
            elif isinstance(msg, ResumeMsg):
                self._paused = False
        return grip_override, estop

    def _run(self) -> None:
        scenario = self.scenario
        log_file = open(self.log_path, "w", encoding="utf-8") if self.log_path else None
        try:
            if log_file:
                log_file.write(
                    json.dumps(log_header(scenario), sort_keys=True, separators=(",", ":")) + "\n"
                )
            world = initial_world(scenario)
            n = scenario.n_ticks()
            grip_override: Optional[GripInput] = None
            estop_pending = False
            tick_wall = scenario.dt / self.pace if self.pace > 0 else 0.0
            next_due = time.monotonic()
            k = 0
            while k < n and not self._stop.is_set():
                grip_override, estop_pending = self._apply_messages(grip_override, estop_pending)
                if self._paused:
                    time.sleep(0.005)
                    next_due = time.monotonic()
                    continue
                world, frame = tick(
                    world, scenario, TickInputs(grip=grip_override, estop=estop_pending)
                )
                estop_pending = False
                k += 1
                line = frame.to_json()
                self._log_lines.append(line)
                if log_file:
                    log_file.write(line + "\n")
                if k % self.decimation == 0:
                    payload = frame_payload(frame, seq=frame.tick, server_time=time.time())
                    with self._out_lock:
                        self._outbound.append(payload)
                if tick_wall > 0.0:
                    next_due += tick_wall
                    delay = next_due - time.monotonic()
                    if delay > 0:
                        time.sleep(delay)
                    elif -delay > MAX_STALL_S:
                        next_due = time.monotonic()  # stalled: pause, don't fast-forward
        except BaseException as exc:  # surfaced via .error; thread must not die silently
            self.error = exc
        finally:
            if log_file:
                log_file.close()
            self.finished.set()
