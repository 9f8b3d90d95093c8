"""HTTP/WebSocket service wrapping the simulator.

REST endpoints run scenarios headless (simulate / validate / replay);
the /ws endpoint is the live operator channel: UTF-8 JSON text messages,
one connection at a time, frames streamed at the configured rate.
"""

from __future__ import annotations

import asyncio
import json
from contextlib import asynccontextmanager
from typing import List, Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .engine import Log, ReplayMismatch, SimulationFault, replay, run
from .gateway import LiveSession, parse_inbound
from .model import ConfigError
from .scenario import Scenario, scenario_from_doc

WS_POLL_S = 0.005


class SimulateRequest(BaseModel):
    scenario: dict


class SimulateResponse(BaseModel):
    frames: int
    scenario_hash: str
    final_mode: str
    log: List[str]


class ValidateRequest(BaseModel):
    scenario: dict


class ValidateResponse(BaseModel):
    valid: bool
    error: Optional[str] = None
    scenario_hash: Optional[str] = None
    ticks: Optional[int] = None
    fleet_size: Optional[int] = None


class ReplayRequest(BaseModel):
    scenario: dict
    log: List[str]


class ReplayResponse(BaseModel):
    match: bool
    divergent_tick: Optional[int]
    frames_checked: int
    detail: str


def _parse_scenario(doc: dict) -> Scenario:
    try:
        return scenario_from_doc(doc)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def create_app(
    scenario_doc: Optional[dict] = None,
    stream_hz: float = 50.0,
    pace: float = 1.0,
    log_path: Optional[str] = None,
) -> FastAPI:
    """Build the service; a scenario_doc starts a live session with it."""

    session: Optional[LiveSession] = None
    if scenario_doc is not None:
        live_scenario = scenario_from_doc(scenario_doc)
        session = LiveSession(live_scenario, stream_hz=stream_hz, pace=pace, log_path=log_path)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if session is not None:
            session.start()
        yield
        if session is not None:
            session.stop()

    app = FastAPI(title="dronestick", lifespan=lifespan)
    app.state.session = session

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest) -> SimulateResponse:
        scenario = _parse_scenario(req.scenario)
        try:
            log = run(scenario)
        except SimulationFault as exc:
            raise HTTPException(status_code=500, detail=str(exc))
        final_mode = log.frames[-1].mode.value if log.frames else "Docked"
        return SimulateResponse(
            frames=len(log.frames),
            scenario_hash=scenario.hash(),
            final_mode=final_mode,
            log=log.dumps().splitlines(),
        )

    @app.post("/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest) -> ValidateResponse:
        try:
            scenario = scenario_from_doc(req.scenario)
        except ConfigError as exc:
            return ValidateResponse(valid=False, error=str(exc))
        return ValidateResponse(
            valid=True,
            scenario_hash=scenario.hash(),
            ticks=scenario.n_ticks(),
            fleet_size=len(scenario.followers),
        )

    @app.post("/replay", response_model=ReplayResponse)
    def replay_endpoint(req: ReplayRequest) -> ReplayResponse:
        scenario = _parse_scenario(req.scenario)
        try:
            log = Log.from_lines(req.log)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        try:
            report = replay(log, scenario)
        except ReplayMismatch as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return ReplayResponse(
            match=report.match,
            divergent_tick=report.divergent_tick,
            frames_checked=report.frames_checked,
            detail=report.detail,
        )

    @app.get("/scenario")
    def get_scenario() -> dict:
        if session is None:
            raise HTTPException(status_code=404, detail="no live scenario")
        return session.scenario.doc

    @app.get("/log", response_class=PlainTextResponse)
    def get_log() -> str:
        if session is None:
            raise HTTPException(status_code=404, detail="no live scenario")
        return session.log_text()

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        send_lock = asyncio.Lock()

        async def send(payload: dict) -> None:
            async with send_lock:
                await websocket.send_text(json.dumps(payload))

        if session is None:
            await send({"type": "error", "error": "no live scenario"})
            await websocket.close(code=1008)
            return
        if not session.attach_client():
            await send({"type": "error", "error": "occupied"})
            await websocket.close(code=1008)
            return

        stop = asyncio.Event()

        async def reader() -> None:
            try:
                while True:
                    text = await websocket.receive_text()
                    try:
                        session.submit(parse_inbound(text))
                    except ValueError as exc:
                        await send({"type": "error", "error": str(exc)})
            except WebSocketDisconnect:
                stop.set()

        reader_task = asyncio.create_task(reader())
        try:
            while not stop.is_set():
                for payload in session.drain_outbound():
                    await send(payload)
                await asyncio.sleep(WS_POLL_S)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            reader_task.cancel()
            session.detach_client()

    return app


def serve(
    scenario_doc: dict,
    port: int,
    stream_hz: float = 50.0,
    host: str = "127.0.0.1",
    log_path: Optional[str] = None,
) -> None:
    """Run the live gateway, wall-clock paced, until interrupted."""
    import uvicorn

    app = create_app(scenario_doc, stream_hz=stream_hz, pace=1.0, log_path=log_path)
    uvicorn.run(app, host=host, port=port, log_level="warning")
