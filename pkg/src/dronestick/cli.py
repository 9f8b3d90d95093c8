"""Command-line front end, a thin client over the HTTP service.

Subcommands go through the same FastAPI routes the network sees; without
--url they ride an in-process ASGI transport so no server is needed. All
output is one JSON object per line; failures exit 1 with {"ok": false}.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from typing import Optional

import httpx

from .service import create_app


def _call(method: str, path: str, payload: Optional[dict], url: Optional[str]) -> httpx.Response:
    if url:
        with httpx.Client(base_url=url, timeout=120.0) as client:
            return client.request(method, path, json=payload)

    async def _go() -> httpx.Response:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport, base_url="http://dronestick") as client:
            return await client.request(method, path, json=payload)

    return asyncio.run(_go())


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True))


def _fail(message: str) -> int:
    _emit({"ok": False, "error": message})
    return 1


def _resolve_log_path(out: str) -> str:
    log_dir = os.environ.get("DRONESTICK_LOG_DIR")
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        return os.path.join(log_dir, os.path.basename(out))
    return out


def cmd_simulate(args) -> int:
    try:
        doc = _load_json(args.scenario)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read scenario: {exc}")
    resp = _call("POST", "/simulate", {"scenario": doc}, args.url)
    if resp.status_code != 200:
        return _fail(resp.json().get("detail", resp.text))
    body = resp.json()
    out = _resolve_log_path(args.out)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(body["log"]) + "\n")
    _emit(
        {
            "ok": True,
            "frames": body["frames"],
            "scenario_hash": body["scenario_hash"],
            "final_mode": body["final_mode"],
            "log": out,
        }
    )
    return 0


def cmd_replay(args) -> int:
    try:
        doc = _load_json(args.scenario)
        with open(args.log, "r", encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read inputs: {exc}")
    resp = _call("POST", "/replay", {"scenario": doc, "log": lines}, args.url)
    if resp.status_code != 200:
        return _fail(resp.json().get("detail", resp.text))
    body = resp.json()
    _emit(
        {
            "ok": body["match"],
            "match": body["match"],
            "divergent_tick": body["divergent_tick"],
            "frames_checked": body["frames_checked"],
            "summary": body["detail"],
        }
    )
    return 0 if body["match"] else 1


def cmd_validate(args) -> int:
    try:
        doc = _load_json(args.scenario)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read scenario: {exc}")
    resp = _call("POST", "/validate", {"scenario": doc}, args.url)
    if resp.status_code != 200:
        return _fail(resp.json().get("detail", resp.text))
    body = resp.json()
    if not body["valid"]:
        return _fail(body["error"])
    _emit(
        {
            "ok": True,
            "scenario_hash": body["scenario_hash"],
            "ticks": body["ticks"],
            "fleet_size": body["fleet_size"],
        }
    )
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    try:
        doc = _load_json(args.scenario)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read scenario: {exc}")
    log_path = None
    log_dir = os.environ.get("DRONESTICK_LOG_DIR")
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        log_path = os.path.join(log_dir, "live_session.jsonl")
    _emit({"ok": True, "serving": True, "port": args.port, "hz": args.hz, "log": log_path})
    serve(doc, port=args.port, stream_hz=args.hz, host=args.host, log_path=log_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dronestick")
    parser.add_argument("--url", help="target a running service instead of in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario headless and write the log")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="verify a log reproduces bit-exactly")
    p.add_argument("--log", required=True)
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the live gateway")
    p.add_argument("--scenario", required=True)
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--hz", type=float, default=50.0)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("validate", help="schema and invariant check a scenario file")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except httpx.HTTPError as exc:
        return _fail(f"service unreachable: {exc}")


if __name__ == "__main__":
    sys.exit(main())
