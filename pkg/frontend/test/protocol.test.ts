import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import {
  encodeEstop,
  encodeGrip,
  encodePause,
  encodeResume,
  parseScenarioInfo,
  parseServerMsg,
} from "../src/protocol.js";

const fixture = readFileSync(
  join(__dirname, "fixtures", "sample_frames.jsonl"),
  "utf-8",
).trim().split("\n");

function asFrameText(line: string): string {
  const obj = JSON.parse(line);
  obj.type = "frame";
  obj.seq = obj.tick;
  obj.server_time = 0;
  return JSON.stringify(obj);
}

describe("parseServerMsg", () => {
  it("parses every fixture frame", () => {
    for (const line of fixture) {
      const msg = parseServerMsg(asFrameText(line));
      expect(msg.type).toBe("frame");
    }
  });

  it("preserves numeric fields exactly", () => {
    const raw = JSON.parse(fixture[50]);
    const msg = parseServerMsg(asFrameText(fixture[50]));
    if (msg.type !== "frame") throw new Error("expected frame");
    expect(msg.command.v_x).toBe(raw.command.v_x);
    expect(msg.leader.pitch).toBe(raw.leader.pitch);
    expect(msg.battery).toBe(raw.battery);
  });

  it("parses error messages", () => {
    expect(parseServerMsg('{"type":"error","error":"occupied"}')).toEqual({
      type: "error",
      error: "occupied",
    });
  });

  it("rejects garbage", () => {
    expect(() => parseServerMsg("{nope")).toThrow();
    expect(() => parseServerMsg('{"type":"mystery"}')).toThrow();
    expect(() => parseServerMsg('{"type":"frame","seq":1}')).toThrow();
  });
});

describe("client encoding", () => {
  it("grip messages match the wire schema", () => {
    const text = encodeGrip([0.5, 0.0, 1.2], 0.01, true);
    expect(JSON.parse(text)).toEqual({
      type: "grip",
      pos: [0.5, 0.0, 1.2],
      twist: 0.01,
      held: true,
    });
  });

  it("control messages match the wire schema", () => {
    expect(JSON.parse(encodeEstop())).toEqual({ type: "estop" });
    expect(JSON.parse(encodePause())).toEqual({ type: "pause" });
    expect(JSON.parse(encodeResume())).toEqual({ type: "resume" });
  });
});

describe("parseScenarioInfo", () => {
  it("extracts what the console needs", () => {
    const doc = {
      joystick: { k_v: [4, 4, 1, 1], z_d: 1.5, yaw_d: 0, angle_lim: 0.03, z_lim: 0.05, yaw_lim: 0.05 },
      tether: { rest_length: 0.5, stiffness: 20, damping: 1, attach_offset: 0.05, twist_max: 0.02 },
      feedback: { d_warn: 1.0, b_warn: 0.2, impulse_len: 0.1, impulse_gap: 0.4, amplitude: 1.0 },
      sim: { dt: 0.01, duration: 10, obstacles: [{ center: [1, 2, 3], radius: 0.5 }], deploy_target: [0, 0, 1.5] },
      safety: {}, leader: {}, fleet: [],
    };
    const info = parseScenarioInfo(doc);
    expect(info.joystick.angle_lim).toBe(0.03);
    expect(info.tether.rest_length).toBe(0.5);
    expect(info.obstacles).toEqual([{ center: [1, 2, 3], radius: 0.5 }]);
    expect(info.deployTarget).toEqual([0, 0, 1.5]);
  });
});
