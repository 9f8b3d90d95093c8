import { beforeEach, describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { FrameMsg, ScenarioInfo } from "../src/protocol.js";
import {
  GRIP_SEND_MIN_INTERVAL_MS,
  REACH_RADIUS_M,
  STALE_AFTER_MS,
  screenToWorld,
  ViewModel,
  Viewport,
  worldToScreen,
  wrapAngle,
} from "../src/state.js";

const fixtureLines = readFileSync(
  join(__dirname, "fixtures", "sample_frames.jsonl"),
  "utf-8",
).trim().split("\n");

function fixtureFrame(i: number): FrameMsg {
  const obj = JSON.parse(fixtureLines[i]);
  obj.type = "frame";
  obj.seq = obj.tick;
  obj.server_time = 0;
  return obj as FrameMsg;
}

const scenario: ScenarioInfo = {
  joystick: { k_v: [4, 4, 1, 1], z_d: 1.5, yaw_d: 0, angle_lim: 0.03, z_lim: 0.05, yaw_lim: 0.05 },
  tether: { rest_length: 0.5, attach_offset: 0.05 },
  feedback: { d_warn: 1.0 },
  obstacles: [],
  deployTarget: [0, 0, 1.5],
};

let model: ViewModel;
beforeEach(() => {
  model = new ViewModel(scenario);
});

describe("command readout equals frame fields", () => {
  it("matches verbatim for all 100 sampled frames", () => {
    for (let i = 0; i < fixtureLines.length; i++) {
      const raw = JSON.parse(fixtureLines[i]);
      model.applyFrame(fixtureFrame(i), 0);
      const readout = model.commandReadout()!;
      expect(readout.v_x).toBe(raw.command.v_x);
      expect(readout.v_y).toBe(raw.command.v_y);
      expect(readout.v_z).toBe(raw.command.v_z);
      expect(readout.alpha).toBe(raw.command.alpha);
      expect(model.batteryReadout()).toBe(raw.battery);
      expect(model.modeReadout()).toBe(raw.mode);
    }
  });
});

describe("staleness", () => {
  it("greys the view after one second without frames", () => {
    model.applyFrame(fixtureFrame(0), 1000);
    expect(model.isStale(1000 + STALE_AFTER_MS)).toBe(false);
    expect(model.isStale(1001 + STALE_AFTER_MS)).toBe(true);
  });

  it("never stale before the first frame", () => {
    expect(model.isStale(1e9)).toBe(false);
  });
});

describe("controls gating", () => {
  it("disabled while disconnected and in terminal modes", () => {
    model.applyFrame(fixtureFrame(40), 0);
    model.connection = "open";
    expect(model.controlsEnabled(10)).toBe(true);
    model.connection = "closed";
    expect(model.controlsEnabled(10)).toBe(false);
    model.connection = "open";
    const emergency = { ...fixtureFrame(40), mode: "Emergency" as const };
    model.applyFrame(emergency, 0);
    expect(model.controlsEnabled(10)).toBe(false);
  });
});

describe("deadzone dial", () => {
  it("reports per-axis deviations against their limits", () => {
    const f = fixtureFrame(60); // mid-pull: pitch channel open
    model.applyFrame(f, 0);
    const zones = model.deadzones()!;
    expect(zones).toHaveLength(4);
    expect(zones[0].value).toBe(-f.leader.pitch);
    expect(zones[0].limit).toBe(scenario.joystick.angle_lim);
    const cmdActive = f.command.v_x !== 0;
    expect(zones[0].open).toBe(cmdActive);
  });
});

describe("grip dragging", () => {
  it("top view keeps the last side-view z", () => {
    model.dragTo("side", 0.2, 1.2);
    const p = model.dragTo("top", 0.3, 0.1);
    expect(p[2]).toBeCloseTo(1.2, 10);
    expect(p[0]).toBeCloseTo(0.3, 10);
    expect(p[1]).toBeCloseTo(0.1, 10);
  });

  it("side view keeps the current y", () => {
    model.dragTo("top", 0.2, 0.4);
    const p = model.dragTo("side", 0.25, 1.1);
    expect(p[1]).toBeCloseTo(0.4, 10);
  });

  it("clamps to the reach sphere around the rest grip point", () => {
    const rest = model.restGripPoint();
    const p = model.dragTo("top", rest[0] + 5.0, rest[1]);
    const d = Math.hypot(p[0] - rest[0], p[1] - rest[1], p[2] - rest[2]);
    expect(d).toBeLessThanOrEqual(REACH_RADIUS_M + 1e-12);
  });

  it("release clears the drag but keeps the last point", () => {
    model.dragTo("top", 0.3, 0.0);
    model.release();
    expect(model.drag.active).toBe(false);
  });
});

describe("grip send throttle", () => {
  it("allows at most one message per interval", () => {
    expect(model.shouldSendGrip(0)).toBe(true);
    expect(model.shouldSendGrip(GRIP_SEND_MIN_INTERVAL_MS - 1)).toBe(false);
    expect(model.shouldSendGrip(GRIP_SEND_MIN_INTERVAL_MS + 1)).toBe(true);
  });

  it("caps a 1 kHz pointer stream at 30 Hz", () => {
    let sent = 0;
    for (let ms = 0; ms < 1000; ms++) {
      if (model.shouldSendGrip(ms)) sent++;
    }
    expect(sent).toBeLessThanOrEqual(30);
    expect(sent).toBeGreaterThanOrEqual(28);
  });
});

describe("vibro pulses", () => {
  it("pulse decays after the hold time", () => {
    const f = fixtureFrame(0);
    const withVibro: FrameMsg = {
      ...f,
      vibro: [{ t_start: f.t, duration: 0.1, cause: "proximity", amplitude: 1.0 }],
    };
    model.applyFrame(withVibro, 5000);
    expect(model.vibroPulseActive("proximity", 5100)).toBe(true);
    expect(model.vibroPulseActive("proximity", 5600)).toBe(false);
    expect(model.vibroPulseActive("battery", 5100)).toBe(false);
  });
});

describe("tether slack indication", () => {
  it("taut only when held and stretched past rest length", () => {
    const f = fixtureFrame(0);
    const slackHeld: FrameMsg = {
      ...f,
      grip: { pos: [f.leader.pos[0], f.leader.pos[1], f.leader.pos[2] - 0.3], twist: 0, held: true },
    };
    model.applyFrame(slackHeld, 0);
    expect(model.tetherTaut()).toBe(false);
    const tautHeld: FrameMsg = {
      ...f,
      grip: { pos: [f.leader.pos[0] + 0.8, f.leader.pos[1], f.leader.pos[2]], twist: 0, held: true },
    };
    model.applyFrame(tautHeld, 0);
    expect(model.tetherTaut()).toBe(true);
    const released: FrameMsg = { ...tautHeld, grip: { ...tautHeld.grip, held: false } };
    model.applyFrame(released, 0);
    expect(model.tetherTaut()).toBe(false);
  });
});

describe("viewport math", () => {
  const vp: Viewport = { x0: -3, x1: 8, v0: -5, v1: 5, widthPx: 640, heightPx: 580 };

  it("round-trips world <-> screen", () => {
    for (const [x, v] of [[-3, -5], [8, 5], [0, 0], [2.5, 1.3]] as const) {
      const [sx, sy] = worldToScreen(vp, x, v);
      const [bx, bv] = screenToWorld(vp, sx, sy);
      expect(bx).toBeCloseTo(x, 9);
      expect(bv).toBeCloseTo(v, 9);
    }
  });

  it("screen y is flipped", () => {
    const [, syLow] = worldToScreen(vp, 0, -5);
    const [, syHigh] = worldToScreen(vp, 0, 5);
    expect(syLow).toBe(580);
    expect(syHigh).toBe(0);
  });
});

describe("wrapAngle", () => {
  it("maps into (-pi, pi]", () => {
    expect(wrapAngle(3 * Math.PI)).toBeCloseTo(Math.PI, 12);
    expect(wrapAngle(-Math.PI)).toBeCloseTo(Math.PI, 12);
    expect(wrapAngle(0.3)).toBeCloseTo(0.3, 12);
  });
});
