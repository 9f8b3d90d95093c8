// Console view model: everything the screen shows, derived from frames.
//
// The console holds no simulation truth. Every number on screen is a
// frame field (or pure arithmetic on frame fields for the deadzone
// dial); all world mutations leave through grip / e-stop messages.

import { FrameMsg, ScenarioInfo, Vec3 } from "./protocol.js";

export const STALE_AFTER_MS = 1000;
export const GRIP_SEND_MIN_INTERVAL_MS = 1000 / 30; // <= 30 Hz while dragging
export const REACH_RADIUS_M = 1.0;
export const VIBRO_PULSE_MS = 300;

export type Connection = "connecting" | "open" | "closed";
export type ViewKind = "top" | "side";

export interface DragState {
  active: boolean;
  world: Vec3; // grip position being manipulated, world frame
}

export interface DeadzoneReading {
  value: number;
  limit: number;
  open: boolean;
}

export function wrapAngle(a: number): number {
  let w = a % (2 * Math.PI);
  if (w > Math.PI) w -= 2 * Math.PI;
  if (w <= -Math.PI) w += 2 * Math.PI;
  return w;
}

export class ViewModel {
  frame: FrameMsg | null = null;
  connection: Connection = "connecting";
  lastFrameAt = -Infinity;
  lastGripSentAt = -Infinity;
  drag: DragState = { active: false, world: [0, 0, 0] };
  private gripZ: number; // side-view z persists while the top view drags
  private vibroPulseUntil: { proximity: number; battery: number } = {
    proximity: -Infinity,
    battery: -Infinity,
  };

  constructor(public scenario: ScenarioInfo) {
    this.gripZ = this.restGripPoint()[2];
  }

  restGripPoint(): Vec3 {
    const [x, y, z] = this.scenario.deployTarget;
    return [x, y, z - this.scenario.tether.attach_offset - this.scenario.tether.rest_length];
  }

  applyFrame(frame: FrameMsg, nowMs: number): void {
    this.frame = frame;
    this.lastFrameAt = nowMs;
    for (const ev of frame.vibro) {
      this.vibroPulseUntil[ev.cause] = nowMs + VIBRO_PULSE_MS;
    }
  }

  isStale(nowMs: number): boolean {
    return this.frame !== null && nowMs - this.lastFrameAt > STALE_AFTER_MS;
  }

  // -- command readout: verbatim frame fields --------------------------

  commandReadout(): { v_x: number; v_y: number; v_z: number; alpha: number } | null {
    if (!this.frame) return null;
    const c = this.frame.command;
    return { v_x: c.v_x, v_y: c.v_y, v_z: c.v_z, alpha: c.alpha };
  }

  batteryReadout(): number | null {
    return this.frame ? this.frame.battery : null;
  }

  modeReadout(): string {
    return this.frame ? this.frame.mode : "—";
  }

  controlsEnabled(nowMs: number): boolean {
    if (this.connection !== "open" || !this.frame) return false;
    if (this.isStale(nowMs)) return false;
    return this.frame.mode !== "Emergency" && this.frame.mode !== "Landed";
  }

  // -- deadzone dial: arithmetic on frame fields, display only ---------

  deadzones(): DeadzoneReading[] | null {
    if (!this.frame) return null;
    const joy = this.scenario.joystick;
    const L = this.frame.leader;
    const devs: [number, number][] = [
      [-L.pitch, joy.angle_lim],
      [L.roll, joy.angle_lim],
      [L.pos[2] - joy.z_d, joy.z_lim],
      [wrapAngle(L.yaw - joy.yaw_d), joy.yaw_lim],
    ];
    return devs.map(([value, limit]) => ({
      value,
      limit,
      open: Math.abs(value) > limit,
    }));
  }

  tetherTaut(): boolean {
    if (!this.frame) return false;
    const L = this.frame.leader;
    const g = this.frame.grip;
    const attach: Vec3 = [L.pos[0], L.pos[1], L.pos[2] - this.scenario.tether.attach_offset];
    const dist = Math.hypot(
      g.pos[0] - attach[0],
      g.pos[1] - attach[1],
      g.pos[2] - attach[2],
    );
    return g.held && dist > this.scenario.tether.rest_length;
  }

  vibroPulseActive(cause: "proximity" | "battery", nowMs: number): boolean {
    return nowMs < this.vibroPulseUntil[cause];
  }

  // -- grip dragging ----------------------------------------------------

  /** Clamp a candidate grip point into the operator's reach sphere. */
  clampToReach(p: Vec3): Vec3 {
    const rest = this.restGripPoint();
    const d: Vec3 = [p[0] - rest[0], p[1] - rest[1], p[2] - rest[2]];
    const len = Math.hypot(d[0], d[1], d[2]);
    if (len <= REACH_RADIUS_M) return p;
    const s = REACH_RADIUS_M / len;
    return [rest[0] + d[0] * s, rest[1] + d[1] * s, rest[2] + d[2] * s];
  }

  /** Begin or continue a drag from a world-space point in one view. */
  dragTo(view: ViewKind, a: number, b: number): Vec3 {
    // top view supplies (x, y) and keeps the last side-view z;
    // side view supplies (x, z) and keeps the current y
    const current = this.drag.active ? this.drag.world : this.restGripPoint();
    let candidate: Vec3;
    if (view === "top") {
      candidate = [a, b, this.gripZ];
    } else {
      candidate = [a, current[1], b];
    }
    const clamped = this.clampToReach(candidate);
    this.gripZ = clamped[2];
    this.drag = { active: true, world: clamped };
    return clamped;
  }

  release(): void {
    this.drag = { active: false, world: this.drag.world };
  }

  /** Rate limiter for outgoing grip messages. */
  shouldSendGrip(nowMs: number): boolean {
    if (nowMs - this.lastGripSentAt < GRIP_SEND_MIN_INTERVAL_MS) return false;
    this.lastGripSentAt = nowMs;
    return true;
  }
}

// -- viewport math (pure; shared by rendering and pointer handling) -----

export interface Viewport {
  // world window
  x0: number;
  x1: number;
  v0: number; // y (top view) or z (side view), at the BOTTOM of the canvas
  v1: number;
  widthPx: number;
  heightPx: number;
}

export function worldToScreen(vp: Viewport, x: number, v: number): [number, number] {
  const sx = ((x - vp.x0) / (vp.x1 - vp.x0)) * vp.widthPx;
  const sy = vp.heightPx - ((v - vp.v0) / (vp.v1 - vp.v0)) * vp.heightPx;
  return [sx, sy];
}

export function screenToWorld(vp: Viewport, sx: number, sy: number): [number, number] {
  const x = vp.x0 + (sx / vp.widthPx) * (vp.x1 - vp.x0);
  const v = vp.v0 + ((vp.heightPx - sy) / vp.heightPx) * (vp.v1 - vp.v0);
  return [x, v];
}
