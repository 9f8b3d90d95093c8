// Wire types for the gateway: JSON text messages, one object each way.

export type Vec3 = [number, number, number];

export interface LeaderFields {
  pos: Vec3;
  vel: Vec3;
  pitch: number;
  roll: number;
  yaw: number;
  yaw_rate: number;
}

export interface CommandFields {
  v_x: number;
  v_y: number;
  v_z: number;
  alpha: number;
}

export interface FleetMember {
  id: number;
  kind: "quad" | "ground" | "arm";
  pos: Vec3;
  yaw: number;
  offset: Vec3;
  workspace: { min: Vec3; max: Vec3 } | null;
  landed: boolean;
}

export interface VibroField {
  t_start: number;
  duration: number;
  cause: "proximity" | "battery";
  amplitude: number;
}

export interface FrameMsg {
  type: "frame";
  seq: number;
  server_time: number;
  tick: number;
  t: number;
  mode: "Docked" | "Deploying" | "Active" | "Emergency" | "Landed";
  leader: LeaderFields;
  grip: { pos: Vec3; twist: number; held: boolean };
  live_grip: boolean;
  command: CommandFields;
  fleet: FleetMember[];
  vibro: VibroField[];
  battery: number;
}

export interface ErrorMsg {
  type: "error";
  error: string;
}

export type ServerMsg = FrameMsg | ErrorMsg;

function isVec3(v: unknown): v is Vec3 {
  return Array.isArray(v) && v.length === 3 && v.every((c) => typeof c === "number");
}

export function parseServerMsg(text: string): ServerMsg {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new Error("server sent unparseable JSON");
  }
  const msg = raw as Record<string, unknown>;
  if (msg.type === "error" && typeof msg.error === "string") {
    return { type: "error", error: msg.error };
  }
  if (msg.type !== "frame") {
    throw new Error(`unknown server message type: ${String(msg.type)}`);
  }
  const frame = msg as unknown as FrameMsg;
  if (
    typeof frame.seq !== "number" ||
    typeof frame.t !== "number" ||
    typeof frame.mode !== "string" ||
    typeof frame.battery !== "number" ||
    !isVec3(frame.leader?.pos) ||
    !isVec3(frame.grip?.pos) ||
    typeof frame.command?.v_x !== "number" ||
    !Array.isArray(frame.fleet) ||
    !Array.isArray(frame.vibro)
  ) {
    throw new Error("frame message missing required fields");
  }
  return frame;
}

export function encodeGrip(pos: Vec3, twist: number, held: boolean): string {
  return JSON.stringify({ type: "grip", pos, twist, held });
}

export function encodeEstop(): string {
  return JSON.stringify({ type: "estop" });
}

export function encodePause(): string {
  return JSON.stringify({ type: "pause" });
}

export function encodeResume(): string {
  return JSON.stringify({ type: "resume" });
}

// Scenario document subset the console needs (fetched once from /scenario).
export interface ScenarioInfo {
  joystick: {
    k_v: [number, number, number, number];
    z_d: number;
    yaw_d: number;
    angle_lim: number;
    z_lim: number;
    yaw_lim: number;
  };
  tether: { rest_length: number; attach_offset: number };
  feedback: { d_warn: number };
  obstacles: { center: Vec3; radius: number }[];
  deployTarget: Vec3;
}

export function parseScenarioInfo(doc: Record<string, any>): ScenarioInfo {
  const sim = doc.sim ?? {};
  const joy = doc.joystick;
  return {
    joystick: {
      k_v: joy.k_v,
      z_d: joy.z_d,
      yaw_d: joy.yaw_d,
      angle_lim: joy.angle_lim,
      z_lim: joy.z_lim,
      yaw_lim: joy.yaw_lim,
    },
    tether: {
      rest_length: doc.tether.rest_length,
      attach_offset: doc.tether.attach_offset,
    },
    feedback: { d_warn: doc.feedback.d_warn },
    obstacles: (sim.obstacles ?? []).map((o: any) => ({
      center: o.center as Vec3,
      radius: o.radius as number,
    })),
    deployTarget: (sim.deploy_target ?? [0, 0, joy.z_d]) as Vec3,
  };
}
