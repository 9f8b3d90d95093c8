// Canvas rendering for the two viewports. Pure draw-from-state: nothing
// here mutates the view model.

import { FrameMsg, FleetMember, Vec3 } from "./protocol.js";
import { ViewModel, Viewport, worldToScreen } from "./state.js";

export const TOP_WINDOW = { x0: -3, x1: 8, v0: -5, v1: 5 };
export const SIDE_WINDOW = { x0: -3, x1: 8, v0: -0.2, v1: 3.4 };

const COLORS = {
  bg: "#10151c",
  grid: "#1e2733",
  leader: "#5ec8f2",
  tetherTaut: "#e8d178",
  tetherSlack: "#5a6472",
  grip: "#f2a65e",
  quad: "#7ee08a",
  ground: "#c79af2",
  arm: "#f27e9d",
  obstacle: "#d9534f",
  halo: "rgba(217,83,79,0.18)",
};

function viewport(canvas: HTMLCanvasElement, win: { x0: number; x1: number; v0: number; v1: number }): Viewport {
  return { ...win, widthPx: canvas.width, heightPx: canvas.height };
}

function pick(frame: FrameMsg, view: "top" | "side", p: Vec3): [number, number] {
  void frame;
  return view === "top" ? [p[0], p[1]] : [p[0], p[2]];
}

function drawGrid(ctx: CanvasRenderingContext2D, vp: Viewport): void {
  ctx.strokeStyle = COLORS.grid;
  ctx.lineWidth = 1;
  for (let x = Math.ceil(vp.x0); x <= vp.x1; x += 1) {
    const [sx] = worldToScreen(vp, x, vp.v0);
    ctx.beginPath();
    ctx.moveTo(sx, 0);
    ctx.lineTo(sx, vp.heightPx);
    ctx.stroke();
  }
  for (let v = Math.ceil(vp.v0); v <= vp.v1; v += 1) {
    const [, sy] = worldToScreen(vp, vp.x0, v);
    ctx.beginPath();
    ctx.moveTo(0, sy);
    ctx.lineTo(vp.widthPx, sy);
    ctx.stroke();
  }
}

function drawFollower(ctx: CanvasRenderingContext2D, vp: Viewport, view: "top" | "side", f: FleetMember): void {
  const [a, b] = view === "top" ? [f.pos[0], f.pos[1]] : [f.pos[0], f.pos[2]];
  const [sx, sy] = worldToScreen(vp, a, b);
  ctx.save();
  ctx.translate(sx, sy);
  if (f.kind === "quad") {
    ctx.fillStyle = COLORS.quad;
    if (view === "top") ctx.rotate(-f.yaw);
    ctx.beginPath();
    ctx.moveTo(8, 0);
    ctx.lineTo(-6, 5);
    ctx.lineTo(-6, -5);
    ctx.closePath();
    ctx.fill();
  } else if (f.kind === "ground") {
    ctx.fillStyle = COLORS.ground;
    ctx.fillRect(-6, -4, 12, 8);
  } else {
    ctx.fillStyle = COLORS.arm;
    ctx.beginPath();
    ctx.arc(0, 0, 5, 0, 2 * Math.PI);
    ctx.fill();
    if (f.workspace) {
      const [wa, wb] = view === "top"
        ? [f.workspace.min[0], f.workspace.min[1]]
        : [f.workspace.min[0], f.workspace.min[2]];
      const [wc, wd] = view === "top"
        ? [f.workspace.max[0], f.workspace.max[1]]
        : [f.workspace.max[0], f.workspace.max[2]];
      const [x1, y1] = worldToScreen(vp, wa, wb);
      const [x2, y2] = worldToScreen(vp, wc, wd);
      ctx.restore();
      ctx.save();
      ctx.strokeStyle = COLORS.arm;
      ctx.setLineDash([3, 3]);
      ctx.strokeRect(Math.min(x1, x2), Math.min(y1, y2), Math.abs(x2 - x1), Math.abs(y2 - y1));
    }
  }
  ctx.restore();
  if (f.landed) {
    ctx.strokeStyle = "#ffffff55";
    ctx.beginPath();
    ctx.arc(sx, sy, 9, 0, 2 * Math.PI);
    ctx.stroke();
  }
}

export function drawView(
  canvas: HTMLCanvasElement,
  view: "top" | "side",
  model: ViewModel,
  nowMs: number,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const vp = viewport(canvas, view === "top" ? TOP_WINDOW : SIDE_WINDOW);
  ctx.fillStyle = COLORS.bg;
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  drawGrid(ctx, vp);

  const frame = model.frame;
  if (!frame) return;

  for (const o of model.scenario.obstacles) {
    const [a, b] = pick(frame, view, o.center);
    const [sx, sy] = worldToScreen(vp, a, b);
    const scale = vp.widthPx / (vp.x1 - vp.x0);
    ctx.fillStyle = COLORS.halo;
    ctx.beginPath();
    ctx.arc(sx, sy, (o.radius + model.scenario.feedback.d_warn) * scale, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = COLORS.obstacle;
    ctx.beginPath();
    ctx.arc(sx, sy, Math.max(2, o.radius * scale), 0, 2 * Math.PI);
    ctx.fill();
  }

  for (const f of frame.fleet) drawFollower(ctx, vp, view, f);

  // tether: attachment to grip, dashed while slack
  const attach: Vec3 = [
    frame.leader.pos[0],
    frame.leader.pos[1],
    frame.leader.pos[2] - model.scenario.tether.attach_offset,
  ];
  const gripWorld = model.drag.active ? model.drag.world : frame.grip.pos;
  const [ax, ay] = worldToScreen(vp, ...pick(frame, view, attach));
  const [gx, gy] = worldToScreen(vp, ...pick(frame, view, gripWorld));
  ctx.strokeStyle = model.tetherTaut() ? COLORS.tetherTaut : COLORS.tetherSlack;
  ctx.setLineDash(model.tetherTaut() ? [] : [5, 5]);
  ctx.beginPath();
  ctx.moveTo(ax, ay);
  ctx.lineTo(gx, gy);
  ctx.stroke();
  ctx.setLineDash([]);

  // leader with a lean glyph: the bar tips with pitch (side) / roll (top)
  const [lx, ly] = worldToScreen(vp, ...pick(frame, view, frame.leader.pos));
  ctx.save();
  ctx.translate(lx, ly);
  ctx.rotate(view === "side" ? frame.leader.pitch : frame.leader.roll);
  ctx.strokeStyle = COLORS.leader;
  ctx.lineWidth = 4;
  ctx.beginPath();
  ctx.moveTo(-12, 0);
  ctx.lineTo(12, 0);
  ctx.stroke();
  ctx.restore();

  // grip handle; pulses on vibro
  const pulsing =
    model.vibroPulseActive("proximity", nowMs) || model.vibroPulseActive("battery", nowMs);
  ctx.fillStyle = COLORS.grip;
  ctx.beginPath();
  ctx.arc(gx, gy, pulsing ? 10 : 6, 0, 2 * Math.PI);
  ctx.fill();
  if (frame.grip.held || model.drag.active) {
    ctx.strokeStyle = "#ffffff";
    ctx.beginPath();
    ctx.arc(gx, gy, 12, 0, 2 * Math.PI);
    ctx.stroke();
  }

  if (model.isStale(nowMs)) {
    ctx.fillStyle = "rgba(120,120,120,0.55)";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
  }
}
