// Console bootstrap: wire the gateway stream, pointer input and the
// render loop together.

import { encodeEstop, encodeGrip, parseScenarioInfo } from "./protocol.js";
import { connect, gatewayUrl, GatewayClient } from "./net.js";
import { screenToWorld, ViewModel, Viewport } from "./state.js";
import { drawView, SIDE_WINDOW, TOP_WINDOW } from "./view.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const urls = gatewayUrl();
  const scenarioDoc = await (await fetch(`${urls.http}/scenario`)).json();
  const model = new ViewModel(parseScenarioInfo(scenarioDoc));

  const topCanvas = el<HTMLCanvasElement>("view-top");
  const sideCanvas = el<HTMLCanvasElement>("view-side");
  const banner = el<HTMLDivElement>("banner");
  const modeBadge = el<HTMLSpanElement>("mode");
  const batteryBar = el<HTMLDivElement>("battery-fill");
  const batteryLabel = el<HTMLSpanElement>("battery-label");
  const readout = el<HTMLDivElement>("readout");
  const dial = el<HTMLDivElement>("deadzones");
  const vibroBox = el<HTMLDivElement>("vibro");
  const estopBtn = el<HTMLButtonElement>("estop");

  let client: GatewayClient | null = null;

  function showBanner(text: string, cls: string): void {
    banner.textContent = text;
    banner.className = `banner ${cls}`;
    banner.style.display = text ? "block" : "none";
  }

  function open(): void {
    client = connect(urls.ws, {
      onOpen: () => {
        model.connection = "open";
        showBanner("", "");
      },
      onMessage: (msg) => {
        if (msg.type === "error") {
          showBanner(msg.error === "occupied" ? "Gateway occupied by another operator" : msg.error, "warn");
          return;
        }
        model.applyFrame(msg, performance.now());
        if (msg.vibro.length > 0 && "vibrate" in navigator) {
          navigator.vibrate(msg.vibro[0].duration * 1000);
        }
      },
      onClose: () => {
        model.connection = "closed";
        showBanner("Connection lost — controls disabled", "error");
        setTimeout(open, 2000);
      },
    });
  }
  open();

  // -- pointer-driven grip ---------------------------------------------

  function viewportFor(view: "top" | "side", canvas: HTMLCanvasElement): Viewport {
    const win = view === "top" ? TOP_WINDOW : SIDE_WINDOW;
    return { ...win, widthPx: canvas.width, heightPx: canvas.height };
  }

  function sendGrip(held: boolean, force = false): void {
    if (!client) return;
    const now = performance.now();
    if (force || model.shouldSendGrip(now)) {
      client.send(encodeGrip(model.drag.world, 0.0, held));
    }
  }

  function attachDrag(view: "top" | "side", canvas: HTMLCanvasElement): void {
    canvas.addEventListener("pointerdown", (e) => {
      if (!model.controlsEnabled(performance.now())) return;
      canvas.setPointerCapture(e.pointerId);
      const rect = canvas.getBoundingClientRect();
      const [a, b] = screenToWorld(
        viewportFor(view, canvas),
        ((e.clientX - rect.left) / rect.width) * canvas.width,
        ((e.clientY - rect.top) / rect.height) * canvas.height,
      );
      model.dragTo(view, a, b);
      sendGrip(true, true);
    });
    canvas.addEventListener("pointermove", (e) => {
      if (!model.drag.active) return;
      const rect = canvas.getBoundingClientRect();
      const [a, b] = screenToWorld(
        viewportFor(view, canvas),
        ((e.clientX - rect.left) / rect.width) * canvas.width,
        ((e.clientY - rect.top) / rect.height) * canvas.height,
      );
      model.dragTo(view, a, b);
      sendGrip(true);
    });
    const end = () => {
      if (!model.drag.active) return;
      model.release();
      sendGrip(false, true); // release is never throttled
    };
    canvas.addEventListener("pointerup", end);
    canvas.addEventListener("pointercancel", end);
  }
  attachDrag("top", topCanvas);
  attachDrag("side", sideCanvas);

  estopBtn.addEventListener("click", () => {
    if (client) client.send(encodeEstop());
  });

  // -- render loop --------------------------------------------------------

  function renderPanels(now: number): void {
    modeBadge.textContent = model.modeReadout();
    modeBadge.className = `badge mode-${model.modeReadout().toLowerCase()}`;
    if (model.frame?.mode === "Emergency") {
      showBanner("EMERGENCY — motors cut, fleet landing", "error");
    }

    const battery = model.batteryReadout();
    if (battery !== null) {
      batteryBar.style.width = `${(battery * 100).toFixed(1)}%`;
      batteryLabel.textContent = `${(battery * 100).toFixed(0)}%`;
    }

    const cmd = model.commandReadout();
    readout.textContent = cmd
      ? `vx ${cmd.v_x.toFixed(3)}  vy ${cmd.v_y.toFixed(3)}  ` +
        `vz ${cmd.v_z.toFixed(3)}  yaw ${cmd.alpha.toFixed(3)}`
      : "awaiting frames";

    const zones = model.deadzones();
    if (zones) {
      const names = ["pitch", "roll", "alt", "yaw"];
      dial.innerHTML = zones
        .map((z, i) => {
          const frac = Math.min(1, Math.abs(z.value) / (z.limit * 3 || 1));
          const cls = z.open ? "zone open" : "zone";
          return `<div class="${cls}"><span>${names[i]}</span>` +
            `<div class="zone-bar"><div style="width:${(frac * 100).toFixed(0)}%"></div></div></div>`;
        })
        .join("");
    }

    const prox = model.vibroPulseActive("proximity", now);
    const batt = model.vibroPulseActive("battery", now);
    vibroBox.textContent = prox ? "VIBRO: obstacle" : batt ? "VIBRO: battery" : "";
    vibroBox.className = prox || batt ? "vibro on" : "vibro";

    estopBtn.disabled = !model.controlsEnabled(now);
  }

  function loop(): void {
    const now = performance.now();
    drawView(topCanvas, "top", model, now);
    drawView(sideCanvas, "side", model, now);
    renderPanels(now);
    requestAnimationFrame(loop);
  }
  requestAnimationFrame(loop);
}

boot().catch((err) => {
  document.body.innerHTML = `<pre style="color:#f66">console failed to start: ${err}</pre>`;
});
