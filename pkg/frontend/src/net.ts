// Thin WebSocket wrapper so the rest of the console never touches the
// socket API directly.

import { parseServerMsg, ServerMsg } from "./protocol.js";

export interface GatewayClient {
  send(text: string): void;
  close(): void;
}

export interface GatewayCallbacks {
  onOpen(): void;
  onMessage(msg: ServerMsg): void;
  onClose(): void;
}

export function gatewayUrl(): { ws: string; http: string } {
  const params = new URLSearchParams(window.location.search);
  const host = params.get("host") ?? "127.0.0.1";
  const port = params.get("port") ?? "8000";
  return { ws: `ws://${host}:${port}/ws`, http: `http://${host}:${port}` };
}

export function connect(url: string, callbacks: GatewayCallbacks): GatewayClient {
  const ws = new WebSocket(url);
  ws.onopen = () => callbacks.onOpen();
  ws.onmessage = (event: MessageEvent) => {
    try {
      callbacks.onMessage(parseServerMsg(String(event.data)));
    } catch (err) {
      console.error("bad server message:", err);
    }
  };
  ws.onclose = () => callbacks.onClose();
  ws.onerror = () => ws.close();
  return {
    send: (text: string) => {
      if (ws.readyState === WebSocket.OPEN) ws.send(text);
    },
    close: () => ws.close(),
  };
}
