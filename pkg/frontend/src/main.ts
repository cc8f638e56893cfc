import { SessionClient } from "./client.js";
import { keyboardMap } from "./keyboard.js";
import { renderFrame } from "./render.js";
import { ViewTransform, waypointClick } from "./view.js";
import type { FrameMessage } from "./protocol.js";

const params = new URLSearchParams(window.location.search);
const serverUrl =
  params.get("server") ?? `ws://${window.location.hostname || "127.0.0.1"}:8000/ws`;

const canvas = document.getElementById("chamber") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const logEl = document.getElementById("log")!;

let view = new ViewTransform();
let mode: "manual" | "auto" = "manual";
let flash: string | null = null;
let flashUntil = 0;

function logLine(text: string): void {
  const div = document.createElement("div");
  div.textContent = text;
  logEl.prepend(div);
  while (logEl.childElementCount > 8) {
    logEl.lastElementChild?.remove();
  }
}

const client = new SessionClient(serverUrl, {
  onStatus: (s) => (statusEl.textContent = s),
  onHello: (hello) => {
    view = ViewTransform.fit(hello.geometry, canvas.width, canvas.height);
    mode = hello.mode;
    logLine(`session ${hello.scenario} @ ${hello.frame_rate_hz} Hz`);
  },
  onReply: (reply) => {
    if (reply.type === "error") {
      logLine(`error: ${reply.reason}`);
    } else if (reply.type === "ack" && reply.of === "mode") {
      mode = (reply as { mode?: "manual" | "auto" }).mode ?? mode;
    }
  },
});
client.connect();

// ----- keyboard control (manual mode) -----
window.addEventListener("keydown", (event) => {
  if (event.repeat) return;
  const message = keyboardMap(event.key, true, mode === "manual");
  if (message) {
    client.send(message);
    event.preventDefault();
  }
});
window.addEventListener("keyup", (event) => {
  const message = keyboardMap(event.key, false, mode === "manual");
  if (message) {
    client.send(message);
    event.preventDefault();
  }
});

// ----- waypoint editing on the live view -----
canvas.addEventListener("click", (event) => {
  const frame = client.frames.take();
  if (!client.hello || !frame) return;
  const rect = canvas.getBoundingClientRect();
  const edit = waypointClick(
    event.clientX - rect.left,
    event.clientY - rect.top,
    event.shiftKey,
    view,
    frame.waypoints,
    client.hello.geometry,
  );
  if (edit.kind === "message") {
    client.send(edit.message);
  } else {
    flash = edit.reason;
    flashUntil = performance.now() + 1200;
  }
});

// ----- pan / zoom -----
canvas.addEventListener("wheel", (event) => {
  event.preventDefault();
  const rect = canvas.getBoundingClientRect();
  view.zoomAt(
    event.clientX - rect.left,
    event.clientY - rect.top,
    event.deltaY < 0 ? 1.15 : 1 / 1.15,
  );
});
let dragging: [number, number] | null = null;
canvas.addEventListener("mousedown", (e) => {
  if (e.button === 1 || e.button === 2) dragging = [e.clientX, e.clientY];
});
window.addEventListener("mouseup", () => (dragging = null));
window.addEventListener("mousemove", (e) => {
  if (dragging) {
    view.panBy(e.clientX - dragging[0], e.clientY - dragging[1]);
    dragging = [e.clientX, e.clientY];
  }
});
canvas.addEventListener("contextmenu", (e) => e.preventDefault());

// ----- toolbar -----
function bind(id: string, handler: () => void): void {
  document.getElementById(id)!.addEventListener("click", handler);
}
bind("mode-manual", () => client.send({ type: "mode", mode: "manual" }));
bind("mode-auto", () => client.send({ type: "mode", mode: "auto" }));
bind("run-rolling", () =>
  client.send({ type: "controller", action: "start", kind: "rolling" }),
);
bind("run-steering", () =>
  client.send({ type: "controller", action: "start", kind: "steering" }),
);
bind("run-ortho4", () =>
  client.send({ type: "controller", action: "start", kind: "ortho4" }),
);
bind("stop", () => client.send({ type: "controller", action: "stop" }));
bind("reset", () => client.send({ type: "reset" }));

// ----- render loop: always draw the latest snapshot, skipping stale ones ---
let lastDrawn: FrameMessage | null = null;
function draw(): void {
  const frame = client.frames.take();
  if (client.hello && frame && frame !== lastDrawn) {
    if (flash && performance.now() > flashUntil) flash = null;
    renderFrame(ctx, client.hello, frame, view, flash);
    lastDrawn = frame;
  }
  requestAnimationFrame(draw);
}
requestAnimationFrame(draw);
