// Canvas rendering of the top-down chamber view: particle glyphs with focus
// halos, plane badges, the obstacle band, waypoint markers (circle = floor,
// square = ceiling) and the command HUD.

import type { FrameMessage, HelloMessage } from "./protocol.js";
import { ViewTransform } from "./view.js";

const PLANE_COLORS: Record<string, string> = {
  bottom: "#3fa34d",
  lifting: "#e0a83c",
  top: "#3c7fe0",
  descending: "#b05cd6",
};

export function renderFrame(
  ctx: CanvasRenderingContext2D,
  hello: HelloMessage,
  frame: FrameMessage,
  view: ViewTransform,
  flash: string | null,
): void {
  const { width, height } = ctx.canvas;
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, width, height);

  // chamber outline
  const [x0, y0] = view.toScreen(0, hello.geometry.depth_um);
  const [x1, y1] = view.toScreen(hello.geometry.width_um, 0);
  ctx.strokeStyle = "#3a4454";
  ctx.strokeRect(x0, y0, x1 - x0, y1 - y0);

  // obstacle band spans the chamber depth
  const obstacle = hello.geometry.obstacle;
  if (obstacle) {
    const [ox0] = view.toScreen(obstacle.x0_um, 0);
    const [ox1] = view.toScreen(obstacle.x1_um, 0);
    ctx.fillStyle = "rgba(160, 120, 60, 0.35)";
    ctx.fillRect(ox0, y0, ox1 - ox0, y1 - y0);
  }

  // waypoints: circles on the floor, squares on the ceiling
  frame.waypoints.forEach((w, i) => {
    const [px, py] = view.toScreen(w.x_um, w.y_um);
    ctx.strokeStyle = w.plane === "top" ? "#7fb4ff" : "#ffd166";
    ctx.lineWidth = 1.5;
    if (w.plane === "top") {
      ctx.strokeRect(px - 6, py - 6, 12, 12);
    } else {
      ctx.beginPath();
      ctx.arc(px, py, 6, 0, 2 * Math.PI);
      ctx.stroke();
    }
    ctx.fillStyle = "#9aa7b8";
    ctx.font = "10px monospace";
    ctx.fillText(String(i), px + 8, py - 8);
  });

  // cargo dots
  for (const c of frame.cargo) {
    const [px, py] = view.toScreen(c.x, c.y);
    ctx.fillStyle = c.status === "attached" ? "#ff8fa3" : c.status === "lost" ? "#555" : "#d6d6d6";
    ctx.beginPath();
    ctx.arc(px, py, 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }

  // particles with blur halos
  const radiusByName = new Map(hello.particles.map((p) => [p.name, p.radius_um]));
  for (const p of frame.particles) {
    const [px, py] = view.toScreen(p.x, p.y);
    const rPx = Math.max((radiusByName.get(p.name) ?? 5) * view.zoom, 3);
    const halo = rPx * (1 + 2 * p.blur); // defocus grows linearly with height
    const color = PLANE_COLORS[p.plane] ?? "#ccc";
    ctx.fillStyle = color + "33";
    ctx.beginPath();
    ctx.arc(px, py, halo, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = p.controlled ? color : "#8a93a1";
    ctx.beginPath();
    ctx.arc(px, py, rPx, 0, 2 * Math.PI);
    ctx.fill();
    // heading tick
    const h = (p.heading_deg * Math.PI) / 180;
    ctx.strokeStyle = "#fff";
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(px + Math.cos(h) * rPx, py - Math.sin(h) * rPx);
    ctx.stroke();
    ctx.fillStyle = "#c8d2dd";
    ctx.font = "10px monospace";
    ctx.fillText(`${p.name} [${p.plane}${p.stuck ? " stuck" : ""}]`, px + rPx + 3, py + 3);
  }

  // command HUD
  const cmd = frame.command;
  const rot = cmd.rotation
    ? `rot ${(cmd.rotation.hz * cmd.rotation.sense).toFixed(1)} Hz about [${cmd.rotation.axis
        .map((v) => v.toFixed(2))
        .join(", ")}]`
    : "rot off";
  const lines = [
    `t=${frame.t.toFixed(2)} s  frame ${frame.frame}  mode ${frame.mode}` +
      (frame.controller_running ? " [controller]" : ""),
    `B = [${cmd.b_mt.map((v) => v.toFixed(1)).join(", ")}] mT   ` +
      `grad_z = ${cmd.grad_mt_m[2].toFixed(0)} mT/m`,
    rot,
    `AC ${cmd.ac_on ? "on" : "off"}  ${cmd.ac_vpp.toFixed(1)} Vpp @ ${formatHz(cmd.ac_hz)}`,
  ];
  ctx.fillStyle = "#dce5ee";
  ctx.font = "12px monospace";
  lines.forEach((line, i) => ctx.fillText(line, 10, 16 + 14 * i));

  if (flash) {
    ctx.fillStyle = "#ff6b6b";
    ctx.font = "13px monospace";
    ctx.fillText(flash, 10, height - 12);
  }
}

function formatHz(hz: number): string {
  if (hz >= 1e6) return `${(hz / 1e6).toFixed(1)} MHz`;
  if (hz >= 1e3) return `${(hz / 1e3).toFixed(1)} kHz`;
  return `${hz.toFixed(0)} Hz`;
}
