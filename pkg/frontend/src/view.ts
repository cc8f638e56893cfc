// Camera transform and waypoint-editing geometry. The transform maps chamber
// micrometers to canvas pixels (y up in the chamber, y down on screen) and
// stays invertible by construction (zoom is clamped positive).

import type { ClientMessage, Plane, WaypointSnapshot } from "./protocol.js";

export interface ChamberBounds {
  width_um: number;
  depth_um: number;
}

export class ViewTransform {
  zoom: number; // pixels per micrometer
  panX: number; // canvas-pixel offset
  panY: number;

  constructor(zoom = 1.0, panX = 0.0, panY = 0.0) {
    this.zoom = Math.max(zoom, 1e-6);
    this.panX = panX;
    this.panY = panY;
  }

  static fit(bounds: ChamberBounds, canvasW: number, canvasH: number): ViewTransform {
    const zoom = Math.min(canvasW / bounds.width_um, canvasH / bounds.depth_um);
    const panX = (canvasW - bounds.width_um * zoom) / 2;
    const panY = (canvasH - bounds.depth_um * zoom) / 2;
    return new ViewTransform(zoom, panX, panY + bounds.depth_um * zoom);
  }

  toScreen(xUm: number, yUm: number): [number, number] {
    return [this.panX + xUm * this.zoom, this.panY - yUm * this.zoom];
  }

  toChamber(px: number, py: number): [number, number] {
    return [(px - this.panX) / this.zoom, (this.panY - py) / this.zoom];
  }

  zoomAt(px: number, py: number, factor: number): void {
    const [xUm, yUm] = this.toChamber(px, py);
    this.zoom = Math.max(this.zoom * factor, 1e-6);
    // keep the anchor point fixed on screen
    this.panX = px - xUm * this.zoom;
    this.panY = py + yUm * this.zoom;
  }

  panBy(dx: number, dy: number): void {
    this.panX += dx;
    this.panY += dy;
  }
}

export type WaypointEdit =
  | { kind: "message"; message: ClientMessage }
  | { kind: "rejected"; reason: string };

export const HIT_RADIUS_PX = 10;

// Click semantics: hit an existing marker -> remove it; otherwise add a
// waypoint at the clicked chamber position, ceiling-tagged when the modifier
// is held. Clicks outside the chamber are rejected (caller flashes feedback).
export function waypointClick(
  px: number,
  py: number,
  modifier: boolean,
  view: ViewTransform,
  waypoints: WaypointSnapshot[],
  bounds: ChamberBounds,
): WaypointEdit {
  for (let i = waypoints.length - 1; i >= 0; i--) {
    const [wx, wy] = view.toScreen(waypoints[i].x_um, waypoints[i].y_um);
    if (Math.hypot(wx - px, wy - py) <= HIT_RADIUS_PX) {
      return { kind: "message", message: { type: "waypoint_remove", index: i } };
    }
  }
  const [xUm, yUm] = view.toChamber(px, py);
  if (xUm < 0 || xUm > bounds.width_um || yUm < 0 || yUm > bounds.depth_um) {
    return { kind: "rejected", reason: "outside chamber bounds" };
  }
  const plane: Plane = modifier ? "top" : "bottom";
  return {
    kind: "message",
    message: { type: "waypoint_add", x_um: xUm, y_um: yUm, plane },
  };
}
