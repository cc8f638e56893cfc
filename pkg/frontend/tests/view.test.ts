import { describe, expect, it } from "vitest";

import { ViewTransform, waypointClick } from "../src/view.js";
import type { WaypointSnapshot } from "../src/protocol.js";

const BOUNDS = { width_um: 1200, depth_um: 1200 };

describe("ViewTransform", () => {
  it("round-trips chamber coordinates through the screen", () => {
    const view = ViewTransform.fit(BOUNDS, 1100, 560);
    for (const [x, y] of [
      [0, 0],
      [600, 300],
      [1199.5, 1200],
      [17.25, 923.75],
    ]) {
      const [px, py] = view.toScreen(x, y);
      const [bx, by] = view.toChamber(px, py);
      expect(bx).toBeCloseTo(x, 6);
      expect(by).toBeCloseTo(y, 6);
    }
  });

  it("remains invertible after pan and zoom", () => {
    const view = ViewTransform.fit(BOUNDS, 1100, 560);
    view.zoomAt(200, 150, 2.5);
    view.panBy(-37.5, 12.25);
    view.zoomAt(640, 400, 1 / 3);
    const [px, py] = view.toScreen(412.5, 611.125);
    const [bx, by] = view.toChamber(px, py);
    expect(bx).toBeCloseTo(412.5, 6);
    expect(by).toBeCloseTo(611.125, 6);
  });

  it("keeps the zoom anchor fixed on screen", () => {
    const view = ViewTransform.fit(BOUNDS, 1100, 560);
    const [before] = [view.toChamber(300, 200)];
    view.zoomAt(300, 200, 1.7);
    const after = view.toChamber(300, 200);
    expect(after[0]).toBeCloseTo(before[0], 6);
    expect(after[1]).toBeCloseTo(before[1], 6);
  });
});

describe("waypointClick", () => {
  const view = ViewTransform.fit(BOUNDS, 1100, 560);

  it("adds a floor waypoint at the clicked chamber position", () => {
    const [px, py] = view.toScreen(600, 300);
    const edit = waypointClick(px, py, false, view, [], BOUNDS);
    expect(edit.kind).toBe("message");
    if (edit.kind === "message" && edit.message.type === "waypoint_add") {
      expect(edit.message.plane).toBe("bottom");
      expect(edit.message.x_um).toBeCloseTo(600, 6);
      expect(edit.message.y_um).toBeCloseTo(300, 6);
    } else {
      throw new Error("expected waypoint_add");
    }
  });

  it("modifier click yields a ceiling waypoint within 1 um after inversion", () => {
    const zoomed = ViewTransform.fit(BOUNDS, 1100, 560);
    zoomed.zoomAt(420, 260, 3.2);
    zoomed.panBy(55, -23);
    const [px, py] = zoomed.toScreen(431.0, 872.0);
    const edit = waypointClick(px, py, true, zoomed, [], BOUNDS);
    if (edit.kind !== "message" || edit.message.type !== "waypoint_add") {
      throw new Error("expected waypoint_add");
    }
    expect(edit.message.plane).toBe("top");
    expect(Math.abs(edit.message.x_um - 431.0)).toBeLessThan(1.0);
    expect(Math.abs(edit.message.y_um - 872.0)).toBeLessThan(1.0);
  });

  it("clicking an existing marker removes it", () => {
    const waypoints: WaypointSnapshot[] = [
      { x_um: 100, y_um: 100, plane: "bottom" },
      { x_um: 500, y_um: 700, plane: "top" },
    ];
    const [px, py] = view.toScreen(500, 700);
    const edit = waypointClick(px + 3, py - 2, false, view, waypoints, BOUNDS);
    expect(edit).toEqual({ kind: "message", message: { type: "waypoint_remove", index: 1 } });
  });

  it("rejects clicks outside the chamber with feedback", () => {
    const [px, py] = view.toScreen(-50, 600);
    const edit = waypointClick(px, py, false, view, [], BOUNDS);
    expect(edit.kind).toBe("rejected");
    if (edit.kind === "rejected") {
      expect(edit.reason).toContain("outside");
    }
  });
});
