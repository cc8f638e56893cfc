"""Quantitative run metrics over a recorded session.

The benchmark figures in this domain are usually judged by eye; these metrics
make the comparison numeric: cross-track error against the reference
polyline, lap period, corner overshoot along the outgoing corner bisector,
and the spread of per-waypoint arrival positions across laps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

from ..control.controllers import Waypoint
from ..control.planner import WaypointOutcome
from ..sim.logs import SessionLog


@dataclass
class RunMetrics:
    cross_track_rms_um: float = 0.0
    lap_period_s: float = 0.0
    corner_overshoot_um: float = 0.0
    repeatability_spread_um: float = 0.0
    waypoints_reached: int = 0
    cargo_delivered: int = 0

    def __post_init__(self) -> None:
        for name in (
            "cross_track_rms_um",
            "lap_period_s",
            "corner_overshoot_um",
            "repeatability_spread_um",
        ):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")
        if self.waypoints_reached < 0 or self.cargo_delivered < 0:
            raise ValueError("counts must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        return {
            "cross_track_rms_um": self.cross_track_rms_um,
            "lap_period_s": self.lap_period_s,
            "corner_overshoot_um": self.corner_overshoot_um,
            "repeatability_spread_um": self.repeatability_spread_um,
            "waypoints_reached": self.waypoints_reached,
            "cargo_delivered": self.cargo_delivered,
        }


def point_segment_distance(p, a, b) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    ux, uy = bx - ax, by - ay
    norm2 = ux * ux + uy * uy
    if norm2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = min(1.0, max(0.0, ((px - ax) * ux + (py - ay) * uy) / norm2))
    return math.hypot(px - (ax + t * ux), py - (ay + t * uy))


def point_polyline_distance(p, polyline: Sequence[tuple[float, float]], closed: bool = True) -> float:
    pts = list(polyline)
    if closed and pts[0] != pts[-1]:
        pts = pts + [pts[0]]
    return min(point_segment_distance(p, a, b) for a, b in zip(pts, pts[1:]))


def trajectory_of(log: SessionLog, name: str) -> list[tuple[float, float, float]]:
    """(t, x, y) of one particle over the session."""
    out = []
    for rec in log.frames:
        for p in rec.particles:
            if p["name"] == name:
                out.append((rec.t_s, p["x"], p["y"]))
                break
    return out


def trajectory_spread_um(trajectories: Sequence[Sequence[tuple[float, float]]]) -> float:
    """RMS spread of time-aligned trajectories about their mean path."""
    n = min(len(t) for t in trajectories)
    if n == 0:
        return 0.0
    acc = 0.0
    for k in range(n):
        xs = [t[k][0] for t in trajectories]
        ys = [t[k][1] for t in trajectories]
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        acc += sum((x - mx) ** 2 + (y - my) ** 2 for x, y in zip(xs, ys)) / len(xs)
    return math.sqrt(acc / n)


def lap_period_s(outcomes: Sequence[WaypointOutcome], waypoints_per_lap: int) -> float:
    """Mean lap time from first-waypoint arrivals; rotation-invariant for
    closed loops (depends only on the first/last arrival and the lap count)."""
    anchor = [o.t_s for o in outcomes if o.outcome == "reached" and o.index % waypoints_per_lap == 0]
    if len(anchor) < 2:
        return 0.0
    return (anchor[-1] - anchor[0]) / (len(anchor) - 1)


def repeatability_spread_um(
    log: SessionLog,
    name: str,
    outcomes: Sequence[WaypointOutcome],
    waypoints_per_lap: int,
) -> float:
    """Worst per-waypoint RMS spread of arrival positions across laps."""
    traj = {round(t, 9): (x, y) for t, x, y in trajectory_of(log, name)}
    by_wp: dict[int, list[tuple[float, float]]] = {}
    for o in outcomes:
        if o.outcome != "reached":
            continue
        pos = traj.get(round(o.t_s, 9))
        if pos is None:
            continue
        by_wp.setdefault(o.index % waypoints_per_lap, []).append(pos)
    worst = 0.0
    for positions in by_wp.values():
        if len(positions) < 2:
            continue
        mx = sum(p[0] for p in positions) / len(positions)
        my = sum(p[1] for p in positions) / len(positions)
        rms = math.sqrt(
            sum((x - mx) ** 2 + (y - my) ** 2 for x, y in positions) / len(positions)
        )
        worst = max(worst, rms)
    return worst


def corner_overshoot_um(
    log: SessionLog,
    name: str,
    lap_waypoints: Sequence[Waypoint],
    window_um: float = 40.0,
) -> float:
    """Max excursion beyond any corner along its outgoing bisector."""
    traj = [(x, y) for _, x, y in trajectory_of(log, name)]
    n = len(lap_waypoints)
    if n < 3 or not traj:
        return 0.0
    worst = 0.0
    for i, wp in enumerate(lap_waypoints):
        prev_wp = lap_waypoints[(i - 1) % n]
        next_wp = lap_waypoints[(i + 1) % n]
        ux, uy = wp.x_um - prev_wp.x_um, wp.y_um - prev_wp.y_um
        vx, vy = next_wp.x_um - wp.x_um, next_wp.y_um - wp.y_um
        nu, nv = math.hypot(ux, uy), math.hypot(vx, vy)
        if nu == 0.0 or nv == 0.0:
            continue
        wx, wy = ux / nu - vx / nv, uy / nu - vy / nv
        nw = math.hypot(wx, wy)
        if nw < 1e-9:
            continue  # straight-through waypoint, no corner
        wx, wy = wx / nw, wy / nw
        for x, y in traj:
            if math.hypot(x - wp.x_um, y - wp.y_um) > window_um:
                continue
            worst = max(worst, (x - wp.x_um) * wx + (y - wp.y_um) * wy)
    return worst


def compute_metrics(
    log: SessionLog,
    controlled_name: str,
    outcomes: Sequence[WaypointOutcome],
    lap_waypoints: Sequence[Waypoint],
    laps: int,
    cargo_delivered: int = 0,
) -> RunMetrics:
    polyline = [(w.x_um, w.y_um) for w in lap_waypoints]
    traj = [(x, y) for _, x, y in trajectory_of(log, controlled_name)]
    if traj and len(polyline) >= 2:
        acc = sum(point_polyline_distance(p, polyline) ** 2 for p in traj)
        cross = math.sqrt(acc / len(traj))
    else:
        cross = 0.0
    per_lap = len(lap_waypoints)
    return RunMetrics(
        cross_track_rms_um=cross,
        lap_period_s=lap_period_s(outcomes, per_lap) if laps > 1 else 0.0,
        corner_overshoot_um=corner_overshoot_um(log, controlled_name, lap_waypoints),
        repeatability_spread_um=repeatability_spread_um(
            log, controlled_name, outcomes, per_lap
        ),
        waypoints_reached=sum(1 for o in outcomes if o.outcome == "reached"),
        cargo_delivered=cargo_delivered,
    )
