"""Waypoint path generators: benchmark shapes, plane-tagged letter paths, and
plain-text waypoint files.

The modified lemniscate follows the Bernoulli curve but replaces its two lobe
tips with sharp corner vertices pushed outward, giving the benchmark its two
hard corners.
"""
from __future__ import annotations

import math
from pathlib import Path

from ..config import ConfigError
from ..control.controllers import Waypoint

KINDS = ("lemniscate_mod", "rectangle", "triangle", "tau_letters", "custom")


def _resample_polyline(
    points: list[tuple[float, float]],
    max_spacing_um: float,
    keep: set[int] | None = None,
) -> list[tuple[float, float, bool]]:
    """Split segments longer than max_spacing; returns (x, y, is_original)."""
    out: list[tuple[float, float, bool]] = []
    for i, p in enumerate(points):
        if i > 0:
            q = points[i - 1]
            dist = math.hypot(p[0] - q[0], p[1] - q[1])
            n_extra = max(0, math.ceil(dist / max_spacing_um) - 1)
            for k in range(1, n_extra + 1):
                t = k / (n_extra + 1)
                out.append((q[0] + t * (p[0] - q[0]), q[1] + t * (p[1] - q[1]), False))
        out.append((p[0], p[1], keep is None or i in keep))
    return out


def rectangle_path(
    cx_um: float, cy_um: float, width_um: float, height_um: float,
    plane: str = "bottom", arrival_radius_um: float = 5.0,
) -> list[Waypoint]:
    """Four corners, counter-clockwise starting at the lower-left one."""
    hw, hh = width_um / 2.0, height_um / 2.0
    corners = [
        (cx_um - hw, cy_um - hh),
        (cx_um + hw, cy_um - hh),
        (cx_um + hw, cy_um + hh),
        (cx_um - hw, cy_um + hh),
    ]
    return [Waypoint(x, y, plane, arrival_radius_um) for x, y in corners]


def triangle_path(
    cx_um: float, cy_um: float, size_um: float,
    plane: str = "bottom", arrival_radius_um: float = 5.0,
) -> list[Waypoint]:
    pts = [
        (cx_um, cy_um + size_um / math.sqrt(3.0)),
        (cx_um - size_um / 2.0, cy_um - size_um / (2.0 * math.sqrt(3.0))),
        (cx_um + size_um / 2.0, cy_um - size_um / (2.0 * math.sqrt(3.0))),
    ]
    return [Waypoint(x, y, plane, arrival_radius_um) for x, y in pts]


def lemniscate_mod_path(
    cx_um: float,
    cy_um: float,
    half_width_um: float = 150.0,
    n_points: int = 24,
    corner_scale: float = 1.25,
    max_spacing_um: float | None = None,
    plane: str = "bottom",
    arrival_radius_um: float = 5.0,
) -> list[Waypoint]:
    """Bernoulli lemniscate with the two lobe tips replaced by sharp corners."""
    pts: list[tuple[float, float]] = []
    for i in range(n_points):
        t = 2.0 * math.pi * i / n_points
        denom = 1.0 + math.sin(t) ** 2
        x = half_width_um * math.cos(t) / denom
        y = half_width_um * math.sin(t) * math.cos(t) / denom
        pts.append((cx_um + x, cy_um + y))
    # push the extreme-x vertices outward into sharp corners
    right = max(range(n_points), key=lambda i: pts[i][0])
    left = min(range(n_points), key=lambda i: pts[i][0])
    for idx in (right, left):
        x, y = pts[idx]
        pts[idx] = (cx_um + (x - cx_um) * corner_scale, cy_um + (y - cy_um) * corner_scale)
    if max_spacing_um is not None:
        resampled = _resample_polyline(pts + [pts[0]], max_spacing_um)
        resampled = resampled[:-1]
        return [Waypoint(x, y, plane, arrival_radius_um) for x, y, _ in resampled]
    return [Waypoint(x, y, plane, arrival_radius_um) for x, y in pts]


def tau_letters_path(
    origin_x_um: float = 200.0,
    origin_y_um: float = 200.0,
    letter_height_um: float = 120.0,
    spacing_um: float = 100.0,
    arrival_radius_um: float = 8.0,
) -> list[Waypoint]:
    """The initials T-A-U, the middle letter written on the chamber ceiling."""
    h = letter_height_um
    w = 0.6 * h
    x0, y0 = origin_x_um, origin_y_um

    t_pts = [
        (x0 + w / 2, y0),
        (x0 + w / 2, y0 + h),
        (x0, y0 + h),
        (x0 + w, y0 + h),
    ]
    xa = x0 + w + spacing_um
    a_pts = [
        (xa, y0),
        (xa + w / 2, y0 + h),
        (xa + w, y0),
        (xa + 0.75 * w, y0 + h / 2),
        (xa + 0.25 * w, y0 + h / 2),
    ]
    xu = xa + w + spacing_um
    u_pts = [
        (xu, y0 + h),
        (xu, y0 + 0.2 * h),
        (xu + w / 2, y0),
        (xu + w, y0 + 0.2 * h),
        (xu + w, y0 + h),
    ]
    wps = [Waypoint(x, y, "bottom", arrival_radius_um) for x, y in t_pts]
    wps += [Waypoint(x, y, "top", arrival_radius_um) for x, y in a_pts]
    wps += [Waypoint(x, y, "bottom", arrival_radius_um) for x, y in u_pts]
    return wps


def load_waypoint_file(path: str | Path, arrival_radius_um: float = 5.0) -> list[Waypoint]:
    """Plain-text ``x_um,y_um,plane`` waypoint list; blank and # lines ignored."""
    wps = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) not in (2, 3):
            raise ConfigError(f"{path}:{lineno}: want 'x_um,y_um[,plane]'")
        plane = parts[2] if len(parts) == 3 else "bottom"
        try:
            wps.append(Waypoint(float(parts[0]), float(parts[1]), plane, arrival_radius_um))
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    if not wps:
        raise ConfigError(f"{path}: no waypoints")
    return wps


def generate_path(kind: str, **params) -> list[Waypoint]:
    if kind == "rectangle":
        return rectangle_path(**params)
    if kind == "triangle":
        return triangle_path(**params)
    if kind == "lemniscate_mod":
        return lemniscate_mod_path(**params)
    if kind == "tau_letters":
        return tau_letters_path(**params)
    if kind == "custom":
        return load_waypoint_file(**params)
    raise ConfigError(f"unknown path kind {kind!r}; known: {', '.join(KINDS)}")
