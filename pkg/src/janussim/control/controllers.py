"""Closed-loop in-plane controllers, one field command per sensing frame.

Three strategies:
  * rolling: rotating field about the axis z_hat x d, frequency interpolated
    with distance to the target (inverted rolling axis on the ceiling);
  * steering: AC propulsion with a P-controller rotating the planar field
    azimuth at a rate proportional to the signed velocity/target error angle;
  * ortho4: rolling restricted to +/-y rotation axes for horizontal motion and
    frequency-selected electric propulsion for vertical motion, reducing the
    larger error first, with a deviation-triggered return to the segment line
    and a memory bit that swaps the two electric bands when the observed
    vertical motion opposes the expectation.

Controllers are pure functions of (measurement window, target, config, own
memory); two instances fed identical inputs emit identical commands.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from ..sim.commands import FieldCommand, RotationSpec
from ..sim.engine import Engine, Measurement


class DegenerateTargetError(ValueError):
    """Target within the arrival radius; caller should advance the waypoint."""


class StalledError(RuntimeError):
    """Sustained near-zero speed under AC propulsion: stuck particle or bad
    inclination calibration."""


class NoMotionError(RuntimeError):
    """Inclination scan saw no propulsion at any scanned angle."""


@dataclass(frozen=True)
class Waypoint:
    x_um: float
    y_um: float
    plane: str = "bottom"
    arrival_radius_um: float = 5.0

    def __post_init__(self) -> None:
        if self.plane not in ("bottom", "top"):
            raise ValueError("waypoint plane must be 'bottom' or 'top'")
        if self.arrival_radius_um <= 0.0:
            raise ValueError("arrival radius must be positive")


@dataclass(frozen=True)
class RollingCtlConfig:
    omega_1_hz: float = 4.0
    omega_2_hz: float = 10.0
    d_max_um: float = 200.0
    field_magnitude_mt: float = 3.5
    ac_assist: tuple[float, float] | None = None  # (V_pp, Hz)

    def __post_init__(self) -> None:
        if not (0.0 < self.omega_1_hz <= self.omega_2_hz):
            raise ValueError("need 0 < omega_1 <= omega_2")
        if self.d_max_um <= 0.0:
            raise ValueError("d_max must be positive")


def rolling_controller(
    position_um: tuple[float, float],
    target: Waypoint,
    cfg: RollingCtlConfig,
    plane: str = "bottom",
) -> FieldCommand:
    """Rotating-field command rolling the particle toward the target."""
    dx = target.x_um - position_um[0]
    dy = target.y_um - position_um[1]
    dist = math.hypot(dx, dy)
    if dist < target.arrival_radius_um:
        raise DegenerateTargetError(f"target {dist:.2f} um away, within arrival radius")
    # axis = z_hat x d, inverted when rolling on the ceiling
    ax, ay = -dy / dist, dx / dist
    if plane == "top":
        ax, ay = -ax, -ay
    omega = cfg.omega_1_hz + (dist / cfg.d_max_um) * (cfg.omega_2_hz - cfg.omega_1_hz)
    omega = min(max(omega, cfg.omega_1_hz), cfg.omega_2_hz)
    rotation = RotationSpec(axis=(ax, ay, 0.0), frequency_hz=omega, sense=1)
    # store the in-plane field amplitude at phase zero for the command echo
    b = (cfg.field_magnitude_mt * ay, -cfg.field_magnitude_mt * ax, 0.0)
    ac = cfg.ac_assist
    return FieldCommand(
        magnetic_field_mt=b,
        rotation=rotation,
        ac_voltage_pp=ac[0] if ac else 0.0,
        ac_frequency_hz=ac[1] if ac else 0.0,
        ac_output=ac is not None,
    )


class RollingController:
    """Stateful wrapper carrying the target for the session runner."""

    def __init__(self, cfg: RollingCtlConfig):
        self.cfg = cfg
        self.target: Waypoint | None = None

    def set_target(self, target: Waypoint, previous: Waypoint | None = None) -> None:
        self.target = target

    def update(self, measurement: Measurement, plane: str) -> FieldCommand:
        if self.target is None:
            raise ValueError("no target set")
        return rolling_controller(
            (measurement.x_um, measurement.y_um), self.target, self.cfg, plane
        )


@dataclass(frozen=True)
class SteeringCtlConfig:
    k_p: float = 0.1  # azimuth degrees per frame per degree of error
    error_threshold_deg: float = 2.0
    theta_cal_deg: float = 70.0
    ac_voltage_pp: float = 10.0
    ac_frequency_hz: float = 2e3
    field_magnitude_mt: float = 2.0
    speed_floor_um_s: float = 0.5
    stall_frames: int = 40

    def __post_init__(self) -> None:
        if self.k_p <= 0.0:
            raise ValueError("k_p must be positive")
        if self.error_threshold_deg < 0.0:
            raise ValueError("error threshold must be non-negative")


def _signed_angle_deg(from_xy: tuple[float, float], to_xy: tuple[float, float]) -> float:
    cross = from_xy[0] * to_xy[1] - from_xy[1] * to_xy[0]
    dot = from_xy[0] * to_xy[0] + from_xy[1] * to_xy[1]
    return math.degrees(math.atan2(cross, dot))


class SteeringController:
    """P-controller rotating the planar field azimuth toward the target."""

    def __init__(self, cfg: SteeringCtlConfig, frame_rate_hz: float = 20.0):
        self.cfg = cfg
        self.frame_dt_s = 1.0 / frame_rate_hz
        self.phi_deg = 0.0
        self.target: Waypoint | None = None
        self._history: deque[Measurement] = deque(maxlen=3)
        self._slow_frames = 0

    def set_target(self, target: Waypoint, previous: Waypoint | None = None) -> None:
        self.target = target

    def _command(self) -> FieldCommand:
        cfg = self.cfg
        theta = math.radians(cfg.theta_cal_deg)
        phi = math.radians(self.phi_deg)
        b = (
            cfg.field_magnitude_mt * math.sin(theta) * math.cos(phi),
            cfg.field_magnitude_mt * math.sin(theta) * math.sin(phi),
            cfg.field_magnitude_mt * math.cos(theta),
        )
        return FieldCommand(
            magnetic_field_mt=b,
            ac_voltage_pp=cfg.ac_voltage_pp,
            ac_frequency_hz=cfg.ac_frequency_hz,
            ac_output=True,
        )

    def velocity_estimate(self) -> tuple[float, float] | None:
        h = self._history
        if len(h) >= 3:
            dt = h[-1].t_s - h[-3].t_s
            if dt > 0:
                return ((h[-1].x_um - h[-3].x_um) / dt, (h[-1].y_um - h[-3].y_um) / dt)
        if len(h) == 2:
            dt = h[-1].t_s - h[-2].t_s
            if dt > 0:
                return ((h[-1].x_um - h[-2].x_um) / dt, (h[-1].y_um - h[-2].y_um) / dt)
        return None

    def update(self, measurement: Measurement, plane: str = "bottom") -> FieldCommand:
        if self.target is None:
            raise ValueError("no target set")
        self._history.append(measurement)
        velocity = self.velocity_estimate()
        if velocity is None:
            return self._command()
        speed = math.hypot(*velocity)
        if speed < self.cfg.speed_floor_um_s:
            self._slow_frames += 1
            if self._slow_frames >= self.cfg.stall_frames:
                raise StalledError(
                    f"speed below {self.cfg.speed_floor_um_s} um/s for "
                    f"{self._slow_frames} frames"
                )
            return self._command()
        self._slow_frames = 0
        d = (self.target.x_um - measurement.x_um, self.target.y_um - measurement.y_um)
        alpha_err = _signed_angle_deg(velocity, d)
        if abs(alpha_err) > self.cfg.error_threshold_deg:
            self.phi_deg = (self.phi_deg + self.cfg.k_p * alpha_err + 180.0) % 360.0 - 180.0
        return self._command()


@dataclass(frozen=True)
class Ortho4Config:
    omega_fast_hz: float = 5.0
    omega_slow_hz: float = 0.5
    line_deviation_threshold_um: float = 10.0
    icep_hz: float = 2e3
    sdep_hz: float = 5e4
    park_hz: float = 5e6
    voltage_pp: float = 12.0
    field_magnitude_mt: float = 3.5
    flip_detect_frames: int = 5
    vertical_velocity_floor_um_s: float = 0.5

    def __post_init__(self) -> None:
        if self.omega_slow_hz >= self.omega_fast_hz:
            raise ValueError("omega_slow must be below omega_fast")
        if self.line_deviation_threshold_um <= 0.0:
            raise ValueError("line deviation threshold must be positive")


class Ortho4Controller:
    """Four-direction control: +/-x by rolling, +/-y by electric propulsion."""

    def __init__(self, cfg: Ortho4Config, frame_rate_hz: float = 20.0):
        self.cfg = cfg
        self.frame_dt_s = 1.0 / frame_rate_hz
        self.target: Waypoint | None = None
        self.segment: tuple[tuple[float, float], tuple[float, float]] | None = None
        self.icep_moves_up = True
        self.last_horizontal_sense = 1
        self._opposing = 0
        self._previous: Measurement | None = None
        self._expected_vertical_sign = 0

    def set_target(self, target: Waypoint, previous: Waypoint | None = None) -> None:
        if previous is not None:
            self.segment = ((previous.x_um, previous.y_um), (target.x_um, target.y_um))
        else:
            self.segment = None
        self.target = target

    def _line_offset(self, x: float, y: float) -> tuple[float, float]:
        """Vector from the position to its projection on the segment line."""
        if self.segment is None:
            return (0.0, 0.0)
        (x0, y0), (x1, y1) = self.segment
        ux, uy = x1 - x0, y1 - y0
        norm2 = ux * ux + uy * uy
        if norm2 < 1e-12:
            return (0.0, 0.0)
        t = ((x - x0) * ux + (y - y0) * uy) / norm2
        px, py = x0 + t * ux, y0 + t * uy
        return (px - x, py - y)

    def _horizontal(self, sense: int) -> FieldCommand:
        cfg = self.cfg
        self.last_horizontal_sense = sense
        self._expected_vertical_sign = 0
        return FieldCommand(
            magnetic_field_mt=(cfg.field_magnitude_mt, 0.0, 0.0),
            rotation=RotationSpec(axis=(0.0, 1.0, 0.0), frequency_hz=cfg.omega_fast_hz, sense=sense),
            ac_voltage_pp=cfg.voltage_pp,
            ac_frequency_hz=cfg.park_hz,
            ac_output=True,
        )

    def _vertical(self, up: bool) -> FieldCommand:
        cfg = self.cfg
        use_icep = up == self.icep_moves_up
        self._expected_vertical_sign = 1 if up else -1
        return FieldCommand(
            magnetic_field_mt=(cfg.field_magnitude_mt, 0.0, 0.0),
            rotation=RotationSpec(
                axis=(0.0, 1.0, 0.0),
                frequency_hz=cfg.omega_slow_hz,
                sense=self.last_horizontal_sense,
            ),
            ac_voltage_pp=cfg.voltage_pp,
            ac_frequency_hz=cfg.icep_hz if use_icep else cfg.sdep_hz,
            ac_output=True,
        )

    def _detect_flip(self, measurement: Measurement) -> None:
        prev = self._previous
        if prev is None or self._expected_vertical_sign == 0:
            return
        dt = measurement.t_s - prev.t_s
        if dt <= 0:
            return
        vy = (measurement.y_um - prev.y_um) / dt
        opposes = vy * self._expected_vertical_sign < -self.cfg.vertical_velocity_floor_um_s
        if opposes:
            self._opposing += 1
            if self._opposing >= self.cfg.flip_detect_frames:
                # remembered for the rest of the session
                self.icep_moves_up = not self.icep_moves_up
                self._opposing = 0
        else:
            self._opposing = 0

    def update(self, measurement: Measurement, plane: str = "bottom") -> FieldCommand:
        if self.target is None:
            raise ValueError("no target set")
        self._detect_flip(measurement)
        x, y = measurement.x_um, measurement.y_um
        self._previous = measurement
        off = self._line_offset(x, y)
        if math.hypot(*off) > self.cfg.line_deviation_threshold_um:
            if abs(off[0]) >= abs(off[1]):
                return self._horizontal(1 if off[0] > 0 else -1)
            return self._vertical(off[1] > 0)
        dx = self.target.x_um - x
        dy = self.target.y_um - y
        if abs(dx) >= abs(dy):
            return self._horizontal(1 if dx >= 0 else -1)
        return self._vertical(dy > 0)


def select_calibrated_angle(
    angles_deg: Sequence[float], speeds_um_s: Sequence[float], speed_floor_um_s: float
) -> float:
    """Fastest scanned angle; exact ties resolve to the lowest angle."""
    best_theta = None
    best_speed = -math.inf
    for theta, speed in sorted(zip(angles_deg, speeds_um_s)):
        if speed >= speed_floor_um_s and speed > best_speed:
            best_speed = speed
            best_theta = float(theta)
    if best_theta is None:
        raise NoMotionError("no propulsion detected over the inclination scan")
    return best_theta


def calibrate_inclination(
    engine: Engine,
    cfg: SteeringCtlConfig,
    scan_deg: Sequence[float] = tuple(range(20, 161, 10)),
    dwell_s: float = 1.0,
    speed_floor_um_s: float = 0.5,
) -> float:
    """Scan field inclinations under AC propulsion and return the fastest one.

    Ties resolve to the lowest scanned angle; raises NoMotionError when every
    angle stays below the speed floor.
    """
    frames = max(1, int(round(dwell_s * engine.config.frame_rate_hz)))
    agent = engine.controlled
    angles = []
    speeds = []
    for theta_deg in scan_deg:
        theta = math.radians(theta_deg)
        cmd = FieldCommand(
            magnetic_field_mt=(
                cfg.field_magnitude_mt * math.sin(theta),
                0.0,
                cfg.field_magnitude_mt * math.cos(theta),
            ),
            ac_voltage_pp=cfg.ac_voltage_pp,
            ac_frequency_hz=cfg.ac_frequency_hz,
            ac_output=True,
        )
        x0, y0 = agent.state.x_um, agent.state.y_um
        for _ in range(frames):
            engine.step_frame(cmd)
        dist = math.hypot(agent.state.x_um - x0, agent.state.y_um - y0)
        angles.append(float(theta_deg))
        speeds.append(dist / (frames / engine.config.frame_rate_hz))
    return select_calibrated_angle(angles, speeds, speed_floor_um_s)
