"""Interplanar session planner: walks a plane-tagged waypoint list, delegating
in-plane legs to a navigation controller and running timed open-loop lift and
descend sequences at each plane change.

Transition timing is deliberately open loop: rather than detecting the exact
arrival at a surface, each lift/descend runs a configured standby interval
sized a few seconds beyond the expected transit, after which closed-loop
control resumes. With a cargo dip configured, transitions lower the AC voltage
for the dip interval instead of switching it off, releasing the carrier from
the surface while the restored voltage then recovers the cargo.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Protocol

from ..sim.commands import FieldCommand
from ..sim.engine import Measurement
from .controllers import DegenerateTargetError, StalledError, Waypoint


class Navigator(Protocol):
    def set_target(self, target: Waypoint, previous: Waypoint | None = None) -> None: ...

    def update(self, measurement: Measurement, plane: str) -> FieldCommand: ...


@dataclass(frozen=True)
class PlannerConfig:
    lift_standby_s: float = 22.0
    descend_standby_s: float = 18.0
    lift_field_mt: float = 15.0
    lift_gradient_mt_m: float = 2000.0
    attach_ac_vpp: float = 12.0
    attach_ac_hz: float = 5e6
    cargo_dip: tuple[float, float] | None = None  # (dip V_pp, dip duration s)
    waypoint_timeout_s: float = 60.0

    def __post_init__(self) -> None:
        if self.lift_standby_s <= 0.0 or self.descend_standby_s <= 0.0:
            raise ValueError("standby times must be positive")
        if self.waypoint_timeout_s <= 0.0:
            raise ValueError("waypoint timeout must be positive")


@dataclass
class WaypointOutcome:
    index: int
    x_um: float
    y_um: float
    plane: str
    outcome: str  # reached | timeout
    t_s: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "x_um": self.x_um,
            "y_um": self.y_um,
            "plane": self.plane,
            "outcome": self.outcome,
            "t_s": self.t_s,
        }


class InterplanarPlanner:
    """Emits one command per frame until the waypoint list is exhausted."""

    def __init__(
        self,
        waypoints: list[Waypoint],
        navigator: Navigator,
        cfg: PlannerConfig,
        frame_rate_hz: float = 20.0,
        start_plane: str = "bottom",
    ):
        if not waypoints:
            raise ValueError("waypoint list is empty")
        if waypoints[0].plane != start_plane:
            raise ValueError("first waypoint plane must match the particle plane")
        self.waypoints = waypoints
        self.navigator = navigator
        self.cfg = cfg
        self.frame_dt_s = 1.0 / frame_rate_hz
        self.plane = start_plane
        self.index = 0
        self.phase = "navigate"
        self.phase_elapsed_s = 0.0
        self.leg_elapsed_s = 0.0
        self.outcomes: list[WaypointOutcome] = []
        self.lift_count = 0
        self.descend_count = 0
        self.done = False
        self._previous_wp: Waypoint | None = None
        self.navigator.set_target(waypoints[0], None)

    # ------------------------------------------------------------- helpers
    def _record(self, wp: Waypoint, outcome: str, t_s: float) -> None:
        self.outcomes.append(
            WaypointOutcome(
                index=self.index,
                x_um=wp.x_um,
                y_um=wp.y_um,
                plane=wp.plane,
                outcome=outcome,
                t_s=t_s,
            )
        )

    def _advance(self, t_s: float, outcome: str) -> None:
        wp = self.waypoints[self.index]
        self._record(wp, outcome, t_s)
        self._previous_wp = wp
        self.index += 1
        self.leg_elapsed_s = 0.0
        if self.index >= len(self.waypoints):
            self.done = True
            return
        nxt = self.waypoints[self.index]
        if nxt.plane != self.plane:
            self.phase = "lift" if nxt.plane == "top" else "descend"
            self.phase_elapsed_s = 0.0
            if self.phase == "lift":
                self.lift_count += 1
            else:
                self.descend_count += 1
        else:
            self.navigator.set_target(nxt, self._previous_wp)

    def _transition_command(self) -> FieldCommand:
        cfg = self.cfg
        dip = cfg.cargo_dip
        if self.phase == "lift":
            if dip is not None:
                vpp = dip[0] if self.phase_elapsed_s < dip[1] else cfg.attach_ac_vpp
                ac_on = True
            else:
                vpp, ac_on = 0.0, False
            return FieldCommand(
                magnetic_field_mt=(0.0, 0.0, cfg.lift_field_mt),
                magnetic_gradient_mt_m=(0.0, 0.0, cfg.lift_gradient_mt_m),
                ac_voltage_pp=vpp,
                ac_frequency_hz=cfg.attach_ac_hz if ac_on else 0.0,
                ac_output=ac_on,
            )
        # descend: release the ceiling hold (or dip it with cargo aboard)
        if dip is not None:
            vpp = dip[0] if self.phase_elapsed_s < dip[1] else cfg.attach_ac_vpp
            return FieldCommand(
                ac_voltage_pp=vpp,
                ac_frequency_hz=cfg.attach_ac_hz,
                ac_output=True,
            )
        return FieldCommand()

    def _finish_transition(self) -> FieldCommand:
        """Final command of a transition; re-engages trapping after a lift."""
        cfg = self.cfg
        if self.phase == "lift":
            self.plane = "top"
            command = FieldCommand(
                ac_voltage_pp=cfg.attach_ac_vpp,
                ac_frequency_hz=cfg.attach_ac_hz,
                ac_output=True,
            )
        else:
            self.plane = "bottom"
            if cfg.cargo_dip is not None:
                command = FieldCommand(
                    ac_voltage_pp=cfg.attach_ac_vpp,
                    ac_frequency_hz=cfg.attach_ac_hz,
                    ac_output=True,
                )
            else:
                command = FieldCommand()
        self.phase = "navigate"
        self.phase_elapsed_s = 0.0
        self.navigator.set_target(self.waypoints[self.index], self._previous_wp)
        return command

    # --------------------------------------------------------------- update
    def update(self, measurement: Measurement) -> FieldCommand | None:
        """Command for this frame, or None once every waypoint is resolved."""
        if self.done:
            return None
        if self.phase in ("lift", "descend"):
            if self.phase_elapsed_s >= self._standby():
                return self._finish_transition()
            command = self._transition_command()
            self.phase_elapsed_s += self.frame_dt_s
            return command

        wp = self.waypoints[self.index]
        dist = math.hypot(wp.x_um - measurement.x_um, wp.y_um - measurement.y_um)
        if dist <= wp.arrival_radius_um:
            self._advance(measurement.t_s, "reached")
            return self.update(measurement) if not self.done else None
        if self.leg_elapsed_s > self.cfg.waypoint_timeout_s:
            self._advance(measurement.t_s, "timeout")
            return self.update(measurement) if not self.done else None
        self.leg_elapsed_s += self.frame_dt_s
        try:
            command = self.navigator.update(measurement, self.plane)
        except DegenerateTargetError:
            self._advance(measurement.t_s, "reached")
            return self.update(measurement) if not self.done else None
        except StalledError:
            # recorded as an outcome, never a crash
            self._advance(measurement.t_s, "stalled")
            return self.update(measurement) if not self.done else None
        if self.plane == "top" and not command.ac_output:
            # ceiling legs need the trapping field regardless of the strategy
            command = replace(
                command,
                ac_voltage_pp=self.cfg.attach_ac_vpp,
                ac_frequency_hz=self.cfg.attach_ac_hz,
                ac_output=True,
            )
        return command

    def _standby(self) -> float:
        return self.cfg.lift_standby_s if self.phase == "lift" else self.cfg.descend_standby_s
