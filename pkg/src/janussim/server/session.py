"""Live-session manager bridging the simulation loop to websocket clients.

One asyncio task owns the engine and advances it at the sensing rate
(scaled by ``time_scale``; 0 runs unpaced). Clients interact only through
message queues: inbound commands are drained at each frame boundary, outbound
snapshots go through bounded per-client queues where a slow client loses
frames but never command replies. Manual and autonomous control are mutually
exclusive; switching is an explicit ``mode`` message.

The keyboard-semantics manual actions and their field-command effects are the
mapping table documented in docs/protocol.md; the hello message repeats it so
clients can self-describe.
"""
from __future__ import annotations

import asyncio
import math
from dataclasses import dataclass, field
from typing import Any

from pydantic import ValidationError

from ..control.planner import InterplanarPlanner
from ..control.controllers import Waypoint
from ..harness.scenario import Scenario
from ..sim.commands import FieldCommand, rotation_about
from .schemas import CLIENT_MESSAGE_TYPES, SCHEMA_VERSION

AC_PRESETS_HZ = {1: 2e3, 2: 5e4, 3: 5e6}

KEYBOARD_MAPPING = {
    "arrows": "set_direction (0/90/180/270 deg -> right/up/left/down)",
    "bracket_right": "freq_delta +1 Hz",
    "bracket_left": "freq_delta -1 Hz",
    "l_hold": "lift on while held, off on release (gradient + vertical field)",
    "t": "toggle_ac",
    "presets": {"1": "ac 2 kHz", "2": "ac 50 kHz", "3": "ac 5 MHz"},
}


@dataclass
class ManualState:
    direction_deg: float = 0.0
    rotation_hz: float = 5.0
    field_mt: float = 3.5
    lift_on: bool = False
    ac_on: bool = False
    ac_vpp: float = 10.0
    ac_hz: float = 5e6
    lift_field_mt: float = 15.0
    lift_gradient_mt_m: float = 2000.0

    def command(self) -> FieldCommand:
        d = math.radians(self.direction_deg)
        dx, dy = math.cos(d), math.sin(d)
        # roll toward the chosen direction: axis = z_hat x d
        rotation = None
        if self.rotation_hz > 0.0 and not self.lift_on:
            rotation = rotation_about((-dy, dx, 0.0), self.rotation_hz)
        if self.lift_on:
            b = (0.0, 0.0, self.lift_field_mt)
            grad = (0.0, 0.0, self.lift_gradient_mt_m)
        else:
            b = (self.field_mt * dx, self.field_mt * dy, 0.0)
            grad = (0.0, 0.0, 0.0)
        return FieldCommand(
            magnetic_field_mt=b,
            magnetic_gradient_mt_m=grad,
            rotation=rotation,
            ac_voltage_pp=self.ac_vpp if self.ac_on else 0.0,
            ac_frequency_hz=self.ac_hz,
            ac_output=self.ac_on,
        )


class ClientChannel:
    """Outbound queue with a frame budget: a slow client loses frames, never
    command replies, and replies can never be starved by the frame stream."""

    def __init__(self, max_buffered_frames: int = 8):
        self.queue: asyncio.Queue[dict[str, Any]] = asyncio.Queue()
        self.max_buffered_frames = max_buffered_frames
        self.buffered_frames = 0
        self.dropped_frames = 0
        self.closed = False

    def offer_frame(self, frame: dict[str, Any]) -> None:
        if self.closed:
            return
        if self.buffered_frames >= self.max_buffered_frames:
            self.dropped_frames += 1
            return
        self.buffered_frames += 1
        self.queue.put_nowait(frame)

    def send_reply(self, message: dict[str, Any]) -> None:
        if not self.closed:
            self.queue.put_nowait(message)

    async def next_message(self) -> dict[str, Any]:
        message = await self.queue.get()
        if message.get("type") == "frame":
            self.buffered_frames -= 1
        return message


class LiveSession:
    """Owns the engine and its frame loop; clients talk via queues only."""

    def __init__(self, scenario: Scenario, time_scale: float = 1.0):
        self.scenario = scenario
        self.time_scale = time_scale
        self.engine = scenario.build_engine()
        self.mode = "manual"
        self.manual = ManualState(
            lift_field_mt=scenario.planner_config.lift_field_mt,
            lift_gradient_mt_m=scenario.planner_config.lift_gradient_mt_m,
            ac_vpp=scenario.planner_config.attach_ac_vpp,
            ac_hz=scenario.planner_config.attach_ac_hz,
        )
        self.waypoints: list[Waypoint] = list(scenario.lap_waypoints)
        self.planner: InterplanarPlanner | None = None
        self.last_command = FieldCommand()
        self.inbox: asyncio.Queue[dict[str, Any]] = asyncio.Queue()
        self.clients: set[ClientChannel] = set()
        self._task: asyncio.Task | None = None
        self._stopping = False

    # -------------------------------------------------------------- control
    def start(self) -> None:
        self._task = asyncio.get_event_loop().create_task(self._run())

    async def stop(self) -> None:
        self._stopping = True
        if self._task is not None:
            self._task.cancel()
            try:
                await self._task
            except asyncio.CancelledError:
                pass

    # ------------------------------------------------------------- messages
    def validate_message(self, raw: dict[str, Any]):
        mtype = raw.get("type")
        model = CLIENT_MESSAGE_TYPES.get(mtype)
        if model is None:
            return None, {"type": "error", "reason": f"unknown message type {mtype!r}"}
        try:
            return model.model_validate(raw), None
        except ValidationError as exc:
            return None, {"type": "error", "reason": f"malformed {mtype}: {exc.errors()[0]['msg']}"}

    def _apply(self, msg) -> dict[str, Any]:
        kind = msg.type
        if kind == "mode":
            self.mode = msg.mode
            if msg.mode == "manual":
                self.planner = None
            return {"type": "ack", "of": "mode", "mode": self.mode}
        if kind == "manual":
            if self.mode != "manual":
                return {"type": "error", "reason": "manual command in auto mode"}
            return self._apply_manual(msg)
        if kind == "waypoint_add":
            self.waypoints.append(Waypoint(msg.x_um, msg.y_um, msg.plane))
            return {"type": "ack", "of": "waypoint_add", "count": len(self.waypoints)}
        if kind == "waypoint_remove":
            if not (0 <= msg.index < len(self.waypoints)):
                return {"type": "error", "reason": f"waypoint index {msg.index} out of range"}
            self.waypoints.pop(msg.index)
            return {"type": "ack", "of": "waypoint_remove", "count": len(self.waypoints)}
        if kind == "controller":
            return self._apply_controller(msg)
        if kind == "reset":
            self.engine = self.scenario.build_engine()
            self.planner = None
            self.last_command = FieldCommand()
            return {"type": "ack", "of": "reset"}
        return {"type": "error", "reason": f"unhandled message {kind!r}"}

    def _apply_manual(self, msg) -> dict[str, Any]:
        m = self.manual
        if msg.action == "set_direction":
            if msg.angle_deg is None:
                return {"type": "error", "reason": "set_direction needs angle_deg"}
            m.direction_deg = msg.angle_deg % 360.0
        elif msg.action == "freq_delta":
            if msg.delta_hz is None:
                return {"type": "error", "reason": "freq_delta needs delta_hz"}
            m.rotation_hz = max(0.0, m.rotation_hz + msg.delta_hz)
        elif msg.action == "lift":
            if msg.on is None:
                return {"type": "error", "reason": "lift needs on"}
            m.lift_on = msg.on
        elif msg.action == "toggle_ac":
            m.ac_on = not m.ac_on
        elif msg.action == "ac_preset":
            if msg.preset not in AC_PRESETS_HZ:
                return {"type": "error", "reason": f"unknown preset {msg.preset}"}
            m.ac_hz = AC_PRESETS_HZ[msg.preset]
        return {"type": "ack", "of": "manual", "action": msg.action}

    def _apply_controller(self, msg) -> dict[str, Any]:
        if msg.action == "stop":
            self.planner = None
            return {"type": "ack", "of": "controller", "running": False}
        if self.mode != "auto":
            return {"type": "error", "reason": "switch to auto mode before starting a controller"}
        if not self.waypoints:
            return {"type": "error", "reason": "no waypoints defined"}
        if msg.kind is not None:
            self.scenario.controller_type = msg.kind
        start_plane = self.engine.controlled.state.plane.value
        if start_plane not in ("bottom", "top"):
            return {"type": "error", "reason": "particle is between planes; wait for it to settle"}
        wps = list(self.waypoints)
        if wps[0].plane != start_plane:
            wps = [Waypoint(wps[0].x_um, wps[0].y_um, start_plane, wps[0].arrival_radius_um)] + wps
        self.planner = InterplanarPlanner(
            waypoints=wps,
            navigator=self.scenario.build_navigator(),
            cfg=self.scenario.planner_config,
            frame_rate_hz=self.scenario.engine_config.frame_rate_hz,
            start_plane=start_plane,
        )
        return {"type": "ack", "of": "controller", "running": True, "kind": self.scenario.controller_type}

    # ----------------------------------------------------------------- loop
    def hello(self) -> dict[str, Any]:
        chamber = self.scenario.chamber
        obstacle = None
        if self.engine.obstacle is not None and self.engine.obstacle.wall_span_um:
            x0, x1 = self.engine.obstacle.wall_span_um
            obstacle = {
                "x0_um": x0,
                "x1_um": x1,
                "height_um": self.engine.obstacle.wall_height_um,
            }
        return {
            "type": "hello",
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario.name,
            "frame_rate_hz": self.scenario.engine_config.frame_rate_hz,
            "geometry": {
                "width_um": chamber.width_um,
                "depth_um": chamber.depth_um,
                "height_um": chamber.height_um,
                "obstacle": obstacle,
            },
            "particles": [
                {"name": a.name, "radius_um": a.radius_um, "controlled": a.controlled}
                for a in self.engine.agents
            ],
            "keyboard_mapping": KEYBOARD_MAPPING,
            "mode": self.mode,
        }

    def frame_snapshot(self) -> dict[str, Any]:
        snap = self.engine.snapshot()
        measurements = self.engine.sense()
        return {
            "type": "frame",
            "t": snap["t"],
            "frame": snap["frame"],
            "mode": self.mode,
            "controller_running": self.planner is not None,
            "command": self.last_command.to_dict(),
            "particles": [
                {
                    **p,
                    "blur": next(
                        (m.focus_blur for m in measurements if m.name == p["name"]), 0.0
                    ),
                }
                for p in snap["particles"]
            ],
            "cargo": snap["cargo"],
            "waypoints": [
                {"x_um": w.x_um, "y_um": w.y_um, "plane": w.plane} for w in self.waypoints
            ],
        }

    async def _drain_inbox(self) -> None:
        while True:
            try:
                item = self.inbox.get_nowait()
            except asyncio.QueueEmpty:
                return
            msg, channel = item["msg"], item["channel"]
            channel.send_reply(self._apply(msg))

    def _frame_command(self) -> FieldCommand:
        if self.mode == "manual":
            return self.manual.command()
        if self.planner is not None:
            controlled = self.engine.controlled.name
            measurement = next(
                m for m in self.engine.sense() if m.name == controlled
            )
            command = self.planner.update(measurement)
            if command is None:
                self.planner = None
                return FieldCommand()
            return command
        return FieldCommand()

    async def _run(self) -> None:
        period = 1.0 / self.scenario.engine_config.frame_rate_hz
        while not self._stopping:
            await self._drain_inbox()
            command = self._frame_command()
            self.engine.step_frame(command)
            self.last_command = command
            frame = self.frame_snapshot()
            for client in list(self.clients):
                client.offer_frame(frame)
            if self.time_scale > 0:
                await asyncio.sleep(period / self.time_scale)
            else:
                await asyncio.sleep(0)

    # -------------------------------------------------------------- clients
    def register(self) -> ClientChannel:
        channel = ClientChannel()
        self.clients.add(channel)
        return channel

    def unregister(self, channel: ClientChannel) -> None:
        channel.closed = True
        self.clients.discard(channel)
