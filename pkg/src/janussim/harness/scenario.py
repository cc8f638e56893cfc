"""Scenario assembly and execution: config text -> engine + planner -> session
log, waypoint outcomes and metrics. Also the log replay check used by the
`replay` command.

A scenario config is a single INI file; see configs/ for working examples and
docs/protocol.md for the session-log format.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Any

from ..config import (
    ConfigError,
    ek_params_from_config,
    fluid_from_config,
    get_bool,
    get_float,
    get_int,
    get_str,
    mobility_from_config,
    parse_config_text,
    particle_spec_from_section,
)
from ..control.controllers import (
    Ortho4Config,
    Ortho4Controller,
    RollingController,
    RollingCtlConfig,
    SteeringController,
    SteeringCtlConfig,
    Waypoint,
)
from ..control.planner import InterplanarPlanner, PlannerConfig, WaypointOutcome
from ..fields.laplace import DomainSpec2D, Inclusion, solve_laplace
from ..sim.commands import FieldCommand
from ..sim.engine import (
    Chamber,
    Engine,
    EngineConfig,
    Measurement,
    ObstacleWorld,
    ParticleAgent,
)
from ..sim.logs import FrameRecord, SessionLog
from ..sim.state import CargoSpec, CargoState, HeterogeneityProfile, ParticleState, Plane
from .metrics import RunMetrics, compute_metrics
from .paths import generate_path


@dataclass
class ParticleEntry:
    name: str
    spec_section: str
    controlled: bool
    x_um: float
    y_um: float
    plane: str
    heading_deg: float
    profile: HeterogeneityProfile


@dataclass
class ObstacleSettings:
    wall_x_center_um: float
    wall_width_um: float
    wall_height_um: float
    slice_width_um: float
    grid_nx: int
    grid_ny: int
    tolerance: float
    dep_sign: int
    dep_coefficient: float


@functools.lru_cache(maxsize=8)
def _solved_obstacle_slice(
    slice_width_um: float,
    chamber_height_um: float,
    wall_width_um: float,
    wall_height_um: float,
    grid_nx: int,
    grid_ny: int,
    tolerance: float,
    top_potential: float,
):
    domain = DomainSpec2D(
        width=slice_width_um * 1e-6,
        height=chamber_height_um * 1e-6,
        grid_nx=grid_nx,
        grid_ny=grid_ny,
        bottom_potential=0.0,
        top_potential=top_potential,
        inclusions=(
            Inclusion(
                shape="rectangle",
                x_center=slice_width_um * 1e-6 / 2.0,
                width=wall_width_um * 1e-6,
                height=wall_height_um * 1e-6,
                y_min=0.0,
            ),
        ),
    )
    return solve_laplace(domain, tolerance=tolerance)


class Scenario:
    """Parsed scenario: chamber, roster, physics models, path and controller."""

    def __init__(self, config_text: str):
        cp = parse_config_text(config_text)
        self.config_text = config_text
        self.name = get_str(cp, "scenario", "name", "unnamed")
        self.seed = get_int(cp, "scenario", "seed", 0)
        self.duration_s = get_float(cp, "scenario", "duration_s", 300.0)
        self.repetitions = get_int(cp, "scenario", "repetitions", 1)
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        frame_rate = get_float(cp, "scenario", "frame_rate_hz", 20.0)

        self.chamber = Chamber(
            height_um=get_float(cp, "chamber", "height_um", 120.0),
            width_um=get_float(cp, "chamber", "width_um", 1200.0),
            depth_um=get_float(cp, "chamber", "depth_um", 1200.0),
        )
        self.fluid = fluid_from_config(cp)
        if abs(self.fluid.chamber_height * 1e6 - self.chamber.height_um) > 1e-6:
            self.fluid = fluid_from_config(cp)  # keep as configured; engine uses chamber
        self.ek_params = ek_params_from_config(cp)
        self.mobility = mobility_from_config(cp)

        try:
            self.engine_config = EngineConfig(
                dt_s=get_float(cp, "engine", "dt_ms", 1.0) * 1e-3,
                frame_rate_hz=frame_rate,
                noise_um=get_float(cp, "engine", "noise_um", 0.0),
                v_max_um_s=get_float(cp, "engine", "v_max_um_s", 500.0),
                lift_velocity_um_s=get_float(cp, "engine", "lift_velocity_um_s", 5.0),
                lift_gradient_threshold_mt_m=get_float(
                    cp, "engine", "lift_gradient_threshold_mt_m", 1000.0
                ),
                descent_calibration=get_float(cp, "engine", "descent_calibration", 2.5),
                voltage_scale=get_float(cp, "engine", "voltage_scale", 6.0),
                roll_offset_max_v=get_float(cp, "engine", "roll_offset_max_v", 0.0),
                roll_offset_saturation_hz=get_float(
                    cp, "engine", "roll_offset_saturation_hz", 10.0
                ),
                heading_tau_s=get_float(cp, "engine", "heading_tau_s", 0.1),
                flip_on_transition_prob=get_float(
                    cp, "engine", "flip_on_transition_prob", 0.1
                ),
                cargo_dwell_out_s=get_float(cp, "engine", "cargo_dwell_out_s", 6.0),
            )
        except ValueError as exc:
            raise ConfigError(f"[engine]: {exc}") from exc

        self.particles = self._parse_particles(cp)
        self.lap_waypoints = self._parse_path(cp)
        self.waypoints = self.lap_waypoints * self.repetitions
        self.controller_type = get_str(cp, "controller", "type", "rolling")
        self._cp = cp
        self.planner_config = self._parse_planner(cp)
        self.obstacle_settings = self._parse_obstacle(cp)
        self.cargo_entries = self._parse_cargo(cp)
        self.cargo_goal_x_min_um = (
            get_float(cp, "cargo", "goal_x_min_um", math.inf)
            if cp.has_section("cargo")
            else math.inf
        )
        self.build_navigator()  # fail fast on bad controller settings

    # ------------------------------------------------------------- parsing
    def _parse_particles(self, cp) -> list[ParticleEntry]:
        entries = []
        for section in cp.sections():
            if not section.startswith("particle"):
                continue
            name = section.split(None, 1)[1] if " " in section else "p0"
            profile = HeterogeneityProfile(
                radius_scale=get_float(cp, section, "radius_scale", 1.0),
                mobility_scale=get_float(cp, section, "mobility_scale", 1.0),
                heading_offset_deg=get_float(cp, section, "heading_offset_deg", 0.0),
                optimal_inclination_deg=get_float(
                    cp, section, "optimal_inclination_deg", 70.0
                ),
                inclination_width_deg=get_float(cp, section, "inclination_width_deg", 30.0),
                stick_probability_per_s=get_float(
                    cp, section, "stick_probability_per_s", 0.0
                ),
            )
            entries.append(
                ParticleEntry(
                    name=name,
                    spec_section=section,
                    controlled=get_bool(cp, section, "controlled", False),
                    x_um=get_float(cp, section, "x_um"),
                    y_um=get_float(cp, section, "y_um"),
                    plane=get_str(cp, section, "plane", "bottom"),
                    heading_deg=get_float(cp, section, "heading_deg", 0.0),
                    profile=profile,
                )
            )
        if not entries:
            raise ConfigError("no [particle ...] sections")
        if not any(e.controlled for e in entries):
            entries[0].controlled = True
        return entries

    def _parse_path(self, cp) -> list[Waypoint]:
        if not cp.has_section("path"):
            raise ConfigError("missing [path] section")
        kind = get_str(cp, "path", "kind")
        radius = get_float(cp, "path", "arrival_radius_um", 5.0)
        plane = get_str(cp, "path", "plane", "bottom")
        if kind == "rectangle":
            return generate_path(
                "rectangle",
                cx_um=get_float(cp, "path", "cx_um"),
                cy_um=get_float(cp, "path", "cy_um"),
                width_um=get_float(cp, "path", "width_um"),
                height_um=get_float(cp, "path", "height_um"),
                plane=plane,
                arrival_radius_um=radius,
            )
        if kind == "triangle":
            return generate_path(
                "triangle",
                cx_um=get_float(cp, "path", "cx_um"),
                cy_um=get_float(cp, "path", "cy_um"),
                size_um=get_float(cp, "path", "size_um"),
                plane=plane,
                arrival_radius_um=radius,
            )
        if kind == "lemniscate_mod":
            kwargs: dict[str, Any] = dict(
                cx_um=get_float(cp, "path", "cx_um"),
                cy_um=get_float(cp, "path", "cy_um"),
                half_width_um=get_float(cp, "path", "half_width_um", 150.0),
                n_points=get_int(cp, "path", "n_points", 24),
                corner_scale=get_float(cp, "path", "corner_scale", 1.25),
                plane=plane,
                arrival_radius_um=radius,
            )
            spacing = get_float(cp, "path", "max_spacing_um", 0.0)
            if spacing > 0.0:
                kwargs["max_spacing_um"] = spacing
            return generate_path("lemniscate_mod", **kwargs)
        if kind == "tau_letters":
            return generate_path(
                "tau_letters",
                origin_x_um=get_float(cp, "path", "origin_x_um", 200.0),
                origin_y_um=get_float(cp, "path", "origin_y_um", 200.0),
                letter_height_um=get_float(cp, "path", "letter_height_um", 120.0),
                spacing_um=get_float(cp, "path", "spacing_um", 100.0),
                arrival_radius_um=radius,
            )
        if kind == "custom":
            return generate_path(
                "custom",
                path=get_str(cp, "path", "file"),
                arrival_radius_um=radius,
            )
        raise ConfigError(f"unknown path kind {kind!r}")

    def _parse_planner(self, cp) -> PlannerConfig:
        dip = None
        if cp.has_section("planner") and cp.has_option("planner", "cargo_dip_vpp"):
            dip = (
                get_float(cp, "planner", "cargo_dip_vpp"),
                get_float(cp, "planner", "cargo_dip_s", 3.8),
            )
        try:
            return PlannerConfig(
                lift_standby_s=get_float(cp, "planner", "lift_standby_s", 22.0),
                descend_standby_s=get_float(cp, "planner", "descend_standby_s", 18.0),
                lift_field_mt=get_float(cp, "planner", "lift_field_mt", 15.0),
                lift_gradient_mt_m=get_float(cp, "planner", "lift_gradient_mt_m", 2000.0),
                attach_ac_vpp=get_float(cp, "planner", "attach_ac_vpp", 12.0),
                attach_ac_hz=get_float(cp, "planner", "attach_ac_hz", 5e6),
                cargo_dip=dip,
                waypoint_timeout_s=get_float(cp, "planner", "waypoint_timeout_s", 60.0),
            )
        except ValueError as exc:
            raise ConfigError(f"[planner]: {exc}") from exc

    def _parse_obstacle(self, cp) -> ObstacleSettings | None:
        if not cp.has_section("obstacle"):
            return None
        return ObstacleSettings(
            wall_x_center_um=get_float(cp, "obstacle", "wall_x_center_um"),
            wall_width_um=get_float(cp, "obstacle", "wall_width_um", 40.0),
            wall_height_um=get_float(cp, "obstacle", "wall_height_um", 50.0),
            slice_width_um=get_float(cp, "obstacle", "slice_width_um", 600.0),
            grid_nx=get_int(cp, "obstacle", "grid_nx", 192),
            grid_ny=get_int(cp, "obstacle", "grid_ny", 48),
            tolerance=get_float(cp, "obstacle", "tolerance", 1e-6),
            dep_sign=get_int(cp, "obstacle", "dep_sign", 1),
            dep_coefficient=get_float(cp, "obstacle", "dep_coefficient", 0.0),
        )

    def _parse_cargo(self, cp) -> list[tuple[CargoSpec, float, float, float]]:
        if not cp.has_section("cargo"):
            return []
        spec = CargoSpec(
            dep_crossover_hz=get_float(cp, "cargo", "crossover_khz", 350.0) * 1e3,
            response_above_crossover=get_str(cp, "cargo", "response", "ndep"),
            trap_site=get_str(cp, "cargo", "trap_site", "metal_equator"),
            hold_min_voltage=get_float(cp, "cargo", "hold_min_voltage", 3.0),
            reattach_radius_um=get_float(cp, "cargo", "reattach_radius_um", 30.0),
        )
        raw = get_str(cp, "cargo", "positions", "")
        entries = []
        z = get_float(cp, "cargo", "z_um", 0.55)
        for chunk in raw.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = chunk.split(",")
            if len(parts) != 2:
                raise ConfigError(f"bad cargo position {chunk!r}; want 'x_um,y_um'")
            entries.append((spec, float(parts[0]), float(parts[1]), z))
        return entries

    # ------------------------------------------------------------- building
    def build_obstacle(self) -> ObstacleWorld | None:
        s = self.obstacle_settings
        if s is None:
            return None
        grid = _solved_obstacle_slice(
            s.slice_width_um,
            self.chamber.height_um,
            s.wall_width_um,
            s.wall_height_um,
            s.grid_nx,
            s.grid_ny,
            s.tolerance,
            self.planner_config.attach_ac_vpp / 2.0,  # DC analogue of the AC amplitude
        )
        return ObstacleWorld(
            grid,
            wall_x_center_um=s.wall_x_center_um,
            dep_sign=s.dep_sign,
            dep_coefficient=s.dep_coefficient,
            viscosity=self.fluid.viscosity,
        )

    def build_engine(self, seed: int | None = None) -> Engine:
        agents = []
        for entry in self.particles:
            spec = particle_spec_from_section(self._cp, entry.spec_section)
            radius_um = spec.scaled(entry.profile.radius_scale).drag_radius * 1e6
            if entry.plane == "top":
                z = self.chamber.height_um - radius_um
                plane = Plane.TOP
            else:
                z = radius_um
                plane = Plane.BOTTOM
            state = ParticleState(
                x_um=entry.x_um,
                y_um=entry.y_um,
                z_um=z,
                plane=plane,
                heading_deg=entry.heading_deg,
            )
            agents.append(
                ParticleAgent(
                    name=entry.name,
                    spec=spec,
                    profile=entry.profile,
                    state=state,
                    controlled=entry.controlled,
                )
            )
        cargo = [
            CargoState(cargo_id=i, spec=spec, x_um=x, y_um=y, z_um=z)
            for i, (spec, x, y, z) in enumerate(self.cargo_entries)
        ]
        return Engine(
            chamber=self.chamber,
            agents=agents,
            mobility=self.mobility,
            ek_params=self.ek_params,
            fluid=self.fluid,
            config=self.engine_config,
            seed=self.seed if seed is None else seed,
            obstacle=self.build_obstacle(),
            cargo=cargo,
        )

    def build_navigator(self):
        cp = self._cp
        frame_rate = self.engine_config.frame_rate_hz
        if self.controller_type == "rolling":
            assist = None
            if cp.has_option("controller", "ac_assist_vpp"):
                assist = (
                    get_float(cp, "controller", "ac_assist_vpp"),
                    get_float(cp, "controller", "ac_assist_hz", 5e6),
                )
            cfg = RollingCtlConfig(
                omega_1_hz=get_float(cp, "controller", "omega_1_hz", 4.0),
                omega_2_hz=get_float(cp, "controller", "omega_2_hz", 10.0),
                d_max_um=get_float(cp, "controller", "d_max_um", 200.0),
                field_magnitude_mt=get_float(cp, "controller", "field_magnitude_mt", 3.5),
                ac_assist=assist,
            )
            return RollingController(cfg)
        if self.controller_type == "steering":
            cfg = SteeringCtlConfig(
                k_p=get_float(cp, "controller", "k_p", 0.1),
                error_threshold_deg=get_float(cp, "controller", "error_threshold_deg", 2.0),
                theta_cal_deg=get_float(cp, "controller", "theta_cal_deg", 70.0),
                ac_voltage_pp=get_float(cp, "controller", "ac_vpp", 10.0),
                ac_frequency_hz=get_float(cp, "controller", "ac_hz", 2e3),
                field_magnitude_mt=get_float(cp, "controller", "field_magnitude_mt", 2.0),
                speed_floor_um_s=get_float(cp, "controller", "speed_floor_um_s", 0.5),
                stall_frames=get_int(cp, "controller", "stall_frames", 40),
            )
            return SteeringController(cfg, frame_rate)
        if self.controller_type == "ortho4":
            cfg = Ortho4Config(
                omega_fast_hz=get_float(cp, "controller", "omega_fast_hz", 5.0),
                omega_slow_hz=get_float(cp, "controller", "omega_slow_hz", 0.5),
                line_deviation_threshold_um=get_float(
                    cp, "controller", "line_deviation_threshold_um", 10.0
                ),
                icep_hz=get_float(cp, "controller", "icep_hz", 2e3),
                sdep_hz=get_float(cp, "controller", "sdep_hz", 5e4),
                park_hz=get_float(cp, "controller", "park_hz", 5e6),
                voltage_pp=get_float(cp, "controller", "voltage_pp", 12.0),
                field_magnitude_mt=get_float(cp, "controller", "field_magnitude_mt", 3.5),
                flip_detect_frames=get_int(cp, "controller", "flip_detect_frames", 5),
            )
            return Ortho4Controller(cfg, frame_rate)
        raise ConfigError(f"unknown controller type {self.controller_type!r}")

    def build_planner(self) -> InterplanarPlanner:
        start_plane = next(e.plane for e in self.particles if e.controlled)
        return InterplanarPlanner(
            waypoints=list(self.waypoints),
            navigator=self.build_navigator(),
            cfg=self.planner_config,
            frame_rate_hz=self.engine_config.frame_rate_hz,
            start_plane=start_plane,
        )

    @classmethod
    def from_file(cls, path) -> "Scenario":
        from pathlib import Path

        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"scenario file not found: {p}")
        return cls(p.read_text())


def frame_record(engine: Engine, command: FieldCommand, measurements: list[Measurement]) -> FrameRecord:
    snap = engine.snapshot()
    return FrameRecord(
        t_s=snap["t"],
        frame=snap["frame"],
        command=command,
        particles=snap["particles"],
        cargo=snap["cargo"],
        measurements=[
            {"name": m.name, "x": m.x_um, "y": m.y_um, "blur": m.focus_blur, "t": m.t_s}
            for m in measurements
        ],
    )


@dataclass
class RunResult:
    log: SessionLog
    metrics: RunMetrics
    outcomes: list[WaypointOutcome]
    cargo_delivered: int
    all_waypoints_failed: bool


def run_scenario(scenario: Scenario, seed: int | None = None) -> RunResult:
    """Run the scenario deterministically and compute its metrics."""
    engine = scenario.build_engine(seed)
    planner = scenario.build_planner()
    effective_seed = scenario.seed if seed is None else seed
    log = SessionLog.new(
        scenario.name,
        effective_seed,
        scenario.config_text,
        extra={"frame_rate_hz": scenario.engine_config.frame_rate_hz},
    )
    controlled = engine.controlled.name
    max_frames = int(scenario.duration_s * scenario.engine_config.frame_rate_hz)
    for _ in range(max_frames):
        measurements = engine.sense()
        m_ctrl = next(m for m in measurements if m.name == controlled)
        command = planner.update(m_ctrl)
        if command is None:
            break
        engine.step_frame(command)
        log.append(frame_record(engine, command, measurements))
    delivered = 0
    if math.isfinite(scenario.cargo_goal_x_min_um):
        delivered = sum(
            1
            for c in engine.cargo
            if c.status != "lost" and c.x_um >= scenario.cargo_goal_x_min_um
        )
    metrics = compute_metrics(
        log,
        controlled,
        planner.outcomes,
        scenario.lap_waypoints,
        scenario.repetitions,
        cargo_delivered=delivered,
    )
    reached = sum(1 for o in planner.outcomes if o.outcome == "reached")
    return RunResult(
        log=log,
        metrics=metrics,
        outcomes=planner.outcomes,
        cargo_delivered=delivered,
        all_waypoints_failed=(reached == 0),
    )


@dataclass
class ReplayResult:
    match: bool
    frames_checked: int
    first_divergence: int | None = None
    detail: str = ""


def replay_session(log: SessionLog) -> ReplayResult:
    """Re-simulate from the logged config/seed, driving the recorded commands,
    and compare every frame record bit for bit."""
    config_text = log.header.get("config_text")
    if not config_text:
        return ReplayResult(False, 0, None, "log header carries no config_text")
    scenario = Scenario(config_text)
    engine = scenario.build_engine(log.header.get("seed", scenario.seed))
    for i, rec in enumerate(log.frames):
        measurements = engine.sense()
        engine.step_frame(rec.command)
        rebuilt = frame_record(engine, rec.command, measurements)
        if rebuilt.to_dict() != rec.to_dict():
            return ReplayResult(
                False,
                i,
                i,
                f"frame {i} diverges",
            )
    return ReplayResult(True, len(log.frames))
