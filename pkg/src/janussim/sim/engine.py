"""Deterministic fixed-step simulation of Janus particles in a microchamber.

Every particle is exposed to the same chamber-wide actuation each step,
scaled by its own heterogeneity profile. Inertia is neglected (low Reynolds
number): commands map to velocities instantly, except for a short first-order
realignment of the in-plane heading toward the planar field azimuth.

The vertical state machine is bottom -> lifting -> {top | descending} and
top -> descending -> bottom. A particle pinned at the ceiling by the gradient
stays in `lifting` until the gradient is released, at which point the
electrostatic trapping test decides between `top` and `descending`.

Internal step is 1 ms by default with sensing decimated to the control frame
rate. All randomness flows through one seeded generator, so a given
(configuration, seed, command sequence) reproduces bit-identical trajectories.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from ..fields.laplace import PotentialGrid, ceiling_holding_profile
from ..physics.electrokinetics import (
    ElectrokineticParams,
    ModelValidityError,
    threshold_voltage_normalized,
)
from ..physics.mobility import MobilityModel, electric_velocity, rolling_velocity
from ..physics.particle import FluidEnv, ParticleSpec, settling
from .commands import FieldCommand, HardwareEnvelope
from .state import CargoSpec, CargoState, HeterogeneityProfile, ParticleState, Plane


class InvariantViolation(RuntimeError):
    """Defensive check failed; should be unreachable."""


@dataclass(frozen=True)
class Chamber:
    height_um: float = 120.0
    width_um: float = 1200.0
    depth_um: float = 1200.0

    def __post_init__(self) -> None:
        if min(self.height_um, self.width_um, self.depth_um) <= 0.0:
            raise ValueError("chamber dimensions must be positive")


@dataclass(frozen=True)
class EngineConfig:
    dt_s: float = 1e-3
    frame_rate_hz: float = 20.0
    noise_um: float = 0.0
    v_max_um_s: float = 500.0
    lift_velocity_um_s: float = 5.0
    lift_gradient_threshold_mt_m: float = 1000.0
    descent_calibration: float = 2.5
    voltage_scale: float = 6.0
    roll_offset_max_v: float = 0.0
    roll_offset_saturation_hz: float = 10.0
    heading_tau_s: float = 0.1
    flip_on_transition_prob: float = 0.1
    stick_slow_rotation_factor: float = 0.2
    slow_rotation_max_hz: float = 1.0
    unstick_rate_per_s: float = 0.5
    cargo_dwell_out_s: float = 6.0

    def __post_init__(self) -> None:
        if not (0.0 < self.dt_s <= 0.1):
            raise ValueError("dt must lie in (0, 0.1] s")
        n = 1.0 / (self.frame_rate_hz * self.dt_s)
        if abs(n - round(n)) > 1e-9:
            raise ValueError("frame period must be an integer number of steps")

    @property
    def steps_per_frame(self) -> int:
        return int(round(1.0 / (self.frame_rate_hz * self.dt_s)))


@dataclass
class ParticleAgent:
    name: str
    spec: ParticleSpec
    profile: HeterogeneityProfile
    state: ParticleState
    controlled: bool = False

    def __post_init__(self) -> None:
        # heterogeneous size folds into an adjusted spec once
        self.scaled_spec = self.spec.scaled(self.profile.radius_scale)
        self.radius_um = self.scaled_spec.drag_radius * 1e6


@dataclass(frozen=True)
class Measurement:
    name: str
    x_um: float
    y_um: float
    focus_blur: float
    t_s: float


class ObstacleWorld:
    """Solved obstacle field slice placed across the chamber.

    The 2D solve lives in the (x, z) vertical plane; the wall extends along y.
    Supplies the local ceiling-holding factor, the floor elevation, and the
    in-plane DEP drift produced by grad(|E|^2).
    """

    def __init__(
        self,
        grid: PotentialGrid,
        wall_x_center_um: float,
        dep_sign: int = 1,
        dep_coefficient: float = 0.0,
        viscosity: float = 1e-3,
    ):
        self.grid = grid
        self.dep_sign = dep_sign
        self.dep_coefficient = dep_coefficient
        self.viscosity = viscosity
        self.map_width_um = grid.domain.width * 1e6
        self.x_offset_um = wall_x_center_um - 0.5 * self.map_width_um
        xs, holding = ceiling_holding_profile(grid, grid.domain.height)
        self._holding_xs_um = xs * 1e6
        self._holding = holding
        rects = [
            inc
            for inc in grid.domain.inclusions
            if inc.shape == "rectangle" and inc.y_min == 0.0
        ]
        if rects:
            wall = rects[0]
            self.wall_height_um = wall.height * 1e6
            half = 0.5 * wall.width * 1e6
            cx = wall.x_center * 1e6 + self.x_offset_um
            self.wall_span_um = (cx - half, cx + half)
        else:
            self.wall_height_um = 0.0
            self.wall_span_um = None

    def _map_x_m(self, x_um: float) -> float:
        x = (x_um - self.x_offset_um) * 1e-6
        return min(max(x, 0.0), self.grid.domain.width)

    def holding_factor(self, x_um: float) -> float:
        x = (x_um - self.x_offset_um) * 1e-6
        if x <= 0.0 or x >= self.grid.domain.width:
            return 1.0
        return float(np.interp(x * 1e6, self._holding_xs_um, self._holding))

    def ground_height_um(self, x_um: float) -> float:
        if self.wall_span_um and self.wall_span_um[0] <= x_um <= self.wall_span_um[1]:
            return self.wall_height_um
        return 0.0

    def dep_drift_um_s(self, x_um: float, z_um: float, drag_radius_m: float) -> float:
        """Horizontal DEP drift velocity at the particle position."""
        if self.dep_coefficient == 0.0:
            return 0.0
        x = self._map_x_m(x_um)
        y = min(max(z_um * 1e-6, 0.0), self.grid.domain.height)
        fx = self.dep_sign * self.dep_coefficient * self.grid.value_at(self.grid.grad_e2_x, x, y)
        return fx / (6.0 * math.pi * self.viscosity * drag_radius_m) * 1e6


class Engine:
    """Owns all world state; advance it one control frame at a time."""

    def __init__(
        self,
        chamber: Chamber,
        agents: Sequence[ParticleAgent],
        mobility: MobilityModel,
        ek_params: ElectrokineticParams,
        fluid: FluidEnv,
        config: EngineConfig = EngineConfig(),
        seed: int = 0,
        obstacle: ObstacleWorld | None = None,
        cargo: Sequence[CargoState] = (),
        envelope: HardwareEnvelope = HardwareEnvelope(),
    ):
        self.chamber = chamber
        self.agents = list(agents)
        self.mobility = mobility
        self.ek_params = ek_params
        self.fluid = fluid
        self.config = config
        self.seed = seed
        self.obstacle = obstacle
        self.cargo = list(cargo)
        self.envelope = envelope
        self.rng = np.random.default_rng(seed)
        self.step_count = 0
        self.frame_count = 0
        self.field_phase = 0.0
        self._threshold_cache: dict[tuple[int, float], float] = {}
        self._descent_speed_um_s = [
            settling(a.scaled_spec, fluid).terminal_velocity * 1e6 / config.descent_calibration
            for a in self.agents
        ]
        for agent in self.agents:
            self._check_invariants(agent)

    # ------------------------------------------------------------------ time
    @property
    def time_s(self) -> float:
        return self.step_count * self.config.dt_s

    # ------------------------------------------------------------- geometry
    def ceiling_z_um(self, agent: ParticleAgent) -> float:
        return self.chamber.height_um - agent.radius_um

    def ground_z_um(self, agent: ParticleAgent, x_um: float) -> float:
        base = self.obstacle.ground_height_um(x_um) if self.obstacle else 0.0
        return base + agent.radius_um

    # ------------------------------------------------------------- stepping
    def step_frame(self, command: FieldCommand) -> None:
        command.validate(self.envelope)
        for _ in range(self.config.steps_per_frame):
            self._advance(command)
        self.frame_count += 1

    def _advance(self, cmd: FieldCommand) -> None:
        dt = self.config.dt_s
        rot = cmd.rotation
        if rot is not None and rot.frequency_hz > 0.0:
            self.field_phase += 2.0 * math.pi * rot.frequency_hz * rot.sense * dt
        for index, agent in enumerate(self.agents):
            self._step_particle(index, agent, cmd, dt)
        self._update_cargo(cmd)
        self.step_count += 1

    # ------------------------------------------------------------ particles
    def _step_particle(self, index: int, agent: ParticleAgent, cmd: FieldCommand, dt: float) -> None:
        state = agent.state
        cfg = self.config
        self._update_stuck(agent, cmd, dt)

        grad_z = cmd.magnetic_gradient_mt_m[2]
        lifting_gradient = grad_z >= cfg.lift_gradient_threshold_mt_m
        ceiling = self.ceiling_z_um(agent)
        ground = self.ground_z_um(agent, state.x_um)

        if state.plane is Plane.BOTTOM:
            if lifting_gradient:
                self._transition(agent, Plane.LIFTING)
            elif state.z_um > ground + 1e-9:
                self._transition(agent, Plane.DESCENDING)
        elif state.plane is Plane.LIFTING:
            if lifting_gradient:
                state.z_um = min(state.z_um + cfg.lift_velocity_um_s * dt, ceiling)
            else:
                if state.z_um >= ceiling - 1e-9 and self._trapped(index, agent, cmd):
                    self._transition(agent, Plane.TOP, flip_draw=True)
                else:
                    self._transition(agent, Plane.DESCENDING)
        elif state.plane is Plane.TOP:
            if not self._trapped(index, agent, cmd):
                self._transition(agent, Plane.DESCENDING)
        elif state.plane is Plane.DESCENDING:
            state.z_um -= self._descent_speed_um_s[index] * dt
            if state.z_um <= ground:
                state.z_um = ground
                self._transition(agent, Plane.BOTTOM, flip_draw=True)

        self._relax_heading(agent, cmd, dt)

        if state.plane in (Plane.BOTTOM, Plane.TOP) and not state.stuck:
            vx, vy = self._planar_velocity(agent, cmd)
            speed = math.hypot(vx, vy)
            if speed > cfg.v_max_um_s:
                scale = cfg.v_max_um_s / speed
                vx *= scale
                vy *= scale
            self._move_planar(agent, vx * dt, vy * dt)

    def _update_stuck(self, agent: ParticleAgent, cmd: FieldCommand, dt: float) -> None:
        p = agent.profile.stick_probability_per_s
        if p <= 0.0:
            return
        cfg = self.config
        rot = cmd.rotation
        slow_rolling = (
            rot is not None and 0.0 < rot.frequency_hz <= cfg.slow_rotation_max_hz
        )
        state = agent.state
        if state.stuck:
            rate = cfg.unstick_rate_per_s * (
                1.0 / cfg.stick_slow_rotation_factor if slow_rolling else 1.0
            )
            if self.rng.random() < rate * dt:
                state.stuck = False
        else:
            rate = p * (cfg.stick_slow_rotation_factor if slow_rolling else 1.0)
            if self.rng.random() < rate * dt:
                state.stuck = True

    def _transition(self, agent: ParticleAgent, new_plane: Plane, flip_draw: bool = False) -> None:
        state = agent.state
        if new_plane is state.plane:
            return
        state.plane = new_plane
        if flip_draw and self.config.flip_on_transition_prob > 0.0:
            if self.rng.random() < self.config.flip_on_transition_prob:
                state.metal_side_flip = -state.metal_side_flip

    def force_flip(self, name: str) -> None:
        """Invert which hemisphere leads for one particle (orientation flip)."""
        agent = self.agent(name)
        agent.state.metal_side_flip = -agent.state.metal_side_flip

    # -------------------------------------------------------------- heading
    def _field_azimuth_inclination(self, cmd: FieldCommand) -> tuple[float | None, float]:
        """Instantaneous planar azimuth (None when undefined) and inclination
        from +z, both in degrees."""
        rot = cmd.rotation
        if rot is not None and rot.frequency_hz > 0.0:
            ax, ay, az = rot.axis
            # basis of the rotation plane: u1 horizontal, u2 completes it
            u1 = (ay, -ax, 0.0)
            n1 = math.hypot(u1[0], u1[1])
            if n1 < 1e-12:
                u1 = (1.0, 0.0, 0.0)
                n1 = 1.0
            u1 = (u1[0] / n1, u1[1] / n1, 0.0)
            u2 = (
                ay * u1[2] - az * u1[1],
                az * u1[0] - ax * u1[2],
                ax * u1[1] - ay * u1[0],
            )
            c, s = math.cos(self.field_phase), math.sin(self.field_phase)
            b = (
                c * u1[0] + s * u2[0],
                c * u1[1] + s * u2[1],
                c * u1[2] + s * u2[2],
            )
            bxy = math.hypot(b[0], b[1])
            azimuth = math.degrees(math.atan2(u1[1], u1[0]))
            inclination = math.degrees(math.atan2(bxy, b[2]))
            return azimuth, inclination
        bx, by, bz = cmd.magnetic_field_mt
        bxy = math.hypot(bx, by)
        inclination = math.degrees(math.atan2(bxy, bz)) if (bxy > 0 or bz != 0) else 90.0
        if bxy < 1e-9:
            return None, inclination
        return math.degrees(math.atan2(by, bx)), inclination

    def _relax_heading(self, agent: ParticleAgent, cmd: FieldCommand, dt: float) -> None:
        azimuth, _ = self._field_azimuth_inclination(cmd)
        if azimuth is None:
            return
        target = azimuth + agent.profile.heading_offset_deg
        state = agent.state
        # alignment is nematic: +/-180 deg are equivalent
        delta = (target - state.heading_deg + 90.0) % 180.0 - 90.0
        blend = 1.0 - math.exp(-dt / self.config.heading_tau_s)
        state.heading_deg = (state.heading_deg + blend * delta + 180.0) % 360.0 - 180.0

    # ------------------------------------------------------------ velocities
    def _planar_velocity(self, agent: ParticleAgent, cmd: FieldCommand) -> tuple[float, float]:
        state = agent.state
        vx = vy = 0.0
        rot = cmd.rotation
        if rot is not None and rot.frequency_hz > 0.0:
            speed = (
                rolling_velocity(
                    rot.frequency_hz, agent.scaled_spec, self.mobility, field_on=cmd.ac_output
                )
                * 1e6
                * agent.profile.mobility_scale
            )
            ax, ay, _ = rot.axis
            # rolling direction = axis x z_hat, inverted on the ceiling
            dx, dy = ay, -ax
            n = math.hypot(dx, dy)
            if n > 1e-12:
                sign = float(rot.sense) * (-1.0 if state.plane is Plane.TOP else 1.0)
                vx += speed * sign * dx / n
                vy += speed * sign * dy / n
        if cmd.ac_output and cmd.ac_voltage_pp > 0.0:
            _, inclination = self._field_azimuth_inclination(cmd)
            eff = self._inclination_efficiency(agent.profile, inclination)
            signed = (
                electric_velocity(cmd.ac_voltage_pp, cmd.ac_frequency_hz, self.mobility, eff)
                * 1e6
                * agent.profile.mobility_scale
                * state.metal_side_flip
            )
            h = math.radians(state.heading_deg)
            # propulsion is perpendicular to the aligned interface direction
            vx += signed * -math.sin(h)
            vy += signed * math.cos(h)
        if self.obstacle is not None:
            vx += self.obstacle.dep_drift_um_s(
                state.x_um, state.z_um, agent.scaled_spec.drag_radius
            )
        return vx, vy

    @staticmethod
    def _inclination_efficiency(profile: HeterogeneityProfile, inclination_deg: float) -> float:
        u = (inclination_deg - profile.optimal_inclination_deg) / profile.inclination_width_deg
        return math.exp(-u * u)

    def _move_planar(self, agent: ParticleAgent, dx_um: float, dy_um: float) -> None:
        state = agent.state
        r = agent.radius_um
        new_x = state.x_um + dx_um
        new_y = min(max(state.y_um + dy_um, r), self.chamber.depth_um - r)
        if (
            self.obstacle is not None
            and self.obstacle.wall_span_um is not None
            and state.plane is Plane.BOTTOM
        ):
            x0, x1 = self.obstacle.wall_span_um
            wall_top = self.obstacle.wall_height_um
            below_top = state.z_um < wall_top + r - 1e-9
            if below_top:
                if state.x_um <= x0 - r and new_x > x0 - r:
                    new_x = x0 - r
                elif state.x_um >= x1 + r and new_x < x1 + r:
                    new_x = x1 + r
        new_x = min(max(new_x, r), self.chamber.width_um - r)
        state.x_um = new_x
        state.y_um = new_y
        if state.plane is Plane.BOTTOM:
            ground = self.ground_z_um(agent, new_x)
            if ground < state.z_um - 1e-9:
                # rolled off an edge; fall under gravity
                self._transition(agent, Plane.DESCENDING)
            else:
                state.z_um = ground

    # -------------------------------------------------------------- trapping
    def _required_holding_voltage(self, index: int, agent: ParticleAgent, cmd: FieldCommand) -> float | None:
        key = (index, cmd.ac_frequency_hz)
        v_norm = self._threshold_cache.get(key)
        if v_norm is None:
            params = self.ek_params.with_particle_radius(agent.scaled_spec.drag_radius)
            try:
                v_norm = threshold_voltage_normalized(cmd.ac_frequency_hz, params)
            except (ModelValidityError, ValueError):
                v_norm = math.inf
            self._threshold_cache[key] = v_norm
        if math.isinf(v_norm):
            return None
        offset = 0.0
        rot = cmd.rotation
        if self.config.roll_offset_max_v > 0.0 and rot is not None:
            frac = min(rot.frequency_hz / self.config.roll_offset_saturation_hz, 1.0)
            offset = self.config.roll_offset_max_v * frac
        return self.config.voltage_scale * v_norm + offset

    def _trapped(self, index: int, agent: ParticleAgent, cmd: FieldCommand) -> bool:
        if not cmd.ac_output or cmd.ac_voltage_pp <= 0.0:
            return False
        required = self._required_holding_voltage(index, agent, cmd)
        if required is None:
            return False
        holding = (
            self.obstacle.holding_factor(agent.state.x_um) if self.obstacle is not None else 1.0
        )
        # holding force scales with the local |E|^2, i.e. with holding * V^2
        return holding * cmd.ac_voltage_pp**2 >= required**2

    def trapping_check(self, name: str, cmd: FieldCommand) -> bool:
        index = self._index_of(name)
        return self._trapped(index, self.agents[index], cmd)

    # ----------------------------------------------------------------- cargo
    def _trap_site(self, agent: ParticleAgent, spec: CargoSpec) -> tuple[float, float, float]:
        state = agent.state
        h = math.radians(state.heading_deg)
        r = agent.radius_um
        if spec.trap_site == "metal_equator":
            ox, oy = -math.cos(h) * r, -math.sin(h) * r
        elif spec.trap_site == "ps_equator":
            ox, oy = math.cos(h) * r, math.sin(h) * r
        else:  # interface
            ox, oy = -math.sin(h) * r, math.cos(h) * r
        return state.x_um + ox, state.y_um + oy, state.z_um

    def _cargo_distance(self, cargo: CargoState, site: tuple[float, float, float]) -> float:
        return math.sqrt(
            (cargo.x_um - site[0]) ** 2
            + (cargo.y_um - site[1]) ** 2
            + (cargo.z_um - site[2]) ** 2
        )

    def _update_cargo(self, cmd: FieldCommand) -> None:
        carriers = [a for a in self.agents if a.spec.kind == "janus"]
        if not carriers:
            return
        for cargo in self.cargo:
            spec = cargo.spec
            holds = (
                cmd.ac_output
                and cmd.ac_voltage_pp >= spec.hold_min_voltage
                and spec.frequency_traps(cmd.ac_frequency_hz)
            )
            if cargo.status == "attached":
                agent = self.agents[cargo.carrier]
                if not cmd.ac_output:
                    cargo.status = "free"
                    cargo.carrier = None
                    agent.state.attached_cargo.remove(cargo.cargo_id)
                elif not holds:
                    cargo.status = "released_nearby"
                    cargo.released_at_s = self.time_s
                    agent.state.attached_cargo.remove(cargo.cargo_id)
                else:
                    cargo.x_um, cargo.y_um, cargo.z_um = self._trap_site(agent, spec)
            elif cargo.status == "released_nearby":
                if not cmd.ac_output:
                    cargo.status = "free"
                    cargo.carrier = None
                elif holds:
                    agent = self.agents[cargo.carrier]
                    site = self._trap_site(agent, spec)
                    if self._cargo_distance(cargo, site) <= spec.reattach_radius_um:
                        cargo.status = "attached"
                        cargo.released_at_s = None
                        agent.state.attached_cargo.append(cargo.cargo_id)
                        cargo.x_um, cargo.y_um, cargo.z_um = site
                    else:
                        cargo.status = "lost"
                elif self.time_s - (cargo.released_at_s or 0.0) > self.config.cargo_dwell_out_s:
                    cargo.status = "lost"
            elif cargo.status == "free" and holds:
                best = None
                best_d = math.inf
                for index, agent in enumerate(self.agents):
                    if agent.spec.kind != "janus":
                        continue
                    d = self._cargo_distance(cargo, self._trap_site(agent, spec))
                    if d < best_d:
                        best, best_d = index, d
                if best is not None and best_d <= spec.reattach_radius_um:
                    agent = self.agents[best]
                    cargo.status = "attached"
                    cargo.carrier = best
                    agent.state.attached_cargo.append(cargo.cargo_id)
                    cargo.x_um, cargo.y_um, cargo.z_um = self._trap_site(agent, spec)

    # ---------------------------------------------------------------- access
    def _index_of(self, name: str) -> int:
        for i, agent in enumerate(self.agents):
            if agent.name == name:
                return i
        raise KeyError(name)

    def agent(self, name: str) -> ParticleAgent:
        return self.agents[self._index_of(name)]

    @property
    def controlled(self) -> ParticleAgent:
        for agent in self.agents:
            if agent.controlled:
                return agent
        raise InvariantViolation("no controlled particle in the roster")

    # --------------------------------------------------------------- sensing
    def sense(self) -> list[Measurement]:
        """Per-particle synthetic camera measurement at the current frame."""
        noise = self.config.noise_um
        out = []
        t = self.time_s
        for agent in self.agents:
            x, y = agent.state.x_um, agent.state.y_um
            if noise > 0.0:
                x += self.rng.normal(0.0, noise)
                y += self.rng.normal(0.0, noise)
            r = agent.radius_um
            travel = self.chamber.height_um - 2.0 * r
            blur = (agent.state.z_um - r) / travel if travel > 0 else 0.0
            out.append(
                Measurement(
                    name=agent.name,
                    x_um=x,
                    y_um=y,
                    focus_blur=min(max(blur, 0.0), 1.0),
                    t_s=t,
                )
            )
        return out

    def snapshot(self) -> dict[str, Any]:
        return {
            "t": self.time_s,
            "frame": self.frame_count,
            "particles": [
                {"name": a.name, "controlled": a.controlled, **a.state.to_dict()}
                for a in self.agents
            ],
            "cargo": [c.to_dict() for c in self.cargo],
        }

    # ------------------------------------------------------------ invariants
    def _check_invariants(self, agent: ParticleAgent) -> None:
        state = agent.state
        r = agent.radius_um
        if state.plane is Plane.BOTTOM:
            expected = self.ground_z_um(agent, state.x_um)
            if abs(state.z_um - expected) > 1e-6:
                raise InvariantViolation(
                    f"{agent.name}: bottom plane requires z == ground ({expected}), got {state.z_um}"
                )
        elif state.plane is Plane.TOP:
            if abs(state.z_um - self.ceiling_z_um(agent)) > 1e-6:
                raise InvariantViolation(f"{agent.name}: top plane requires z at ceiling")
        elif not (r < state.z_um < self.chamber.height_um - r):
            raise InvariantViolation(f"{agent.name}: transit plane requires interior z")
