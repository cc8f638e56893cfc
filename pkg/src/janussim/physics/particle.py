"""Layered-shell mass model and Stokes settling of capped microspheres.

A coated particle is a polystyrene sphere whose upper hemisphere carries
nested hemispherical metal shells; a bare particle is the plain sphere.
Settling balances gravity, buoyancy and Stokes drag; the drag radius is the
(slightly larger) metal-cap radius for coated particles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


class BuoyantParticleError(ValueError):
    """Effective density does not exceed the fluid density; no settling."""


@dataclass(frozen=True)
class Layer:
    name: str
    density: float    # kg/m^3
    thickness: float  # m

    def __post_init__(self) -> None:
        if self.density <= 0.0 or self.thickness < 0.0:
            raise ValueError(f"bad layer {self.name}: density>0, thickness>=0 required")


# Default e-beam deposition recipe (Cr adhesion, Ni magnetic, Au finish).
DEFAULT_LAYERS = (
    Layer("Cr", 7192.0, 15e-9),
    Layer("Ni", 8907.0, 55e-9),
    Layer("Au", 19283.0, 15e-9),
)


@dataclass(frozen=True)
class ParticleSpec:
    """Physical build of one particle: PS core plus optional metal cap layers."""

    core_radius: float          # m
    core_density: float = 1050.0  # kg/m^3
    layers: tuple[Layer, ...] = ()
    kind: str = "bare"

    def __post_init__(self) -> None:
        if self.core_radius <= 0.0 or self.core_density <= 0.0:
            raise ValueError("core radius and density must be positive")
        if self.kind not in ("janus", "bare"):
            raise ValueError(f"kind must be 'janus' or 'bare', got {self.kind!r}")
        if self.kind == "bare" and self.layers:
            raise ValueError("bare particles carry no layers")

    @property
    def metal_radius(self) -> float:
        """Outer radius of the coated hemisphere (core radius when bare)."""
        return self.core_radius + sum(layer.thickness for layer in self.layers)

    @property
    def drag_radius(self) -> float:
        return self.metal_radius if self.kind == "janus" else self.core_radius

    def scaled(self, radius_scale: float) -> "ParticleSpec":
        """Spec with the core radius scaled; layer thicknesses are unchanged."""
        if radius_scale <= 0.0:
            raise ValueError("radius_scale must be positive")
        return ParticleSpec(
            core_radius=self.core_radius * radius_scale,
            core_density=self.core_density,
            layers=self.layers,
            kind=self.kind,
        )


def standard_janus(core_radius: float, core_density: float = 1050.0) -> ParticleSpec:
    """Janus spec with the default Cr/Ni/Au layer stack."""
    return ParticleSpec(
        core_radius=core_radius,
        core_density=core_density,
        layers=DEFAULT_LAYERS,
        kind="janus",
    )


@dataclass(frozen=True)
class FluidEnv:
    density: float = 1000.0      # kg/m^3
    viscosity: float = 1e-3      # Pa*s
    gravity: float = 9.81        # m/s^2
    chamber_height: float = 120e-6  # m

    def __post_init__(self) -> None:
        for name in ("density", "viscosity", "gravity", "chamber_height"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


class MassBudget(NamedTuple):
    mass: float               # kg
    volume: float             # m^3
    effective_density: float  # kg/m^3
    metal_radius: float       # m


def layered_mass_and_volume(spec: ParticleSpec) -> MassBudget:
    """Total mass, volume, effective density and cap radius of the particle.

    Each cap layer is a hemispherical shell V = (2*pi/3)(r_out^3 - r_in^3);
    the total volume combines the core hemisphere with the capped hemisphere.
    """
    core_volume = 4.0 / 3.0 * math.pi * spec.core_radius**3
    mass = spec.core_density * core_volume
    r_in = spec.core_radius
    for layer in spec.layers:
        r_out = r_in + layer.thickness
        mass += layer.density * 2.0 * math.pi / 3.0 * (r_out**3 - r_in**3)
        r_in = r_out
    if spec.kind == "bare":
        volume = core_volume
    else:
        volume = 2.0 * math.pi / 3.0 * (spec.core_radius**3 + r_in**3)
    return MassBudget(mass, volume, mass / volume, r_in)


class SettlingResult(NamedTuple):
    terminal_velocity: float  # m/s
    time_constant: float      # s
    settling_time: float      # s


def settling(spec: ParticleSpec, env: FluidEnv) -> SettlingResult:
    """Terminal velocity, drag time constant and ceiling-to-floor settling time.

    The exponential transient is negligible (tau << settling time), so the
    drop time is simply the fall height divided by the terminal velocity.
    """
    budget = layered_mass_and_volume(spec)
    if budget.effective_density <= env.density:
        raise BuoyantParticleError(
            f"effective density {budget.effective_density:.1f} kg/m^3 does not "
            f"exceed fluid density {env.density:.1f} kg/m^3"
        )
    radius = spec.drag_radius
    drag = 6.0 * math.pi * env.viscosity * radius
    v_t = budget.mass * env.gravity * (1.0 - env.density / budget.effective_density) / drag
    tau = budget.mass / drag
    fall_height = env.chamber_height - 2.0 * radius
    if fall_height <= 0.0:
        raise ValueError("chamber height must exceed the particle diameter")
    return SettlingResult(v_t, tau, fall_height / v_t)
