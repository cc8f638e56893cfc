"""Live pose and identity of the simulated particles and cargo.

Positions are in micrometers within the chamber frame: x/y span the imaging
plane, z is height above the floor electrode. ``heading_deg`` is the in-plane
angle of the interface alignment direction the planar magnetic field acts on;
electic propulsion runs perpendicular to it, with ``metal_side_flip``
selecting which hemisphere leads.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Plane(str, enum.Enum):
    BOTTOM = "bottom"
    LIFTING = "lifting"
    TOP = "top"
    DESCENDING = "descending"


# the only transitions the vertical state machine may take
LEGAL_TRANSITIONS = {
    (Plane.BOTTOM, Plane.LIFTING),
    (Plane.LIFTING, Plane.TOP),
    (Plane.LIFTING, Plane.DESCENDING),
    (Plane.TOP, Plane.DESCENDING),
    (Plane.DESCENDING, Plane.BOTTOM),
}


@dataclass(frozen=True)
class HeterogeneityProfile:
    """Per-particle response scaling: size/mobility spread, alignment offset,
    the inclination-efficiency bell, and random surface sticking."""

    radius_scale: float = 1.0
    mobility_scale: float = 1.0
    heading_offset_deg: float = 0.0
    optimal_inclination_deg: float = 70.0
    inclination_width_deg: float = 30.0
    stick_probability_per_s: float = 0.0

    def __post_init__(self) -> None:
        if self.radius_scale <= 0.0 or self.mobility_scale <= 0.0:
            raise ValueError("scales must be positive")
        if not (0.0 < self.optimal_inclination_deg < 180.0):
            raise ValueError("optimal inclination must lie in (0, 180) degrees")
        if self.inclination_width_deg <= 0.0:
            raise ValueError("inclination width must be positive")
        if self.stick_probability_per_s < 0.0:
            raise ValueError("stick probability must be non-negative")


@dataclass
class ParticleState:
    x_um: float
    y_um: float
    z_um: float
    plane: Plane = Plane.BOTTOM
    heading_deg: float = 0.0
    metal_side_flip: int = 1
    attached_cargo: list[int] = field(default_factory=list)
    stuck: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "x": self.x_um,
            "y": self.y_um,
            "z": self.z_um,
            "plane": self.plane.value,
            "heading_deg": self.heading_deg,
            "flip": self.metal_side_flip,
            "cargo": list(self.attached_cargo),
            "stuck": self.stuck,
        }


@dataclass(frozen=True)
class CargoSpec:
    """DEP response of one cargo type and its trapping geometry on the carrier."""

    dep_crossover_hz: float = 350e3
    response_above_crossover: str = "ndep"
    trap_site: str = "metal_equator"
    hold_min_voltage: float = 3.0
    reattach_radius_um: float = 30.0

    def __post_init__(self) -> None:
        if self.dep_crossover_hz <= 0.0:
            raise ValueError("crossover frequency must be positive")
        if self.response_above_crossover not in ("ndep", "pdep"):
            raise ValueError("response must be 'ndep' or 'pdep'")
        allowed = {
            "ndep": ("metal_equator",),
            "pdep": ("ps_equator", "interface"),
        }[self.response_above_crossover]
        if self.trap_site not in allowed:
            raise ValueError(
                f"trap site {self.trap_site!r} inconsistent with "
                f"{self.response_above_crossover} response"
            )
        if self.hold_min_voltage < 0.0 or self.reattach_radius_um <= 0.0:
            raise ValueError("bad cargo holding parameters")

    def frequency_traps(self, frequency_hz: float) -> bool:
        """Whether the applied frequency is on the trapping side of the crossover."""
        if self.response_above_crossover == "ndep":
            return frequency_hz >= self.dep_crossover_hz
        return frequency_hz < self.dep_crossover_hz


@dataclass
class CargoState:
    cargo_id: int
    spec: CargoSpec
    x_um: float
    y_um: float
    z_um: float
    status: str = "free"  # free | attached | released_nearby | lost
    carrier: int | None = None
    released_at_s: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.cargo_id,
            "x": self.x_um,
            "y": self.y_um,
            "z": self.z_um,
            "status": self.status,
            "carrier": self.carrier,
        }
