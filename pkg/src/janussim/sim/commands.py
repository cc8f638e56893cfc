"""The actuation word applied to the whole chamber each control frame:
magnetic field vector, gradient, optional rotating-field spec, and the AC
electric output.

One command addresses every particle in the chamber; there is no per-particle
actuation. Field magnitudes are validated against a hardware envelope.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

Vec3 = tuple[float, float, float]


class CommandError(ValueError):
    """Command violates the hardware envelope or is malformed."""


@dataclass(frozen=True)
class HardwareEnvelope:
    max_field_mt: float = 20.0
    max_gradient_mt_m: float = 2500.0
    max_voltage_pp: float = 20.0


@dataclass(frozen=True)
class RotationSpec:
    """Uniform field rotating about ``axis`` at ``frequency_hz``; ``sense``
    flips the rotation direction."""

    axis: Vec3
    frequency_hz: float
    sense: int = 1

    def __post_init__(self) -> None:
        norm = math.sqrt(sum(c * c for c in self.axis))
        if abs(norm - 1.0) > 1e-6:
            raise CommandError(f"rotation axis must be unit length, |axis|={norm:.6f}")
        if self.frequency_hz < 0.0:
            raise CommandError("rotation frequency must be non-negative")
        if self.sense not in (1, -1):
            raise CommandError("rotation sense must be +1 or -1")


def rotation_about(axis: Vec3, frequency_hz: float, sense: int = 1) -> RotationSpec:
    """Rotation spec with the axis normalized."""
    norm = math.sqrt(sum(c * c for c in axis))
    if norm == 0.0:
        raise CommandError("rotation axis must be non-zero")
    unit = (axis[0] / norm, axis[1] / norm, axis[2] / norm)
    return RotationSpec(axis=unit, frequency_hz=frequency_hz, sense=sense)


@dataclass(frozen=True)
class FieldCommand:
    magnetic_field_mt: Vec3 = (0.0, 0.0, 0.0)
    magnetic_gradient_mt_m: Vec3 = (0.0, 0.0, 0.0)
    rotation: RotationSpec | None = None
    ac_voltage_pp: float = 0.0
    ac_frequency_hz: float = 0.0
    ac_output: bool = False

    def validate(self, envelope: HardwareEnvelope = HardwareEnvelope()) -> None:
        b = math.sqrt(sum(c * c for c in self.magnetic_field_mt))
        if b > envelope.max_field_mt + 1e-9:
            raise CommandError(f"field magnitude {b:.2f} mT exceeds {envelope.max_field_mt} mT")
        g = math.sqrt(sum(c * c for c in self.magnetic_gradient_mt_m))
        if g > envelope.max_gradient_mt_m + 1e-6:
            raise CommandError(
                f"gradient {g:.0f} mT/m exceeds {envelope.max_gradient_mt_m} mT/m"
            )
        if self.ac_voltage_pp < 0.0 or self.ac_voltage_pp > envelope.max_voltage_pp + 1e-9:
            raise CommandError(
                f"voltage {self.ac_voltage_pp:.2f} Vpp outside [0, {envelope.max_voltage_pp}]"
            )
        if self.ac_output and self.ac_frequency_hz <= 0.0:
            raise CommandError("AC output enabled with non-positive frequency")

    @property
    def field_magnitude_mt(self) -> float:
        return math.sqrt(sum(c * c for c in self.magnetic_field_mt))

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "b_mt": list(self.magnetic_field_mt),
            "grad_mt_m": list(self.magnetic_gradient_mt_m),
            "ac_vpp": self.ac_voltage_pp,
            "ac_hz": self.ac_frequency_hz,
            "ac_on": self.ac_output,
        }
        if self.rotation is not None:
            d["rotation"] = {
                "axis": list(self.rotation.axis),
                "hz": self.rotation.frequency_hz,
                "sense": self.rotation.sense,
            }
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "FieldCommand":
        rotation = None
        if d.get("rotation") is not None:
            r = d["rotation"]
            rotation = RotationSpec(
                axis=tuple(r["axis"]), frequency_hz=r["hz"], sense=int(r["sense"])
            )
        return cls(
            magnetic_field_mt=tuple(d.get("b_mt", (0.0, 0.0, 0.0))),
            magnetic_gradient_mt_m=tuple(d.get("grad_mt_m", (0.0, 0.0, 0.0))),
            rotation=rotation,
            ac_voltage_pp=float(d.get("ac_vpp", 0.0)),
            ac_frequency_hz=float(d.get("ac_hz", 0.0)),
            ac_output=bool(d.get("ac_on", False)),
        )
