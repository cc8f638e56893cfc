"""Empirical propulsion laws: magnetic rolling, AC electric mobility, and the
fluorescence-intensity alignment-angle inversion.

The rolling law is linear in the rotation rate up to step-out with a 1/omega
desynchronization decay above it. Electric propulsion scales with voltage
squared through a signed, tabulated mobility-vs-frequency curve: positive
means dielectric-side-forward (low-frequency band), negative metal-side-
forward (intermediate band), near zero in the MHz band.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .particle import ParticleSpec

# (frequency Hz, mobility m/s per V^2). Signs: + dielectric-forward,
# - metal-forward; magnitudes give tens of um/s at ~10 Vpp.
DEFAULT_MOBILITY_CURVE = (
    (5e2, 0.28e-6),
    (1e3, 0.35e-6),
    (2e3, 0.33e-6),
    (5e3, 0.18e-6),
    (1e4, 0.0),
    (2e4, -0.22e-6),
    (5e4, -0.30e-6),
    (1e5, -0.18e-6),
    (5e5, -0.004e-6),
    (5e6, -0.002e-6),
    (2e7, -0.001e-6),
)


@dataclass(frozen=True)
class MobilityModel:
    """Calibrated velocity laws for one particle batch.

    ``rolling_slip`` maps rim speed to translation; the with-field variant is
    larger (electrostatic attraction raises traction) while the with-field
    step-out is lower (added resistance to rotation).
    """

    rolling_slip: float = 0.15
    rolling_slip_with_field: float = 0.24
    stepout_hz: float = 25.0
    stepout_with_field_hz: float = 18.0
    mobility_curve: tuple[tuple[float, float], ...] = DEFAULT_MOBILITY_CURVE
    stepout_decay_exponent: float = 1.0
    voltage_exponent: float = 2.0

    def __post_init__(self) -> None:
        if not (0.0 < self.rolling_slip <= 1.0):
            raise ValueError("rolling_slip must be in (0, 1]")
        if self.rolling_slip_with_field < self.rolling_slip:
            raise ValueError("rolling_slip_with_field must be >= rolling_slip")
        if self.stepout_hz <= 0.0 or self.stepout_with_field_hz <= 0.0:
            raise ValueError("step-out frequencies must be positive")
        if self.stepout_with_field_hz > self.stepout_hz:
            raise ValueError("with-field step-out must not exceed the field-free one")
        curve = self.mobility_curve
        if len(curve) < 3:
            raise ValueError("mobility curve needs at least 3 knots")
        freqs = [f for f, _ in curve]
        if freqs != sorted(freqs) or freqs[0] <= 0.0:
            raise ValueError("mobility curve knots must be positive and ascending")
        coeffs = [c for _, c in curve]
        peak = max(abs(c) for c in coeffs)
        if peak == 0.0:
            raise ValueError("mobility curve is identically zero")
        first_neg = next((i for i, c in enumerate(coeffs) if c < 0.0), None)
        if first_neg is None or not any(c > 0.0 for c in coeffs[:first_neg]):
            raise ValueError(
                "mobility curve must cross zero from a positive low-frequency band "
                "to a negative intermediate band"
            )
        tail = [abs(c) for f, c in curve if f >= 1e6]
        if not tail or max(tail) > 0.02 * peak:
            raise ValueError("mobility must decay toward zero in the MHz band")

    def mobility(self, frequency_hz: float) -> float:
        """Signed mobility coefficient, interpolated linearly in log frequency."""
        if frequency_hz <= 0.0:
            raise ValueError("frequency_hz must be positive")
        curve = self.mobility_curve
        if frequency_hz <= curve[0][0]:
            return curve[0][1]
        if frequency_hz >= curve[-1][0]:
            return curve[-1][1]
        x = math.log10(frequency_hz)
        for (f0, c0), (f1, c1) in zip(curve, curve[1:]):
            if frequency_hz <= f1:
                x0, x1 = math.log10(f0), math.log10(f1)
                return c0 + (c1 - c0) * (x - x0) / (x1 - x0)
        return curve[-1][1]

    def peak_mobility(self) -> float:
        return max(abs(c) for _, c in self.mobility_curve)


def rolling_velocity(
    rotation_hz: float,
    spec: ParticleSpec,
    model: MobilityModel,
    field_on: bool,
) -> float:
    """Translation speed from synchronized rolling at ``rotation_hz``.

    Above step-out the particle desynchronizes and the time-averaged speed
    decays as (stepout/omega)^n from its step-out value.
    """
    if rotation_hz < 0.0:
        raise ValueError("rotation_hz must be non-negative")
    slip = model.rolling_slip_with_field if field_on else model.rolling_slip
    stepout = model.stepout_with_field_hz if field_on else model.stepout_hz
    rim = 2.0 * math.pi * spec.metal_radius * slip
    if rotation_hz <= stepout:
        return rim * rotation_hz
    return rim * stepout * (stepout / rotation_hz) ** model.stepout_decay_exponent


def electric_velocity(
    voltage_pp: float,
    frequency_hz: float,
    model: MobilityModel,
    inclination_efficiency: float = 1.0,
) -> float:
    """Signed AC propulsion speed; sign follows the mobility curve convention."""
    if voltage_pp < 0.0:
        raise ValueError("voltage_pp must be non-negative")
    if not (0.0 <= inclination_efficiency <= 1.0):
        raise ValueError("inclination_efficiency must lie in [0, 1]")
    if voltage_pp == 0.0:
        return 0.0
    coeff = model.mobility(frequency_hz)
    return coeff * voltage_pp**model.voltage_exponent * inclination_efficiency


def estimate_i_max(mean_intensity_90: float, i_min: float) -> float:
    """Estimator for the dielectric-side-down reference intensity,
    I_max ~= 2 * I_bar(90 deg) - I_min."""
    return 2.0 * mean_intensity_90 - i_min


def alignment_angle_from_intensity(
    mean_intensity: float,
    i_min: float,
    i_max: float,
    tolerance: float = 1e-9,
) -> float:
    """Interface alignment angle (degrees) from areal fluorescence intensity.

    Normalizes the mean intensity between the metal-down (i_min) and
    dielectric-down (i_max) references and inverts alpha = 2 asin(sqrt(I*)).
    """
    if i_max <= i_min:
        raise ValueError("i_max must exceed i_min")
    span = i_max - i_min
    i_star = (mean_intensity - i_min) / span
    if i_star < -tolerance or i_star > 1.0 + tolerance:
        raise ValueError(
            f"mean intensity {mean_intensity!r} outside [{i_min!r}, {i_max!r}]"
        )
    i_star = min(1.0, max(0.0, i_star))
    return math.degrees(2.0 * math.asin(math.sqrt(i_star)))
