"""Induced-dipole spectra and the normalized ceiling-trapping threshold voltage.

A metallo-dielectric sphere between parallel plate electrodes is described by
three dimensionless frequencies (double-layer RC charging, Maxwell-Wagner
dispersion, electrode screening) plus the surface-to-bulk conductance ratio.
The normalized threshold voltage is a proportionality only; conversion to
volts is a separate fitted scale factor applied downstream.

All inputs are SI; frequencies are ordinary (Hz) and converted to angular
internally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

VACUUM_PERMITTIVITY = 8.854e-12  # F/m

# Guard radius around the dielectric-dipole pole at (k_tilde, omega_mw) = (1, 0).
POLE_GUARD_EPS = 1e-9


class SingularDipoleError(ValueError):
    """Evaluation requested within the guard radius of the dielectric-dipole pole."""


class ModelValidityError(ValueError):
    """The threshold-voltage bracket is non-positive; the model does not apply."""


class DimensionlessFrequencies(NamedTuple):
    omega_rc: float
    omega_mw: float
    omega_h: float


@dataclass(frozen=True)
class ElectrokineticParams:
    """Solution/particle parameter set for the dipole and threshold models.

    ``half_gap`` is half the distance between the two planar electrodes.
    """

    bulk_conductivity: float   # S/m
    surface_conductance: float  # S
    particle_radius: float     # m
    half_gap: float            # m
    debye_length: float        # m
    diffusion_coeff: float     # m^2/s
    medium_permittivity: float  # F/m

    def __post_init__(self) -> None:
        for name in (
            "bulk_conductivity",
            "surface_conductance",
            "particle_radius",
            "half_gap",
            "debye_length",
            "diffusion_coeff",
            "medium_permittivity",
        ):
            value = getattr(self, name)
            if not (value > 0.0) or not math.isfinite(value):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")

    @classmethod
    def from_solution(
        cls,
        bulk_conductivity: float,
        surface_conductance: float,
        particle_radius: float,
        half_gap: float,
        diffusion_coeff: float = 2e-9,
        relative_permittivity: float = 80.0,
    ) -> "ElectrokineticParams":
        """Build a parameter set with the Debye length derived from the solution,
        lambda_0 = sqrt(eps * D / K_e)."""
        eps = relative_permittivity * VACUUM_PERMITTIVITY
        debye = math.sqrt(eps * diffusion_coeff / bulk_conductivity)
        return cls(
            bulk_conductivity=bulk_conductivity,
            surface_conductance=surface_conductance,
            particle_radius=particle_radius,
            half_gap=half_gap,
            debye_length=debye,
            diffusion_coeff=diffusion_coeff,
            medium_permittivity=eps,
        )

    def with_particle_radius(self, particle_radius: float) -> "ElectrokineticParams":
        return ElectrokineticParams(
            bulk_conductivity=self.bulk_conductivity,
            surface_conductance=self.surface_conductance,
            particle_radius=particle_radius,
            half_gap=self.half_gap,
            debye_length=self.debye_length,
            diffusion_coeff=self.diffusion_coeff,
            medium_permittivity=self.medium_permittivity,
        )

    @property
    def k_tilde(self) -> float:
        """Dimensionless surface-to-bulk conductance (K_s/a)/K_e."""
        return (self.surface_conductance / self.particle_radius) / self.bulk_conductivity

    def dimensionless(self, frequency_hz: float) -> DimensionlessFrequencies:
        """The RC, Maxwell-Wagner and electrode-screening dimensionless frequencies."""
        w = 2.0 * math.pi * frequency_hz
        scale = self.debye_length / self.diffusion_coeff
        return DimensionlessFrequencies(
            omega_rc=w * scale * self.particle_radius,
            omega_mw=w * scale * self.debye_length,
            omega_h=w * scale * self.half_gap,
        )


def dipole_metal(omega_rc: float) -> complex:
    """Dipole coefficient of a homogeneous metallic sphere with RC charging."""
    if omega_rc < 0.0:
        raise ValueError("omega_rc must be non-negative")
    return -0.5 - 1.5 * (1j * omega_rc) / (2.0 - 1j * omega_rc)


def dipole_dielectric(
    k_tilde: float, omega_mw: float, pole_eps: float = POLE_GUARD_EPS
) -> complex:
    """Dipole coefficient of a homogeneous dielectric sphere with surface conduction."""
    if k_tilde < 0.0 or omega_mw < 0.0:
        raise ValueError("k_tilde and omega_mw must be non-negative")
    denom = complex(k_tilde - 1.0, omega_mw)
    if abs(denom) < pole_eps:
        raise SingularDipoleError(
            f"dielectric dipole pole: |k_tilde - 1 + i*omega_mw| = {abs(denom):.3g} < {pole_eps:g}"
        )
    return -0.5 + 1.5 * k_tilde / denom


def effective_dipole(frequency_hz: float, params: ElectrokineticParams) -> complex:
    """Screened effective dipole of the half-metal half-dielectric sphere."""
    if not frequency_hz > 0.0:
        raise ValueError("frequency_hz must be positive")
    o = params.dimensionless(frequency_hz)
    kt = params.k_tilde
    denom = complex(kt - 1.0, o.omega_mw)
    if abs(denom) < POLE_GUARD_EPS:
        raise SingularDipoleError(
            f"dielectric dipole pole at f={frequency_hz:g} Hz (k_tilde={kt:g})"
        )
    bracket = 1.0 - 6.0 / (2.0 - 1j * o.omega_rc) + 3.0 * kt / denom
    return (o.omega_h / (4.0 * (1j + o.omega_h))) * bracket


def _real_bracket(k_tilde: float, omega_rc: float, omega_mw: float) -> float:
    return (
        1.0
        - 12.0 / (4.0 + omega_rc**2)
        + 3.0 * k_tilde * (k_tilde - 1.0) / ((k_tilde - 1.0) ** 2 + omega_mw**2)
    )


def threshold_voltage_normalized(
    frequency_hz: float, params: ElectrokineticParams
) -> float:
    """Normalized AC voltage required to hold the particle at the ceiling.

    Proportionality only: the high-frequency asymptote is 4 and the
    low-frequency electrode-screening branch rises as 4/omega_h^2.
    """
    if not frequency_hz > 0.0:
        raise ValueError("frequency_hz must be positive")
    o = params.dimensionless(frequency_hz)
    bracket = _real_bracket(params.k_tilde, o.omega_rc, o.omega_mw)
    if bracket <= 0.0:
        raise ModelValidityError(
            f"threshold bracket {bracket:.6g} <= 0 at f={frequency_hz:g} Hz; "
            "model outside validity range"
        )
    return 4.0 * (1.0 + 1.0 / o.omega_h**2) / bracket


class InflectionFrequencies(NamedTuple):
    omega_mw: float
    frequency_mw_hz: float
    omega_rc: float
    frequency_rc_hz: float


def closed_form_inflections(k_tilde: float) -> tuple[float, float]:
    """Closed-form curvature-change points of the two asymptotic branches.

    Returns (omega_mw_root, omega_rc_root); defined for k_tilde > 1.
    """
    if k_tilde <= 1.0:
        raise ModelValidityError("inflection roots require k_tilde > 1")
    omega_mw = math.sqrt((k_tilde - 1.0) * (4.0 * k_tilde - 1.0) / 3.0)
    omega_rc = 2.0 * math.sqrt((k_tilde + 2.0) / (3.0 * (4.0 * k_tilde - 1.0)))
    return omega_mw, omega_rc


def _second_derivative_sign_change(xs: np.ndarray, ys: np.ndarray) -> list[float]:
    """Zeros of d2y/dx2 (linear x) estimated on a non-uniform grid."""
    x0, x1, x2 = xs[:-2], xs[1:-1], xs[2:]
    y0, y1, y2 = ys[:-2], ys[1:-1], ys[2:]
    d2 = 2.0 * (
        y0 / ((x1 - x0) * (x2 - x0))
        - y1 / ((x2 - x1) * (x1 - x0))
        + y2 / ((x2 - x1) * (x2 - x0))
    )
    zeros = []
    for i in range(len(d2) - 1):
        a, b = d2[i], d2[i + 1]
        if a == 0.0 or not np.isfinite(a) or not np.isfinite(b):
            continue
        if (a > 0.0) != (b > 0.0):
            zeros.append(float(x1[i] + (x1[i + 1] - x1[i]) * (-a) / (b - a)))
    return zeros


def detect_inflection_frequencies(
    params: ElectrokineticParams, points_per_decade: int = 400
) -> InflectionFrequencies:
    """Numerically locate the curvature-change points of the threshold sweep.

    Curvature is taken with respect to linear frequency within each regime.
    The low/mid-frequency electrode-screening factor (1 + 1/omega_h^2) is
    divided out before detecting the RC-branch point: its residual curvature
    otherwise masks the sign change of the much flatter RC branch.

    Requires k_tilde >= 2: closer to the pole the Maxwell-Wagner dispersion
    bleeds into the RC band and the RC curvature change ceases to exist as a
    feature of the full model.
    """
    kt = params.k_tilde
    if kt < 2.0:
        raise ModelValidityError(
            f"inflection detection needs separated regimes (k_tilde >= 2), got {kt:.3g}"
        )
    root_mw, root_rc = closed_form_inflections(kt)  # brackets the scan windows
    scale = params.debye_length / params.diffusion_coeff

    def freq_from_omega_mw(omega: float) -> float:
        return omega / (2.0 * math.pi * scale * params.debye_length)

    def freq_from_omega_rc(omega: float) -> float:
        return omega / (2.0 * math.pi * scale * params.particle_radius)

    # Maxwell-Wagner branch: the screening factor is already ~1 here.
    o_mw = np.logspace(
        math.log10(root_mw) - 1.0,
        math.log10(root_mw) + 1.0,
        2 * points_per_decade,
    )
    v = np.array(
        [threshold_voltage_normalized(freq_from_omega_mw(o), params) for o in o_mw]
    )
    mw_zeros = _second_derivative_sign_change(o_mw, v)
    if not mw_zeros:
        raise ModelValidityError("no Maxwell-Wagner inflection detected")
    omega_mw = min(mw_zeros, key=lambda z: abs(math.log(z / root_mw)))

    # RC branch, screening factor stripped.
    o_rc = np.logspace(
        math.log10(root_rc) - 1.5,
        math.log10(root_rc) + 1.5,
        3 * points_per_decade,
    )
    v_stripped = []
    for o in o_rc:
        f = freq_from_omega_rc(o)
        omega_h = params.dimensionless(f).omega_h
        v_stripped.append(
            threshold_voltage_normalized(f, params) / (1.0 + 1.0 / omega_h**2)
        )
    rc_zeros = _second_derivative_sign_change(o_rc, np.array(v_stripped))
    if not rc_zeros:
        raise ModelValidityError("no RC inflection detected")
    omega_rc = min(rc_zeros, key=lambda z: abs(math.log(z / root_rc)))

    return InflectionFrequencies(
        omega_mw=omega_mw,
        frequency_mw_hz=freq_from_omega_mw(omega_mw),
        omega_rc=omega_rc,
        frequency_rc_hz=freq_from_omega_rc(omega_rc),
    )


def threshold_sweep(
    params: ElectrokineticParams, frequencies_hz: Sequence[float]
) -> list[tuple[float, float, float, float, float]]:
    """Rows of (frequency, omega_rc, omega_mw, omega_h, v_norm).

    Frequencies where the model bracket is non-positive yield NaN for v_norm
    rather than being dropped.
    """
    rows = []
    for f in frequencies_hz:
        o = params.dimensionless(f)
        try:
            v = threshold_voltage_normalized(f, params)
        except ModelValidityError:
            v = math.nan
        rows.append((float(f), o.omega_rc, o.omega_mw, o.omega_h, v))
    return rows
