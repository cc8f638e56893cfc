from .electrokinetics import (
    ElectrokineticParams,
    DimensionlessFrequencies,
    ModelValidityError,
    SingularDipoleError,
    closed_form_inflections,
    detect_inflection_frequencies,
    dipole_dielectric,
    dipole_metal,
    effective_dipole,
    threshold_voltage_normalized,
)
from .particle import (
    BuoyantParticleError,
    FluidEnv,
    Layer,
    MassBudget,
    ParticleSpec,
    SettlingResult,
    layered_mass_and_volume,
    settling,
    standard_janus,
)
from .mobility import (
    MobilityModel,
    alignment_angle_from_intensity,
    electric_velocity,
    estimate_i_max,
    rolling_velocity,
)

__all__ = [
    "BuoyantParticleError",
    "DimensionlessFrequencies",
    "ElectrokineticParams",
    "FluidEnv",
    "Layer",
    "MassBudget",
    "MobilityModel",
    "ModelValidityError",
    "ParticleSpec",
    "SettlingResult",
    "SingularDipoleError",
    "alignment_angle_from_intensity",
    "closed_form_inflections",
    "detect_inflection_frequencies",
    "dipole_dielectric",
    "dipole_metal",
    "effective_dipole",
    "electric_velocity",
    "estimate_i_max",
    "layered_mass_and_volume",
    "rolling_velocity",
    "settling",
    "standard_janus",
    "threshold_voltage_normalized",
]
