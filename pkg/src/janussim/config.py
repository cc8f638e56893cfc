"""Key/value configuration files (INI syntax) for parameter sets and scenarios.

Config values use bench units (um, nm, mT, V, uS/cm, nS); they are converted
to SI where the physics layer needs it. Parse problems raise ConfigError so
the CLI can exit with the dedicated config-error code.
"""
from __future__ import annotations

import configparser
from pathlib import Path

from .physics.electrokinetics import ElectrokineticParams
from .physics.mobility import DEFAULT_MOBILITY_CURVE, MobilityModel
from .physics.particle import FluidEnv, Layer, ParticleSpec


class ConfigError(Exception):
    pass


def parse_config_text(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad config syntax: {exc}") from exc
    return cp


def load_config(path: str | Path) -> configparser.ConfigParser:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return parse_config_text(p.read_text())


_MISSING = object()


def get_value(cp, section: str, key: str, cast, default=_MISSING):
    if not cp.has_section(section) and default is not _MISSING:
        return default
    if not cp.has_section(section):
        raise ConfigError(f"missing [{section}] section")
    raw = cp.get(section, key, fallback=None)
    if raw is None:
        if default is _MISSING:
            raise ConfigError(f"missing {key} in [{section}]")
        return default
    try:
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key} in [{section}]: {raw!r}") from exc


def get_float(cp, section, key, default=_MISSING) -> float:
    return get_value(cp, section, key, float, default)


def get_int(cp, section, key, default=_MISSING) -> int:
    return get_value(cp, section, key, int, default)


def get_str(cp, section, key, default=_MISSING) -> str:
    return get_value(cp, section, key, str, default)


def get_bool(cp, section, key, default=_MISSING) -> bool:
    return get_value(cp, section, key, bool, default)


def get_float_list(cp, section, key, default=_MISSING) -> list[float]:
    raw = get_value(cp, section, key, str, default)
    if raw is default and not isinstance(raw, str):
        return raw
    try:
        return [float(tok) for tok in str(raw).replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"bad list for {key} in [{section}]: {raw!r}") from exc


def fluid_from_config(cp, section: str = "fluid") -> FluidEnv:
    try:
        return FluidEnv(
            density=get_float(cp, section, "density_kg_m3", 1000.0),
            viscosity=get_float(cp, section, "viscosity_pa_s", 1e-3),
            gravity=get_float(cp, section, "gravity_m_s2", 9.81),
            chamber_height=get_float(cp, section, "chamber_height_um", 120.0) * 1e-6,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_layers(raw: str) -> tuple[Layer, ...]:
    """Comma-separated ``name thickness_nm density_kg_m3`` triples."""
    layers = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split()
        if len(parts) != 3:
            raise ConfigError(f"bad layer entry {chunk!r}; want 'name thickness_nm density'")
        try:
            layers.append(Layer(parts[0], float(parts[2]), float(parts[1]) * 1e-9))
        except ValueError as exc:
            raise ConfigError(f"bad layer entry {chunk!r}") from exc
    return tuple(layers)


DEFAULT_LAYER_TEXT = "Cr 15 7192, Ni 55 8907, Au 15 19283"


def particle_spec_from_section(cp, section: str) -> ParticleSpec:
    kind = get_str(cp, section, "kind", "janus")
    try:
        if kind == "bare":
            return ParticleSpec(
                core_radius=get_float(cp, section, "core_radius_um") * 1e-6,
                core_density=get_float(cp, section, "core_density_kg_m3", 1050.0),
                kind="bare",
            )
        layers = parse_layers(get_str(cp, section, "layers", DEFAULT_LAYER_TEXT))
        return ParticleSpec(
            core_radius=get_float(cp, section, "core_radius_um") * 1e-6,
            core_density=get_float(cp, section, "core_density_kg_m3", 1050.0),
            layers=layers,
            kind="janus",
        )
    except ValueError as exc:
        raise ConfigError(f"[{section}]: {exc}") from exc


def ek_params_from_config(cp, section: str = "electrokinetics") -> ElectrokineticParams:
    try:
        return ElectrokineticParams.from_solution(
            bulk_conductivity=get_float(cp, section, "k_e_us_cm", 4.0) * 1e-4,
            surface_conductance=get_float(cp, section, "k_s_ns", 100.0) * 1e-9,
            particle_radius=get_float(cp, section, "particle_radius_um", 5.0) * 1e-6,
            half_gap=get_float(cp, section, "half_gap_um", 60.0) * 1e-6,
            diffusion_coeff=get_float(cp, section, "diffusion_m2_s", 2e-9),
            relative_permittivity=get_float(cp, section, "rel_permittivity", 80.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[{section}]: {exc}") from exc


def mobility_from_config(cp, section: str = "mobility") -> MobilityModel:
    curve = DEFAULT_MOBILITY_CURVE
    raw = get_str(cp, section, "mobility_curve", "")
    if raw:
        knots = []
        for chunk in raw.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = chunk.split(":")
            if len(parts) != 2:
                raise ConfigError(f"bad mobility knot {chunk!r}; want 'freq_hz:um_per_s_V2'")
            knots.append((float(parts[0]), float(parts[1]) * 1e-6))
        curve = tuple(knots)
    try:
        return MobilityModel(
            rolling_slip=get_float(cp, section, "rolling_slip", 0.15),
            rolling_slip_with_field=get_float(cp, section, "rolling_slip_with_field", 0.24),
            stepout_hz=get_float(cp, section, "stepout_hz", 25.0),
            stepout_with_field_hz=get_float(cp, section, "stepout_with_field_hz", 18.0),
            mobility_curve=curve,
            stepout_decay_exponent=get_float(cp, section, "stepout_decay_exponent", 1.0),
            voltage_exponent=get_float(cp, section, "voltage_exponent", 2.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[{section}]: {exc}") from exc
