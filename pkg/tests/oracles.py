"""Independent arbitrary-precision reference implementations used by the
tests. These deliberately re-derive every formula with mpmath rather than
calling the package, so agreement is a real cross-check."""
import mpmath as mp

mp.mp.dps = 50


def dipole_metal(omega_rc):
    o = mp.mpf(omega_rc)
    return -mp.mpf(1) / 2 - mp.mpf(3) / 2 * (1j * o) / (2 - 1j * o)


def dipole_dielectric(k_tilde, omega_mw):
    kt, o = mp.mpf(k_tilde), mp.mpf(omega_mw)
    return -mp.mpf(1) / 2 + mp.mpf(3) / 2 * kt / (kt - 1 + 1j * o)


def effective_dipole(omega_rc, omega_mw, omega_h, k_tilde):
    orc, omw, oh = mp.mpf(omega_rc), mp.mpf(omega_mw), mp.mpf(omega_h)
    kt = mp.mpf(k_tilde)
    bracket = 1 - 6 / (2 - 1j * orc) + 3 * kt / ((kt - 1) + 1j * omw)
    return (oh / (4 * (1j + oh))) * bracket


def threshold_voltage(omega_rc, omega_mw, omega_h, k_tilde):
    orc, omw, oh = mp.mpf(omega_rc), mp.mpf(omega_mw), mp.mpf(omega_h)
    kt = mp.mpf(k_tilde)
    bracket = 1 - 12 / (4 + orc**2) + 3 * kt * (kt - 1) / ((kt - 1) ** 2 + omw**2)
    return 4 * (1 + 1 / oh**2) / bracket


def settle_mass(core_radius, core_density, layers):
    """layers: iterable of (density, thickness)."""
    r = mp.mpf(core_radius)
    mass = mp.mpf(core_density) * 4 * mp.pi / 3 * r**3
    for density, thickness in layers:
        r_out = r + mp.mpf(thickness)
        mass += mp.mpf(density) * 2 * mp.pi / 3 * (r_out**3 - r**3)
        r = r_out
    return mass, r


def settle_numbers(core_radius, core_density, layers, fluid_density, viscosity, gravity, chamber_height):
    mass, r_metal = settle_mass(core_radius, core_density, layers)
    if layers:
        volume = 2 * mp.pi / 3 * (mp.mpf(core_radius) ** 3 + r_metal**3)
        radius = r_metal
    else:
        volume = 4 * mp.pi / 3 * mp.mpf(core_radius) ** 3
        radius = mp.mpf(core_radius)
    rho_eff = mass / volume
    drag = 6 * mp.pi * mp.mpf(viscosity) * radius
    v_t = mass * mp.mpf(gravity) * (1 - mp.mpf(fluid_density) / rho_eff) / drag
    tau = mass / drag
    t_settle = (mp.mpf(chamber_height) - 2 * radius) / v_t
    return float(v_t), float(tau), float(t_settle)
