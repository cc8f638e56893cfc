import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from janussim.physics.electrokinetics import (
    ElectrokineticParams,
    ModelValidityError,
    SingularDipoleError,
    closed_form_inflections,
    detect_inflection_frequencies,
    dipole_dielectric,
    dipole_metal,
    effective_dipole,
    threshold_sweep,
    threshold_voltage_normalized,
)

# independent arbitrary-precision evaluation, frozen before the build
D_EFF_1MHZ_TABLE2 = complex(0.97776390058946047, -0.16694682405839632)


class TestParams:
    def test_debye_length_from_solution(self, table2_params):
        # sqrt(eps*D/K_e) with the reference solution comes to 59.5 nm
        assert table2_params.debye_length * 1e9 == pytest.approx(59.5, abs=0.1)

    def test_k_tilde(self, table2_params):
        assert table2_params.k_tilde == pytest.approx(50.0)

    def test_positive_fields_enforced(self):
        with pytest.raises(ValueError):
            ElectrokineticParams(
                bulk_conductivity=-1.0,
                surface_conductance=1e-9,
                particle_radius=5e-6,
                half_gap=60e-6,
                debye_length=59.5e-9,
                diffusion_coeff=2e-9,
                medium_permittivity=7e-10,
            )

    def test_dimensionless_ordering(self, table2_params):
        o = table2_params.dimensionless(1e6)
        # lambda0 << a << H so omega_mw << omega_rc << omega_h
        assert o.omega_mw < o.omega_rc < o.omega_h

    @given(
        st.floats(min_value=1e-5, max_value=1e-2),
        st.floats(min_value=1e-9, max_value=1e-6),
    )
    @settings(max_examples=50, deadline=None)
    def test_from_solution_consistency(self, k_e, k_s):
        p = ElectrokineticParams.from_solution(k_e, k_s, 5e-6, 60e-6)
        expected = math.sqrt(p.medium_permittivity * p.diffusion_coeff / k_e)
        assert p.debye_length == pytest.approx(expected, rel=1e-12)


class TestDipoles:
    def test_metal_zero_frequency(self):
        assert dipole_metal(0.0) == pytest.approx(-0.5 + 0j)

    def test_metal_high_frequency_limit(self):
        assert dipole_metal(1e6) == pytest.approx(1.0 + 0j, abs=1e-5)

    def test_metal_at_two(self):
        assert dipole_metal(2.0) == pytest.approx(0.25 - 0.75j, abs=1e-12)

    def test_dielectric_zero_k(self):
        assert dipole_dielectric(0.0, 3.0) == pytest.approx(-0.5 + 0j)

    def test_dielectric_high_frequency(self):
        assert dipole_dielectric(50.0, 1e9) == pytest.approx(-0.5 + 0j, abs=1e-6)

    def test_dielectric_k50_static(self):
        assert dipole_dielectric(50.0, 0.0) == pytest.approx(-0.5 + 1.5 * 50 / 49, abs=1e-12)

    def test_dielectric_pole_guard(self):
        with pytest.raises(SingularDipoleError):
            dipole_dielectric(1.0, 0.0)
        with pytest.raises(SingularDipoleError):
            dipole_dielectric(1.0 + 1e-12, 1e-12)

    def test_effective_dipole_table2_1mhz(self, table2_params):
        d = effective_dipole(1e6, table2_params)
        assert d == pytest.approx(D_EFF_1MHZ_TABLE2, rel=1e-12)

    def test_effective_dipole_high_frequency_limit(self, table2_params):
        # all three dimensionless frequencies >> 1 drives d_eff to 1/4
        d = effective_dipole(1e12, table2_params)
        assert d == pytest.approx(0.25 + 0j, abs=1e-4)

    def test_effective_dipole_screened_regime(self, table2_params):
        # |d_eff| proportional to omega_h when omega_h << 1
        f1 = 1e-3
        f2 = 2e-3
        d1 = abs(effective_dipole(f1, table2_params))
        d2 = abs(effective_dipole(f2, table2_params))
        assert d2 / d1 == pytest.approx(2.0, rel=1e-3)


class TestOracleEquivalence:
    """Eqs for the metal, dielectric and effective dipoles against mpmath."""

    def test_thousand_random_draws(self):
        rng = np.random.default_rng(20240817)
        worst = 0.0
        for _ in range(1000):
            omega_rc = 10.0 ** rng.uniform(-6, 6)
            omega_mw = 10.0 ** rng.uniform(-6, 6)
            omega_h = 10.0 ** rng.uniform(-6, 6)
            k_tilde = 10.0 ** rng.uniform(-3, 3)
            if abs(complex(k_tilde - 1.0, omega_mw)) < 1e-6:
                continue
            dm = dipole_metal(omega_rc)
            dm_ref = complex(oracles.dipole_metal(omega_rc))
            worst = max(worst, abs(dm - dm_ref) / abs(dm_ref))
            de = dipole_dielectric(k_tilde, omega_mw)
            de_ref = complex(oracles.dipole_dielectric(k_tilde, omega_mw))
            worst = max(worst, abs(de - de_ref) / abs(de_ref))
            # exercise the screened combination on the same draw
            params = _params_from_dimensionless(omega_rc, omega_mw, omega_h, k_tilde)
            if params is not None:
                freq, p = params
                deff = effective_dipole(freq, p)
                o = p.dimensionless(freq)
                deff_ref = complex(
                    oracles.effective_dipole(o.omega_rc, o.omega_mw, o.omega_h, p.k_tilde)
                )
                if abs(deff_ref) > 1e-300:
                    worst = max(worst, abs(deff - deff_ref) / abs(deff_ref))
        assert worst < 1e-12

    def test_threshold_against_oracle(self, table2_params):
        for f in np.logspace(1, 8, 60):
            o = table2_params.dimensionless(f)
            ours = threshold_voltage_normalized(f, table2_params)
            ref = float(
                oracles.threshold_voltage(o.omega_rc, o.omega_mw, o.omega_h, 50.0)
            )
            assert ours == pytest.approx(ref, rel=1e-12)


def _params_from_dimensionless(omega_rc, omega_mw, omega_h, k_tilde):
    """Physical parameter set realizing the drawn dimensionless frequencies at
    1 kHz; returns None when the draw has no positive-geometry realization."""
    w = 2.0 * math.pi * 1e3
    d_coeff = 2e-9
    lam = omega_mw * d_coeff / (w * 1.0) if omega_mw > 0 else None
    if lam is None or lam <= 0:
        return None
    lam = math.sqrt(omega_mw * d_coeff / w)
    a = omega_rc * d_coeff / (w * lam)
    h = omega_h * d_coeff / (w * lam)
    if a <= 0 or h <= 0:
        return None
    k_e = 1e-3
    k_s = k_tilde * a * k_e
    try:
        p = ElectrokineticParams(
            bulk_conductivity=k_e,
            surface_conductance=k_s,
            particle_radius=a,
            half_gap=h,
            debye_length=lam,
            diffusion_coeff=d_coeff,
            medium_permittivity=7.0832e-10,
        )
    except ValueError:
        return None
    return 1e3, p


class TestThresholdVoltage:
    def test_high_frequency_asymptote(self, table2_params):
        scale = table2_params.debye_length**2 / table2_params.diffusion_coeff
        for omega_mw in (1e3, 1e4, 1e5):
            f = omega_mw / (2.0 * math.pi * scale)
            v = threshold_voltage_normalized(f, table2_params)
            assert v == pytest.approx(4.0, rel=0.01)

    def test_low_frequency_screening_branch(self, table2_params):
        scale = table2_params.debye_length * table2_params.half_gap / table2_params.diffusion_coeff
        f = 0.1 / (2.0 * math.pi * scale)
        v = threshold_voltage_normalized(f, table2_params)
        assert v == pytest.approx(4.0 / 0.1**2, rel=0.05)
        # the branch scales as omega_h^-2
        f_lo = f / 10.0
        v_lo = threshold_voltage_normalized(f_lo, table2_params)
        slope = math.log(v_lo / v) / math.log(0.1)
        assert slope == pytest.approx(-2.0, abs=0.02)

    def test_u_shape_above_plateau(self, table2_params):
        freqs = np.logspace(1, 9, 400)
        values = [threshold_voltage_normalized(f, table2_params) for f in freqs]
        plateau = min(values)
        assert all(v >= plateau - 1e-12 for v in values)
        # plateau sits in the mid band, rises on both sides
        idx = int(np.argmin(values))
        assert 0 < idx < len(values) - 1
        assert values[0] > 10 * plateau
        assert values[-1] > 3.9

    def test_bracket_nonpositive_raises(self):
        # k_tilde < 1 makes the low-frequency bracket negative
        p = ElectrokineticParams.from_solution(4e-4, 1e-10, 5e-6, 60e-6)
        assert p.k_tilde < 1.0
        with pytest.raises(ModelValidityError):
            threshold_voltage_normalized(1.0, p)

    def test_surface_conductance_ordering(self):
        """Higher K_s rises later: pointwise ordering in the transition band."""
        params = [
            ElectrokineticParams.from_solution(4e-4, ks, 5e-6, 60e-6)
            for ks in (10e-9, 50e-9, 100e-9)
        ]
        scale = params[0].debye_length**2 / params[0].diffusion_coeff
        for omega_mw in np.logspace(1, math.log10(500), 40):
            f = omega_mw / (2.0 * math.pi * scale)
            v10, v50, v100 = (threshold_voltage_normalized(f, p) for p in params)
            assert v10 > v50 > v100

    def test_sweep_rows_flag_invalid(self):
        p = ElectrokineticParams.from_solution(4e-4, 1e-10, 5e-6, 60e-6)
        rows = threshold_sweep(p, [1.0, 1e6])
        assert math.isnan(rows[0][4])


class TestInflections:
    def test_closed_form_k50(self):
        omega_mw, omega_rc = closed_form_inflections(50.0)
        assert omega_mw == pytest.approx(math.sqrt(49 * 199 / 3), rel=1e-12)
        assert omega_rc == pytest.approx(2 * math.sqrt(52 / (3 * 199)), rel=1e-12)

    def test_requires_k_above_one(self):
        with pytest.raises(ModelValidityError):
            closed_form_inflections(0.5)

    def test_detected_match_closed_form(self, table2_params):
        detected = detect_inflection_frequencies(table2_params)
        root_mw, root_rc = closed_form_inflections(table2_params.k_tilde)
        assert detected.omega_mw == pytest.approx(root_mw, rel=0.02)
        assert detected.omega_rc == pytest.approx(root_rc, rel=0.02)

    def test_detected_match_other_k(self):
        p = ElectrokineticParams.from_solution(4e-4, 10e-9, 5e-6, 60e-6)
        detected = detect_inflection_frequencies(p)
        root_mw, root_rc = closed_form_inflections(p.k_tilde)
        assert detected.omega_mw == pytest.approx(root_mw, rel=0.02)
        assert detected.omega_rc == pytest.approx(root_rc, rel=0.02)
