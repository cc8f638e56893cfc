import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from janussim.physics.mobility import (
    MobilityModel,
    alignment_angle_from_intensity,
    electric_velocity,
    estimate_i_max,
    rolling_velocity,
)


class TestModelValidation:
    def test_defaults_valid(self):
        MobilityModel()

    def test_field_slip_must_not_drop(self):
        with pytest.raises(ValueError):
            MobilityModel(rolling_slip=0.3, rolling_slip_with_field=0.2)

    def test_field_stepout_must_not_rise(self):
        with pytest.raises(ValueError):
            MobilityModel(stepout_hz=20.0, stepout_with_field_hz=25.0)

    def test_curve_must_cross_zero(self):
        curve = ((1e3, 0.3e-6), (5e4, 0.2e-6), (5e6, 0.001e-6))
        with pytest.raises(ValueError):
            MobilityModel(mobility_curve=curve)

    def test_curve_must_decay_in_mhz(self):
        curve = ((1e3, 0.3e-6), (5e4, -0.2e-6), (5e6, 0.2e-6))
        with pytest.raises(ValueError):
            MobilityModel(mobility_curve=curve)


class TestRolling:
    def test_zero_rate(self, jp10, mobility):
        assert rolling_velocity(0.0, jp10, mobility, field_on=False) == 0.0

    @given(st.floats(min_value=0.1, max_value=0.99))
    @settings(max_examples=40, deadline=None)
    def test_linear_below_stepout(self, frac):
        from janussim.physics.particle import standard_janus

        jp10 = standard_janus(5e-6)
        mobility = MobilityModel()
        f = frac * mobility.stepout_hz
        v = rolling_velocity(f, jp10, mobility, field_on=False)
        v_half = rolling_velocity(f / 2.0, jp10, mobility, field_on=False)
        assert v == pytest.approx(2.0 * v_half, rel=1e-12)

    def test_known_value(self, jp10, mobility):
        v = rolling_velocity(5.0, jp10, mobility, field_on=False)
        expected = 2.0 * math.pi * jp10.metal_radius * 5.0 * mobility.rolling_slip
        assert v == pytest.approx(expected, rel=1e-12)

    def test_field_raises_speed_below_stepout(self, jp10, mobility):
        v_off = rolling_velocity(5.0, jp10, mobility, field_on=False)
        v_on = rolling_velocity(5.0, jp10, mobility, field_on=True)
        assert v_on / v_off == pytest.approx(
            mobility.rolling_slip_with_field / mobility.rolling_slip
        )
        assert v_on > v_off

    def test_decay_above_stepout(self, jp10, mobility):
        so = mobility.stepout_hz
        v_so = rolling_velocity(so, jp10, mobility, field_on=False)
        v_2so = rolling_velocity(2 * so, jp10, mobility, field_on=False)
        assert v_2so == pytest.approx(v_so / 2.0, rel=1e-12)
        assert rolling_velocity(100 * so, jp10, mobility, field_on=False) < 0.02 * v_so

    def test_negative_rate_rejected(self, jp10, mobility):
        with pytest.raises(ValueError):
            rolling_velocity(-1.0, jp10, mobility, field_on=False)


class TestElectric:
    def test_zero_voltage(self, mobility):
        assert electric_velocity(0.0, 2e3, mobility) == 0.0

    def test_v_squared_scaling(self, mobility):
        v1 = electric_velocity(5.0, 2e3, mobility)
        v2 = electric_velocity(10.0, 2e3, mobility)
        assert v2 == pytest.approx(4.0 * v1, rel=1e-12)

    def test_high_frequency_suppression(self, mobility):
        v_peak = max(abs(electric_velocity(10.0, f, mobility)) for f in (1e3, 2e3))
        v_5mhz = abs(electric_velocity(10.0, 5e6, mobility))
        assert v_5mhz < 0.01 * v_peak

    def test_band_signs_differ(self, mobility):
        icep = electric_velocity(10.0, 2e3, mobility)
        sdep = electric_velocity(10.0, 5e4, mobility)
        assert icep > 0.0 > sdep

    def test_efficiency_scales(self, mobility):
        full = electric_velocity(10.0, 2e3, mobility, 1.0)
        half = electric_velocity(10.0, 2e3, mobility, 0.5)
        assert half == pytest.approx(0.5 * full, rel=1e-12)

    def test_efficiency_range_checked(self, mobility):
        with pytest.raises(ValueError):
            electric_velocity(10.0, 2e3, mobility, 1.5)


class TestAlignmentAngle:
    def test_at_minimum(self):
        assert alignment_angle_from_intensity(10.0, 10.0, 50.0) == pytest.approx(0.0)

    def test_half_intensity_is_ninety(self):
        assert alignment_angle_from_intensity(30.0, 10.0, 50.0) == pytest.approx(90.0)

    def test_at_maximum(self):
        assert alignment_angle_from_intensity(50.0, 10.0, 50.0) == pytest.approx(180.0)

    def test_round_trip(self):
        for alpha in range(10, 91, 10):
            i_star = math.sin(math.radians(alpha) / 2.0) ** 2
            mean = 10.0 + i_star * 40.0
            back = alignment_angle_from_intensity(mean, 10.0, 50.0)
            assert back == pytest.approx(float(alpha), abs=1e-9)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            alignment_angle_from_intensity(60.0, 10.0, 50.0)
        with pytest.raises(ValueError):
            alignment_angle_from_intensity(9.0, 10.0, 50.0)

    def test_inverted_references_rejected(self):
        with pytest.raises(ValueError):
            alignment_angle_from_intensity(30.0, 50.0, 10.0)

    def test_i_max_estimator(self):
        # a 90-degree reference halfway between the extremes reproduces i_max
        assert estimate_i_max(30.0, 10.0) == pytest.approx(50.0)
        est = estimate_i_max(28.0, 10.0)
        assert alignment_angle_from_intensity(28.0, 10.0, est) == pytest.approx(90.0)
