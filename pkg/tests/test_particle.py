import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from janussim.physics.particle import (
    DEFAULT_LAYERS,
    BuoyantParticleError,
    FluidEnv,
    Layer,
    ParticleSpec,
    layered_mass_and_volume,
    settling,
    standard_janus,
)

LAYER_TUPLES = [(l.density, l.thickness) for l in DEFAULT_LAYERS]


class TestMassModel:
    def test_bare_sphere_mass(self, ps10):
        budget = layered_mass_and_volume(ps10)
        expected = 1050.0 * 4.0 / 3.0 * math.pi * (5e-6) ** 3
        assert budget.mass == pytest.approx(expected, rel=1e-12)
        assert budget.mass == pytest.approx(5.4978e-13, rel=1e-4)
        assert budget.effective_density == pytest.approx(1050.0)

    def test_zero_thickness_layers_degenerate_to_bare(self):
        layers = tuple(Layer(l.name, l.density, 0.0) for l in DEFAULT_LAYERS)
        janus = ParticleSpec(core_radius=5e-6, layers=layers, kind="janus")
        bare = ParticleSpec(core_radius=5e-6, kind="bare")
        bj = layered_mass_and_volume(janus)
        bb = layered_mass_and_volume(bare)
        assert bj.mass == pytest.approx(bb.mass, rel=1e-12)
        assert bj.volume == pytest.approx(bb.volume, rel=1e-12)
        assert bj.metal_radius == bare.core_radius

    def test_layer_radii_nest(self, jp10):
        assert jp10.metal_radius == pytest.approx(5e-6 + 85e-9, rel=1e-12)

    def test_against_oracle(self, jp27):
        budget = layered_mass_and_volume(jp27)
        mass_ref, r_ref = oracles.settle_mass(13.5e-6, 1050.0, LAYER_TUPLES)
        assert budget.mass == pytest.approx(float(mass_ref), rel=1e-12)
        assert budget.metal_radius == pytest.approx(float(r_ref), rel=1e-12)

    def test_effective_density_bounds(self, jp10):
        budget = layered_mass_and_volume(jp10)
        densest = max(l.density for l in DEFAULT_LAYERS)
        assert 1050.0 < budget.effective_density < densest

    @given(
        st.floats(min_value=1e-6, max_value=30e-6),
        st.floats(min_value=1e-9, max_value=500e-9),
        st.floats(min_value=1100.0, max_value=25000.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_added_layer_raises_density(self, radius, thickness, density):
        base = ParticleSpec(core_radius=radius, kind="bare")
        coated = ParticleSpec(
            core_radius=radius,
            layers=(Layer("m", density, thickness),),
            kind="janus",
        )
        assert (
            layered_mass_and_volume(coated).effective_density
            > layered_mass_and_volume(base).effective_density
        )

    def test_bare_rejects_layers(self):
        with pytest.raises(ValueError):
            ParticleSpec(core_radius=5e-6, layers=DEFAULT_LAYERS, kind="bare")


class TestSettling:
    def test_supp_table_rows(self, water, jp10, jp27, ps10, ps27):
        expected = {
            "jp10": (15.83e-6, 7.22e-6, 6.93),
            "jp27": (55.19e-6, 46.25e-6, 1.68),
            "ps10": (2.72e-6, 5.83e-6, 40.36),
            "ps27": (19.86e-6, 42.52e-6, 4.68),
        }
        specs = {"jp10": jp10, "jp27": jp27, "ps10": ps10, "ps27": ps27}
        for key, (v_t, tau, t_s) in expected.items():
            result = settling(specs[key], water)
            assert result.terminal_velocity == pytest.approx(v_t, rel=0.01), key
            assert result.time_constant == pytest.approx(tau, rel=0.01), key
            assert result.settling_time == pytest.approx(t_s, rel=0.01), key

    def test_against_oracle(self, water, jp10):
        v_ref, tau_ref, t_ref = oracles.settle_numbers(
            5e-6, 1050.0, LAYER_TUPLES, 1000.0, 1e-3, 9.81, 120e-6
        )
        result = settling(jp10, water)
        assert result.terminal_velocity == pytest.approx(v_ref, rel=1e-12)
        assert result.time_constant == pytest.approx(tau_ref, rel=1e-12)
        assert result.settling_time == pytest.approx(t_ref, rel=1e-12)

    def test_transient_negligible(self, water, jp10, jp27, ps10, ps27):
        # tau << settling time justifies dropping the exponential transient
        for spec in (jp10, jp27, ps10, ps27):
            result = settling(spec, water)
            assert result.time_constant / result.settling_time < 1e-4

    def test_neutrally_buoyant_raises(self, water):
        neutral = ParticleSpec(core_radius=5e-6, core_density=1000.0, kind="bare")
        with pytest.raises(BuoyantParticleError):
            settling(neutral, water)

    def test_lighter_than_fluid_raises(self, water):
        light = ParticleSpec(core_radius=5e-6, core_density=900.0, kind="bare")
        with pytest.raises(BuoyantParticleError):
            settling(light, water)

    def test_scaled_spec_scales_speed(self, water, jp10):
        big = jp10.scaled(1.2)
        assert settling(big, water).terminal_velocity > settling(jp10, water).terminal_velocity

    def test_chamber_too_small(self, jp10):
        tiny = FluidEnv(chamber_height=9e-6)
        with pytest.raises(ValueError):
            settling(jp10, tiny)


def test_standard_janus_uses_default_stack():
    spec = standard_janus(5e-6)
    assert spec.layers == DEFAULT_LAYERS
    assert spec.kind == "janus"
