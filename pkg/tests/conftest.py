import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from janussim.physics.electrokinetics import ElectrokineticParams
from janussim.physics.mobility import MobilityModel
from janussim.physics.particle import FluidEnv, ParticleSpec, standard_janus

# parameters of the reference solution/chamber used throughout
K_E_4US = 4e-4        # S/m
K_S_100NS = 100e-9    # S
RADIUS_10UM = 5e-6    # m
HALF_GAP = 60e-6      # m


@pytest.fixture(scope="session")
def table2_params() -> ElectrokineticParams:
    return ElectrokineticParams.from_solution(
        bulk_conductivity=K_E_4US,
        surface_conductance=K_S_100NS,
        particle_radius=RADIUS_10UM,
        half_gap=HALF_GAP,
    )


@pytest.fixture(scope="session")
def water() -> FluidEnv:
    return FluidEnv()


@pytest.fixture(scope="session")
def jp10() -> ParticleSpec:
    return standard_janus(5e-6)


@pytest.fixture(scope="session")
def jp27() -> ParticleSpec:
    return standard_janus(13.5e-6)


@pytest.fixture(scope="session")
def ps10() -> ParticleSpec:
    return ParticleSpec(core_radius=5e-6, kind="bare")


@pytest.fixture(scope="session")
def ps27() -> ParticleSpec:
    return ParticleSpec(core_radius=13.5e-6, kind="bare")


@pytest.fixture(scope="session")
def mobility() -> MobilityModel:
    return MobilityModel()
