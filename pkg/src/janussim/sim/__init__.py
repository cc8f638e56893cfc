from .commands import (
    CommandError,
    FieldCommand,
    HardwareEnvelope,
    RotationSpec,
    rotation_about,
)
from .state import (
    CargoSpec,
    CargoState,
    HeterogeneityProfile,
    ParticleState,
    Plane,
)
from .engine import Chamber, Engine, EngineConfig, Measurement, ObstacleWorld, ParticleAgent
from .logs import FrameRecord, SessionLog, summary_csv_lines

__all__ = [
    "CargoSpec",
    "CargoState",
    "Chamber",
    "CommandError",
    "Engine",
    "EngineConfig",
    "FieldCommand",
    "FrameRecord",
    "HardwareEnvelope",
    "HeterogeneityProfile",
    "Measurement",
    "ObstacleWorld",
    "ParticleAgent",
    "ParticleState",
    "Plane",
    "RotationSpec",
    "SessionLog",
    "rotation_about",
    "summary_csv_lines",
]
