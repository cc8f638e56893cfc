from .controllers import (
    DegenerateTargetError,
    NoMotionError,
    Ortho4Config,
    Ortho4Controller,
    RollingCtlConfig,
    RollingController,
    StalledError,
    SteeringController,
    SteeringCtlConfig,
    Waypoint,
    calibrate_inclination,
    rolling_controller,
)
from .planner import InterplanarPlanner, PlannerConfig, WaypointOutcome

__all__ = [
    "DegenerateTargetError",
    "InterplanarPlanner",
    "NoMotionError",
    "Ortho4Config",
    "Ortho4Controller",
    "PlannerConfig",
    "RollingCtlConfig",
    "RollingController",
    "StalledError",
    "SteeringController",
    "SteeringCtlConfig",
    "Waypoint",
    "WaypointOutcome",
    "calibrate_inclination",
    "rolling_controller",
]
