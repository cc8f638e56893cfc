"""Request/response models for the service endpoints and the live-session
websocket messages. The websocket schema version is announced in the hello
message; see docs/protocol.md."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

SCHEMA_VERSION = 1


# ----------------------------------------------------------------- settling
class FluidModel(BaseModel):
    density_kg_m3: float = 1000.0
    viscosity_pa_s: float = 1e-3
    gravity_m_s2: float = 9.81
    chamber_height_um: float = 120.0


class LayerModel(BaseModel):
    name: str
    thickness_nm: float
    density_kg_m3: float


class ParticleModel(BaseModel):
    name: str
    kind: Literal["janus", "bare"] = "janus"
    core_radius_um: float
    core_density_kg_m3: float = 1050.0
    layers: Optional[list[LayerModel]] = None  # None selects the default stack


class SettleRequest(BaseModel):
    fluid: FluidModel = FluidModel()
    particles: list[ParticleModel]


class SettleRow(BaseModel):
    name: str
    mass_kg: float
    effective_density_kg_m3: float
    terminal_velocity_um_s: float
    time_constant_s: float
    settling_time_s: float


class SettleResponse(BaseModel):
    rows: list[SettleRow]


# -------------------------------------------------------------------- sweep
class SweepRequest(BaseModel):
    f_min_hz: float = 1e2
    f_max_hz: float = 1e8
    points: int = 400
    k_s_ns: list[float] = Field(default_factory=lambda: [100.0])
    k_e_us_cm: list[float] = Field(default_factory=lambda: [4.0])
    particle_radius_um: float = 5.0
    half_gap_um: float = 60.0
    diffusion_m2_s: float = 2e-9
    rel_permittivity: float = 80.0


class InflectionModel(BaseModel):
    omega_mw: float
    frequency_mw_hz: float
    omega_rc: float
    frequency_rc_hz: float


class SweepTableModel(BaseModel):
    k_e_us_cm: float
    k_s_ns: float
    k_tilde: float
    label: str
    csv: str
    inflections: Optional[InflectionModel] = None
    flagged_rows: int = 0


class SweepResponse(BaseModel):
    tables: list[SweepTableModel]
    inflections_csv: str


# -------------------------------------------------------------------- field
class InclusionModel(BaseModel):
    shape: Literal["rectangle", "circle"]
    boundary: Literal["insulating", "dielectric_insulating", "floating_conductor"] = (
        "insulating"
    )
    x_center_um: float = 0.0
    y_center_um: float = 0.0
    width_um: float = 0.0
    height_um: float = 0.0
    radius_um: float = 0.0
    y_min_um: float = 0.0


class FieldRequest(BaseModel):
    width_um: float = 1200.0
    height_um: float = 120.0
    nx: int = 256
    ny: int = 64
    bottom_v: float = 0.0
    top_v: float = 7.5
    inclusions: list[InclusionModel] = Field(default_factory=list)
    tolerance: float = 1e-6
    max_iters: int = 200_000


class FieldResponse(BaseModel):
    phi: list[list[float]]
    e_mag: list[list[float]]
    grad_e2_mag: list[list[float]]
    dx_um: float
    dy_um: float
    iterations: int
    residual: float
    tolerance: float
    floating_potentials: list[float]


# ---------------------------------------------------------------- scenarios
class RunRequest(BaseModel):
    config_text: str
    seed: Optional[int] = None


class OutcomeModel(BaseModel):
    index: int
    x_um: float
    y_um: float
    plane: str
    outcome: str
    t_s: float


class MetricsModel(BaseModel):
    cross_track_rms_um: float
    lap_period_s: float
    corner_overshoot_um: float
    repeatability_spread_um: float
    waypoints_reached: int
    cargo_delivered: int


class RunResponse(BaseModel):
    scenario: str
    seed: int
    frames: int
    log_lines: list[str]
    summary_csv: str
    metrics: MetricsModel
    outcomes: list[OutcomeModel]
    all_waypoints_failed: bool


class ReplayRequest(BaseModel):
    log_lines: list[str]


class ReplayResponse(BaseModel):
    match: bool
    frames_checked: int
    first_divergence: Optional[int] = None
    detail: str = ""


# ----------------------------------------------------------- live websocket
class ModeMessage(BaseModel):
    type: Literal["mode"]
    mode: Literal["manual", "auto"]


class ManualMessage(BaseModel):
    type: Literal["manual"]
    action: Literal["set_direction", "freq_delta", "lift", "toggle_ac", "ac_preset"]
    angle_deg: Optional[float] = None
    delta_hz: Optional[float] = None
    on: Optional[bool] = None
    preset: Optional[int] = None


class WaypointAddMessage(BaseModel):
    type: Literal["waypoint_add"]
    x_um: float
    y_um: float
    plane: Literal["bottom", "top"] = "bottom"


class WaypointRemoveMessage(BaseModel):
    type: Literal["waypoint_remove"]
    index: int


class ControllerMessage(BaseModel):
    type: Literal["controller"]
    action: Literal["start", "stop"]
    kind: Optional[Literal["rolling", "steering", "ortho4"]] = None


class ResetMessage(BaseModel):
    type: Literal["reset"]


CLIENT_MESSAGE_TYPES = {
    "mode": ModeMessage,
    "manual": ManualMessage,
    "waypoint_add": WaypointAddMessage,
    "waypoint_remove": WaypointRemoveMessage,
    "controller": ControllerMessage,
    "reset": ResetMessage,
}
