from .paths import generate_path
from .metrics import RunMetrics, compute_metrics
from .scenario import Scenario, ReplayResult, replay_session, run_scenario
from .sweep import SweepTable, sweep_threshold, table_csv_lines, inflections_csv_lines

__all__ = [
    "ReplayResult",
    "RunMetrics",
    "Scenario",
    "SweepTable",
    "compute_metrics",
    "generate_path",
    "inflections_csv_lines",
    "replay_session",
    "run_scenario",
    "sweep_threshold",
    "table_csv_lines",
]
