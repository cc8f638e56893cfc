"""Threshold-voltage sweeps over frequency for grids of surface conductance
and bulk conductivity, with numeric inflection detection per curve.

CSV rows use the header ``frequency_hz,omega_rc,omega_mw,omega_h,v_norm``;
frequencies where the model bracket is non-positive are flagged with NaN
rather than dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..physics.electrokinetics import (
    ElectrokineticParams,
    InflectionFrequencies,
    ModelValidityError,
    detect_inflection_frequencies,
    threshold_sweep,
)

SWEEP_CSV_HEADER = "frequency_hz,omega_rc,omega_mw,omega_h,v_norm"


@dataclass
class SweepTable:
    k_e_s_m: float
    k_s_s: float
    params: ElectrokineticParams
    rows: list[tuple[float, float, float, float, float]]
    inflections: InflectionFrequencies | None
    flagged_rows: int

    @property
    def label(self) -> str:
        return f"ke{self.k_e_s_m * 1e4:g}uScm_ks{self.k_s_s * 1e9:g}nS"


def log_frequency_grid(f_min_hz: float, f_max_hz: float, points: int) -> list[float]:
    if not (0 < f_min_hz < f_max_hz) or points < 2:
        raise ValueError("need 0 < f_min < f_max and at least 2 points")
    return [float(f) for f in np.logspace(math.log10(f_min_hz), math.log10(f_max_hz), points)]


def sweep_threshold(
    frequencies_hz: Sequence[float],
    k_s_list_s: Sequence[float],
    k_e_list_s_m: Sequence[float],
    particle_radius: float = 5e-6,
    half_gap: float = 60e-6,
    diffusion_coeff: float = 2e-9,
    relative_permittivity: float = 80.0,
) -> list[SweepTable]:
    """One table per (K_e, K_s) combination over the shared frequency grid."""
    if not frequencies_hz or not k_s_list_s or not k_e_list_s_m:
        raise ValueError("frequency and parameter grids must be non-empty")
    tables = []
    for k_e in k_e_list_s_m:
        for k_s in k_s_list_s:
            params = ElectrokineticParams.from_solution(
                bulk_conductivity=k_e,
                surface_conductance=k_s,
                particle_radius=particle_radius,
                half_gap=half_gap,
                diffusion_coeff=diffusion_coeff,
                relative_permittivity=relative_permittivity,
            )
            rows = threshold_sweep(params, frequencies_hz)
            try:
                inflections = detect_inflection_frequencies(params)
            except ModelValidityError:
                inflections = None
            tables.append(
                SweepTable(
                    k_e_s_m=k_e,
                    k_s_s=k_s,
                    params=params,
                    rows=rows,
                    inflections=inflections,
                    flagged_rows=sum(1 for r in rows if math.isnan(r[4])),
                )
            )
    return tables


def table_csv_lines(table: SweepTable, metadata: bool = True) -> list[str]:
    lines = []
    if metadata:
        lines.append(f"# k_e_s_m={table.k_e_s_m!r} k_s_s={table.k_s_s!r}")
        lines.append(
            f"# k_tilde={table.params.k_tilde!r} debye_length_m={table.params.debye_length!r}"
        )
        if table.flagged_rows:
            lines.append(f"# flagged_rows={table.flagged_rows} (v_norm=nan outside validity)")
    lines.append(SWEEP_CSV_HEADER)
    for f, orc, omw, oh, v in table.rows:
        lines.append(f"{f!r},{orc!r},{omw!r},{oh!r},{v!r}")
    return lines


def inflections_csv_lines(tables: Sequence[SweepTable]) -> list[str]:
    lines = ["k_e_s_m,k_s_s,kind,omega,frequency_hz"]
    for t in tables:
        if t.inflections is None:
            continue
        lines.append(
            f"{t.k_e_s_m!r},{t.k_s_s!r},mw,{t.inflections.omega_mw!r},{t.inflections.frequency_mw_hz!r}"
        )
        lines.append(
            f"{t.k_e_s_m!r},{t.k_s_s!r},rc,{t.inflections.omega_rc!r},{t.inflections.frequency_rc_hz!r}"
        )
    return lines
