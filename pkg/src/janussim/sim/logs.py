"""Session logging: one record per control frame, line-delimited JSON plus a
CSV summary.

The first line of a log file is a header object carrying the scenario
configuration text and seed, which is everything needed to re-simulate the
session; replaying the recorded commands must reproduce the recorded states
bit for bit. See docs/protocol.md for the field-by-field format.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .commands import FieldCommand

LOG_FORMAT_VERSION = 1


@dataclass
class FrameRecord:
    t_s: float
    frame: int
    command: FieldCommand
    particles: list[dict[str, Any]]
    cargo: list[dict[str, Any]]
    measurements: list[dict[str, Any]]

    def to_dict(self) -> dict[str, Any]:
        return {
            "t": self.t_s,
            "frame": self.frame,
            "command": self.command.to_dict(),
            "particles": self.particles,
            "cargo": self.cargo,
            "measured": self.measurements,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "FrameRecord":
        return cls(
            t_s=d["t"],
            frame=d["frame"],
            command=FieldCommand.from_dict(d["command"]),
            particles=d["particles"],
            cargo=d.get("cargo", []),
            measurements=d.get("measured", []),
        )


@dataclass
class SessionLog:
    header: dict[str, Any]
    frames: list[FrameRecord] = field(default_factory=list)

    @classmethod
    def new(cls, scenario_name: str, seed: int, config_text: str, extra: dict | None = None) -> "SessionLog":
        header = {
            "log_version": LOG_FORMAT_VERSION,
            "scenario": scenario_name,
            "seed": seed,
            "config_text": config_text,
        }
        if extra:
            header.update(extra)
        return cls(header=header)

    def append(self, record: FrameRecord) -> None:
        self.frames.append(record)

    def to_lines(self) -> list[str]:
        lines = [json.dumps({"header": self.header}, separators=(",", ":"))]
        lines.extend(
            json.dumps(rec.to_dict(), separators=(",", ":")) for rec in self.frames
        )
        return lines

    def write_jsonl(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.to_lines()) + "\n")

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "SessionLog":
        it = iter(lines)
        first = next(it, None)
        if first is None:
            raise ValueError("empty session log")
        head = json.loads(first)
        if "header" not in head:
            raise ValueError("session log missing header line")
        log = cls(header=head["header"])
        for line in it:
            line = line.strip()
            if line:
                log.append(FrameRecord.from_dict(json.loads(line)))
        return log

    @classmethod
    def read_jsonl(cls, path: str | Path) -> "SessionLog":
        return cls.from_lines(Path(path).read_text().splitlines())


def summary_csv_lines(log: SessionLog) -> list[str]:
    """Per-frame flat summary of the command and every particle's pose."""
    names: list[str] = []
    if log.frames:
        names = [p["name"] for p in log.frames[0].particles]
    cols = ["t_s", "frame", "ac_on", "ac_vpp", "ac_hz", "rot_hz", "grad_z_mt_m"]
    for n in names:
        cols += [f"{n}_x_um", f"{n}_y_um", f"{n}_z_um", f"{n}_plane"]
    lines = [",".join(cols)]
    for rec in log.frames:
        cmd = rec.command
        rot_hz = cmd.rotation.frequency_hz * cmd.rotation.sense if cmd.rotation else 0.0
        row = [
            repr(rec.t_s),
            str(rec.frame),
            "1" if cmd.ac_output else "0",
            repr(cmd.ac_voltage_pp),
            repr(cmd.ac_frequency_hz),
            repr(rot_hz),
            repr(cmd.magnetic_gradient_mt_m[2]),
        ]
        by_name = {p["name"]: p for p in rec.particles}
        for n in names:
            p = by_name[n]
            row += [repr(p["x"]), repr(p["y"]), repr(p["z"]), p["plane"]]
        lines.append(",".join(row))
    return lines
