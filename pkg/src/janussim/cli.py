"""Command-line client. Batch subcommands post to the in-process service app
(the same endpoints `serve` exposes over the network) and write the results;
`serve` runs the service with a live scenario session on a websocket.

Exit codes: 0 success, 2 configuration error, 3 scenario failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import (
    ConfigError,
    get_float,
    get_float_list,
    get_int,
    get_str,
    load_config,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SCENARIO = 3


def _client():
    # in-process ASGI client: one code path through the service for CLI and HTTP
    from fastapi.testclient import TestClient

    from .server.app import create_app

    return TestClient(create_app(), raise_server_exceptions=True)


def _fail_config(message: str) -> int:
    print(f"config error: {message}", file=sys.stderr)
    return EXIT_CONFIG


def _post(client, url: str, payload: dict):
    response = client.post(url, json=payload)
    if response.status_code == 400:
        raise ConfigError(response.json().get("detail", "bad request"))
    response.raise_for_status()
    return response.json()


# ----------------------------------------------------------------- settle
def _settle_payload(cfg_path: str) -> dict:
    cp = load_config(cfg_path)
    particles = []
    for section in cp.sections():
        if not section.startswith("particle"):
            continue
        name = section.split(None, 1)[1] if " " in section else section
        entry: dict = {
            "name": name,
            "kind": get_str(cp, section, "kind", "janus"),
            "core_radius_um": get_float(cp, section, "core_radius_um"),
            "core_density_kg_m3": get_float(cp, section, "core_density_kg_m3", 1050.0),
        }
        raw_layers = get_str(cp, section, "layers", "")
        if raw_layers and entry["kind"] == "janus":
            layers = []
            for chunk in raw_layers.split(","):
                parts = chunk.split()
                if len(parts) != 3:
                    raise ConfigError(f"bad layer entry {chunk!r} in [{section}]")
                layers.append(
                    {
                        "name": parts[0],
                        "thickness_nm": float(parts[1]),
                        "density_kg_m3": float(parts[2]),
                    }
                )
            entry["layers"] = layers
        particles.append(entry)
    if not particles:
        raise ConfigError("no [particle ...] sections in settle config")
    return {
        "fluid": {
            "density_kg_m3": get_float(cp, "fluid", "density_kg_m3", 1000.0),
            "viscosity_pa_s": get_float(cp, "fluid", "viscosity_pa_s", 1e-3),
            "gravity_m_s2": get_float(cp, "fluid", "gravity_m_s2", 9.81),
            "chamber_height_um": get_float(cp, "fluid", "chamber_height_um", 120.0),
        },
        "particles": particles,
    }


def cmd_settle(args) -> int:
    payload = _settle_payload(args.config)
    with _client() as client:
        data = _post(client, "/api/settle", payload)
    header = (
        "particle,mass_kg,effective_density_kg_m3,"
        "terminal_velocity_um_s,time_constant_s,settling_time_s"
    )
    lines = [header]
    for row in data["rows"]:
        lines.append(
            f"{row['name']},{row['mass_kg']!r},{row['effective_density_kg_m3']!r},"
            f"{row['terminal_velocity_um_s']!r},{row['time_constant_s']!r},"
            f"{row['settling_time_s']!r}"
        )
    text = "\n".join(lines)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


# ------------------------------------------------------------------ sweep
def cmd_sweep(args) -> int:
    cp = load_config(args.config)
    payload = {
        "f_min_hz": get_float(cp, "sweep", "f_min_hz", 1e2),
        "f_max_hz": get_float(cp, "sweep", "f_max_hz", 1e8),
        "points": get_int(cp, "sweep", "points", 400),
        "k_s_ns": get_float_list(cp, "electrokinetics", "k_s_ns", [100.0]),
        "k_e_us_cm": get_float_list(cp, "electrokinetics", "k_e_us_cm", [4.0]),
        "particle_radius_um": get_float(cp, "electrokinetics", "particle_radius_um", 5.0),
        "half_gap_um": get_float(cp, "electrokinetics", "half_gap_um", 60.0),
        "diffusion_m2_s": get_float(cp, "electrokinetics", "diffusion_m2_s", 2e-9),
        "rel_permittivity": get_float(cp, "electrokinetics", "rel_permittivity", 80.0),
    }
    with _client() as client:
        data = _post(client, "/api/sweep-threshold", payload)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for table in data["tables"]:
        path = out / f"sweep_{table['label']}.csv"
        path.write_text(table["csv"] + "\n")
        written.append(path)
    inflections = out / "inflections.csv"
    inflections.write_text(data["inflections_csv"] + "\n")
    written.append(inflections)
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


# ------------------------------------------------------------------ field
def _field_payload(cfg_path: str) -> dict:
    cp = load_config(cfg_path)
    inclusions = []
    for section in cp.sections():
        if not section.startswith("inclusion"):
            continue
        inclusions.append(
            {
                "shape": get_str(cp, section, "shape"),
                "boundary": get_str(cp, section, "boundary", "insulating"),
                "x_center_um": get_float(cp, section, "x_center_um", 0.0),
                "y_center_um": get_float(cp, section, "y_center_um", 0.0),
                "width_um": get_float(cp, section, "width_um", 0.0),
                "height_um": get_float(cp, section, "height_um", 0.0),
                "radius_um": get_float(cp, section, "radius_um", 0.0),
                "y_min_um": get_float(cp, section, "y_min_um", 0.0),
            }
        )
    return {
        "width_um": get_float(cp, "domain", "width_um", 1200.0),
        "height_um": get_float(cp, "domain", "height_um", 120.0),
        "nx": get_int(cp, "domain", "nx", 256),
        "ny": get_int(cp, "domain", "ny", 64),
        "bottom_v": get_float(cp, "domain", "bottom_v", 0.0),
        "top_v": get_float(cp, "domain", "top_v", 7.5),
        "inclusions": inclusions,
        "tolerance": get_float(cp, "solver", "tolerance", 1e-6),
        "max_iters": get_int(cp, "solver", "max_iters", 200_000),
    }


def _matrix_csv(matrix: list[list[float]], meta: list[str]) -> str:
    lines = [f"# {m}" for m in meta]
    lines.extend(",".join(repr(v) for v in row) for row in matrix)
    return "\n".join(lines)


def cmd_field(args) -> int:
    payload = _field_payload(args.config)
    with _client() as client:
        data = _post(client, "/api/field", payload)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    meta = [
        f"dx_um={data['dx_um']!r} dy_um={data['dy_um']!r}",
        f"tolerance={data['tolerance']!r} iterations={data['iterations']} residual={data['residual']!r}",
        "rows are y from floor to ceiling, columns are x",
    ]
    for name in ("phi", "e_mag", "grad_e2_mag"):
        path = out / f"{name}.csv"
        path.write_text(_matrix_csv(data[name], meta) + "\n")
        print(f"wrote {path}")
    if data["floating_potentials"]:
        print(f"floating potentials: {data['floating_potentials']}")
    print(f"converged in {data['iterations']} iterations, residual {data['residual']:.3e}")
    return EXIT_OK


# -------------------------------------------------------------------- run
def cmd_run(args) -> int:
    path = Path(args.config)
    if not path.is_file():
        raise ConfigError(f"scenario file not found: {path}")
    payload = {"config_text": path.read_text(), "seed": args.seed}
    with _client() as client:
        data = _post(client, "/api/run", payload)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    (out / "session.log").write_text("\n".join(data["log_lines"]) + "\n")
    (out / "summary.csv").write_text(data["summary_csv"] + "\n")
    (out / "metrics.json").write_text(json.dumps(data["metrics"], indent=2) + "\n")
    (out / "outcomes.json").write_text(json.dumps(data["outcomes"], indent=2) + "\n")
    print(f"scenario {data['scenario']} seed {data['seed']}: {data['frames']} frames")
    reached = data["metrics"]["waypoints_reached"]
    total = len(data["outcomes"])
    print(f"waypoints reached: {reached}/{total}")
    for key, value in data["metrics"].items():
        print(f"  {key}: {value}")
    print(f"wrote {out / 'session.log'}")
    if data["all_waypoints_failed"]:
        print("scenario failure: no waypoint was reached", file=sys.stderr)
        return EXIT_SCENARIO
    return EXIT_OK


# ------------------------------------------------------------------ replay
def cmd_replay(args) -> int:
    path = Path(args.log)
    if not path.is_file():
        raise ConfigError(f"session log not found: {path}")
    lines = path.read_text().splitlines()
    with _client() as client:
        data = _post(client, "/api/replay", {"log_lines": lines})
    if data["match"]:
        print(f"replay OK: {data['frames_checked']} frames reproduced bit-for-bit")
        return EXIT_OK
    print(
        f"replay MISMATCH at frame {data['first_divergence']}: {data['detail']}",
        file=sys.stderr,
    )
    return EXIT_SCENARIO


# ------------------------------------------------------------------- serve
def cmd_serve(args) -> int:
    import uvicorn

    from .server.app import create_app

    host, _, port = args.bind.partition(":")
    if not port:
        raise ConfigError(f"--bind must be host:port, got {args.bind!r}")
    app = create_app(args.config, time_scale=args.time_scale)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="janussim",
        description="Microchamber simulator and control stack for Janus microrobots",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario and write its session log")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output directory (default .)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-threshold", help="threshold-voltage sweep tables")
    p.add_argument("config")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("field", help="solve an electrostatic domain, write field maps")
    p.add_argument("config")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("settle", help="settling analysis of configured particles")
    p.add_argument("config")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_settle)

    p = sub.add_parser("serve", help="serve the live session and compute endpoints")
    p.add_argument("config")
    p.add_argument("--bind", required=True, help="host:port")
    p.add_argument("--time-scale", type=float, default=1.0)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay", help="verify a session log reproduces bit-for-bit")
    p.add_argument("log")
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail_config(str(exc))


if __name__ == "__main__":
    sys.exit(main())
