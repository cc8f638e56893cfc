"""FastAPI service wrapping the core package: batch compute endpoints plus the
live-session websocket. The CLI is a thin client of these endpoints."""
from __future__ import annotations

import contextlib
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .. import __version__
from ..config import ConfigError
from ..fields.laplace import DomainSpec2D, Inclusion, NonConvergenceError, solve_laplace
from ..harness.scenario import ReplayResult, Scenario, replay_session, run_scenario
from ..harness.sweep import (
    inflections_csv_lines,
    log_frequency_grid,
    sweep_threshold,
    table_csv_lines,
)
from ..physics.particle import (
    BuoyantParticleError,
    DEFAULT_LAYERS,
    FluidEnv,
    Layer,
    ParticleSpec,
    layered_mass_and_volume,
    settling,
)
from ..sim.logs import SessionLog, summary_csv_lines
from .schemas import (
    FieldRequest,
    FieldResponse,
    InflectionModel,
    MetricsModel,
    OutcomeModel,
    ReplayRequest,
    ReplayResponse,
    RunRequest,
    RunResponse,
    SettleRequest,
    SettleResponse,
    SettleRow,
    SweepRequest,
    SweepResponse,
    SweepTableModel,
)
from .session import LiveSession


def create_app(scenario_path: str | Path | None = None, time_scale: float = 1.0) -> FastAPI:
    session_holder: dict[str, LiveSession] = {}

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        if scenario_path is not None:
            scenario = Scenario.from_file(scenario_path)
            live = LiveSession(scenario, time_scale=time_scale)
            live.start()
            session_holder["live"] = live
        yield
        live = session_holder.pop("live", None)
        if live is not None:
            await live.stop()

    app = FastAPI(title="janussim", version=__version__, lifespan=lifespan)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__, "live_session": "live" in session_holder}

    @app.post("/api/settle", response_model=SettleResponse)
    def settle_endpoint(req: SettleRequest) -> SettleResponse:
        env = FluidEnv(
            density=req.fluid.density_kg_m3,
            viscosity=req.fluid.viscosity_pa_s,
            gravity=req.fluid.gravity_m_s2,
            chamber_height=req.fluid.chamber_height_um * 1e-6,
        )
        rows = []
        for p in req.particles:
            if p.kind == "bare":
                spec = ParticleSpec(
                    core_radius=p.core_radius_um * 1e-6,
                    core_density=p.core_density_kg_m3,
                    kind="bare",
                )
            else:
                layers = DEFAULT_LAYERS
                if p.layers is not None:
                    layers = tuple(
                        Layer(l.name, l.density_kg_m3, l.thickness_nm * 1e-9)
                        for l in p.layers
                    )
                spec = ParticleSpec(
                    core_radius=p.core_radius_um * 1e-6,
                    core_density=p.core_density_kg_m3,
                    layers=layers,
                    kind="janus",
                )
            budget = layered_mass_and_volume(spec)
            try:
                result = settling(spec, env)
            except BuoyantParticleError as exc:
                raise HTTPException(status_code=400, detail=f"{p.name}: {exc}") from exc
            rows.append(
                SettleRow(
                    name=p.name,
                    mass_kg=budget.mass,
                    effective_density_kg_m3=budget.effective_density,
                    terminal_velocity_um_s=result.terminal_velocity * 1e6,
                    time_constant_s=result.time_constant,
                    settling_time_s=result.settling_time,
                )
            )
        return SettleResponse(rows=rows)

    @app.post("/api/sweep-threshold", response_model=SweepResponse)
    def sweep_endpoint(req: SweepRequest) -> SweepResponse:
        try:
            freqs = log_frequency_grid(req.f_min_hz, req.f_max_hz, req.points)
            tables = sweep_threshold(
                freqs,
                [k * 1e-9 for k in req.k_s_ns],
                [k * 1e-4 for k in req.k_e_us_cm],
                particle_radius=req.particle_radius_um * 1e-6,
                half_gap=req.half_gap_um * 1e-6,
                diffusion_coeff=req.diffusion_m2_s,
                relative_permittivity=req.rel_permittivity,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        models = []
        for t in tables:
            inflections = None
            if t.inflections is not None:
                inflections = InflectionModel(
                    omega_mw=t.inflections.omega_mw,
                    frequency_mw_hz=t.inflections.frequency_mw_hz,
                    omega_rc=t.inflections.omega_rc,
                    frequency_rc_hz=t.inflections.frequency_rc_hz,
                )
            models.append(
                SweepTableModel(
                    k_e_us_cm=t.k_e_s_m * 1e4,
                    k_s_ns=t.k_s_s * 1e9,
                    k_tilde=t.params.k_tilde,
                    label=t.label,
                    csv="\n".join(table_csv_lines(t)),
                    inflections=inflections,
                    flagged_rows=t.flagged_rows,
                )
            )
        return SweepResponse(
            tables=models, inflections_csv="\n".join(inflections_csv_lines(tables))
        )

    @app.post("/api/field", response_model=FieldResponse)
    def field_endpoint(req: FieldRequest) -> FieldResponse:
        inclusions = tuple(
            Inclusion(
                shape=i.shape,
                boundary=i.boundary,
                x_center=i.x_center_um * 1e-6,
                y_center=i.y_center_um * 1e-6,
                width=i.width_um * 1e-6,
                height=i.height_um * 1e-6,
                radius=i.radius_um * 1e-6,
                y_min=i.y_min_um * 1e-6,
            )
            for i in req.inclusions
        )
        try:
            domain = DomainSpec2D(
                width=req.width_um * 1e-6,
                height=req.height_um * 1e-6,
                grid_nx=req.nx,
                grid_ny=req.ny,
                bottom_potential=req.bottom_v,
                top_potential=req.top_v,
                inclusions=inclusions,
            )
            grid = solve_laplace(domain, tolerance=req.tolerance, max_iters=req.max_iters)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except NonConvergenceError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return FieldResponse(
            phi=grid.phi.tolist(),
            e_mag=grid.e_mag.tolist(),
            grad_e2_mag=grid.grad_e2_mag.tolist(),
            dx_um=grid.dx * 1e6,
            dy_um=grid.dy * 1e6,
            iterations=grid.iterations,
            residual=grid.residual,
            tolerance=grid.tolerance,
            floating_potentials=list(grid.floating_potentials),
        )

    @app.post("/api/run", response_model=RunResponse)
    def run_endpoint(req: RunRequest) -> RunResponse:
        try:
            scenario = Scenario(req.config_text)
            result = run_scenario(scenario, req.seed)
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return RunResponse(
            scenario=scenario.name,
            seed=scenario.seed if req.seed is None else req.seed,
            frames=len(result.log.frames),
            log_lines=result.log.to_lines(),
            summary_csv="\n".join(summary_csv_lines(result.log)),
            metrics=MetricsModel(**result.metrics.to_dict()),
            outcomes=[OutcomeModel(**o.to_dict()) for o in result.outcomes],
            all_waypoints_failed=result.all_waypoints_failed,
        )

    @app.post("/api/replay", response_model=ReplayResponse)
    def replay_endpoint(req: ReplayRequest) -> ReplayResponse:
        try:
            log = SessionLog.from_lines(req.log_lines)
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=f"bad log: {exc}") from exc
        try:
            result: ReplayResult = replay_session(log)
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return ReplayResponse(
            match=result.match,
            frames_checked=result.frames_checked,
            first_divergence=result.first_divergence,
            detail=result.detail,
        )

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket) -> None:
        live = session_holder.get("live")
        if live is None:
            await websocket.close(code=1013)
            return
        await websocket.accept()
        channel = live.register()

        async def sender() -> None:
            while True:
                message = await channel.next_message()
                await websocket.send_json(message)

        import asyncio

        send_task = asyncio.get_event_loop().create_task(sender())
        try:
            channel.send_reply(live.hello())
            while True:
                raw = await websocket.receive_json()
                if not isinstance(raw, dict):
                    channel.send_reply(
                        {"type": "error", "reason": "messages must be JSON objects"}
                    )
                    continue
                msg, error = live.validate_message(raw)
                if error is not None:
                    channel.send_reply(error)
                    continue
                await live.inbox.put({"msg": msg, "channel": channel})
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            live.unregister(channel)

    return app
