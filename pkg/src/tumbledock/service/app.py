"""FastAPI service exposing the guidance library.

Closed-loop simulation, feasibility-envelope queries, attitude-grid
export and the transition-matrix dump all run in-process; the CLI talks
to these endpoints through an in-process transport by default and over
HTTP when pointed at a remote instance.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException, Query

from .. import __version__
from ..attitude import (
    InertiaTensor,
    RotationalState,
    polhode_invariants,
    propagate_attitude,
)
from ..cw import OrbitParams, hcw_stm
from ..envelope import (
    CapNotReachedError,
    ControlPolytope,
    envelope_sweep,
    los_cap,
    theta_max_envelope,
    tracking_control_matrix,
)
from ..simulate import InfeasibleStepError, metrics, prepare, run_closed_loop
from .schemas import (
    AttitudeRequest,
    AttitudeResponse,
    AttitudeRowModel,
    EnvelopePoint,
    FeasibilityRequest,
    FeasibilityResponse,
    HealthResponse,
    ScenarioRequest,
    SimulationResponse,
    StmResponse,
    TelemetryRowModel,
    default_inertia_model,
    scenario_from_request,
)

app = FastAPI(title="tumbledock", version=__version__)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/simulate", response_model=SimulationResponse)
def simulate(req: ScenarioRequest) -> SimulationResponse:
    try:
        config = scenario_from_request(req)
        prep = prepare(config)
        telem = run_closed_loop(config, prep)
    except InfeasibleStepError as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc
    except (ValueError, RuntimeError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return SimulationResponse(
        telemetry=[TelemetryRowModel(**row) for row in telem.rows],
        summary=metrics(telem),
        theta_max_m=prep.theta_max,
        y_max_m=prep.y_max,
        varpi_star=prep.varpi_star,
        final_r_body_m=tuple(telem.final_state[:3]),
        final_v_lvlh_m_s=tuple(telem.final_state[3:]),
    )


@app.post("/feasibility", response_model=FeasibilityResponse)
def feasibility(req: FeasibilityRequest) -> FeasibilityResponse:
    inertia_model = req.inertia or default_inertia_model()
    try:
        inertia = InertiaTensor(
            inertia_model.i1_kg_m2, inertia_model.i2_kg_m2, inertia_model.i3_kg_m2
        )
        orbit = OrbitParams(
            mu=req.orbit.mu_km3_s2,
            radius=req.orbit.orbit_radius_km,
            period=req.orbit.sampling_period_s,
        )
        stm = hcw_stm(orbit)
        inv = polhode_invariants(np.deg2rad(req.omega_body_deg_s), inertia)
        env = theta_max_envelope(
            ControlPolytope.box(req.constraints.u_max_m_s),
            tracking_control_matrix(stm),
            inertia,
            inv,
            orbit.period,
        )
        geom = req.constraints
        try:
            y_max = los_cap(geom.c_x, geom.c_z, geom.x0_m, geom.z0_m, env.theta_max)
        except CapNotReachedError:
            y_max = None
        sweep_points: list[EnvelopePoint] = []
        if req.sweep is not None:
            rows = envelope_sweep(
                inertia,
                np.array(req.sweep.omega_direction),
                np.deg2rad(req.sweep.spin_rates_deg_s),
                np.array(req.sweep.sampling_periods_s),
                orbit.n,
                geom.u_max_m_s,
                geom.c_x,
                geom.c_z,
                geom.x0_m,
                geom.z0_m,
            )
            sweep_points = [
                EnvelopePoint(
                    spin_rate_deg_s=math.degrees(r["spin_rate_rad_s"]),
                    sampling_period_s=r["sampling_period_s"],
                    varpi_star=r["varpi_star"],
                    theta_max_m=r["theta_max_m"],
                    y_max_m=r["y_max_m"],
                )
                for r in rows
            ]
    except (ValueError, RuntimeError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return FeasibilityResponse(
        varpi_star=env.varpi_star,
        theta_max_m=env.theta_max,
        y_max_m=y_max,
        velocity_ball_radius=env.radius_v,
        dv_ball_radius=env.radius_dv,
        sweep=sweep_points,
    )


@app.post("/attitude", response_model=AttitudeResponse)
def attitude(req: AttitudeRequest) -> AttitudeResponse:
    inertia_model = req.inertia or default_inertia_model()
    try:
        traj = propagate_attitude(
            RotationalState(
                q=np.array(req.q_scalar_first),
                omega=np.deg2rad(req.omega_body_deg_s),
            ),
            InertiaTensor(
                inertia_model.i1_kg_m2,
                inertia_model.i2_kg_m2,
                inertia_model.i3_kg_m2,
            ),
            OrbitParams(
                mu=req.orbit.mu_km3_s2,
                radius=req.orbit.orbit_radius_km,
                period=req.orbit.sampling_period_s,
            ),
            steps=req.steps,
            substeps=req.substeps,
            mode=req.mode,
        )
    except (ValueError, RuntimeError, FloatingPointError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    rows = [
        AttitudeRowModel(
            k=k,
            t_s=k * traj.T,
            dcm=[float(v) for v in traj.dcm(k).reshape(9)],
            omega_rad_s=tuple(traj.omega(k)),
        )
        for k in range(len(traj))
    ]
    return AttitudeResponse(rows=rows)


@app.get("/stm", response_model=StmResponse)
def stm(
    n_rad_s: float = Query(..., gt=0),
    period_s: float = Query(..., ge=0),
    mu_km3_s2: float = Query(398600.4, gt=0),
) -> StmResponse:
    try:
        radius = (mu_km3_s2 / n_rad_s**2) ** (1.0 / 3.0)
        pair = hcw_stm(OrbitParams(mu=mu_km3_s2, radius=radius, period=period_s))
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return StmResponse(
        n_rad_s=pair.n,
        period_s=pair.T,
        A_L=[[float(v) for v in row] for row in pair.A_L],
        B_L=[[float(v) for v in row] for row in pair.B_L],
    )
