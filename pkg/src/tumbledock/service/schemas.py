"""Pydantic request/response models for the guidance service."""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, Field

from ..attitude import InertiaTensor
from ..controller import HorizonConfig, Weights
from ..cw import OrbitParams
from ..simulate import ScenarioConfig, table1_scenario

Vec3 = tuple[float, float, float]
Vec4 = tuple[float, float, float, float]


class OrbitModel(BaseModel):
    mu_km3_s2: float = 398600.4
    orbit_radius_km: float = 7148.137
    sampling_period_s: float = 1.0


class InertiaModel(BaseModel):
    i1_kg_m2: float
    i2_kg_m2: float
    i3_kg_m2: float


class InitialStateModel(BaseModel):
    r_body_m: Vec3 = (1.5, 2.5, 1.5)
    v_lvlh_m_s: Vec3 = (0.0, 0.0, 0.0)
    q_scalar_first: Vec4 = (1.0, 0.0, 0.0, 0.0)
    omega_body_deg_s: Vec3 = (0.0, 3.53, 3.53)


class HorizonModel(BaseModel):
    control_horizon: int = Field(3, ge=1)
    lqr_window: int = Field(30, ge=0)


class WeightsModel(BaseModel):
    q_position: float = 1.0
    q_velocity: float = 10.0
    r_control: float = 500.0
    t_lateral: float = 50.0
    t_radial: float = 10.0
    q_lqr: float = 0.02
    alpha_lqr: float = 10.0


class ConstraintsModel(BaseModel):
    c_x: float = 1.0
    c_z: float = 1.0
    x0_m: float = 0.1
    z0_m: float = 0.1
    u_max_m_s: float = 0.075


class ScenarioRequest(BaseModel):
    orbit: OrbitModel = OrbitModel()
    inertia: InertiaModel | None = None
    initial_state: InitialStateModel = InitialStateModel()
    horizon: HorizonModel = HorizonModel()
    weights: WeightsModel = WeightsModel()
    constraints: ConstraintsModel = ConstraintsModel()
    steps: int = Field(35, ge=1)
    mode: str = "mpct"
    attitude_mode: str = "full"
    attitude_substeps: int = Field(10, ge=1)
    isp_s: float = 220.0
    m0_kg: float = 500.0


class TelemetryRowModel(BaseModel):
    step: int
    t_s: float
    rB_x: float
    rB_y: float
    rB_z: float
    rL_x: float
    rL_y: float
    rL_z: float
    vL_x: float
    vL_y: float
    vL_z: float
    uB_x: float
    uB_y: float
    uB_z: float
    thb_x: float
    thb_y: float
    thb_z: float
    Vstar: float
    status: str
    min_margin: float
    cum_dv: float


class SimulationResponse(BaseModel):
    telemetry: list[TelemetryRowModel]
    summary: dict
    theta_max_m: float
    y_max_m: float
    varpi_star: float
    final_r_body_m: Vec3
    final_v_lvlh_m_s: Vec3


class SweepModel(BaseModel):
    spin_rates_deg_s: list[float] = [1.0, 2.0, 3.0, 5.0]
    sampling_periods_s: list[float] = [0.5, 1.0, 2.0]
    omega_direction: Vec3 = (0.0, 1.0, 1.0)


class FeasibilityRequest(BaseModel):
    orbit: OrbitModel = OrbitModel()
    inertia: InertiaModel | None = None
    omega_body_deg_s: Vec3 = (0.0, 3.53, 3.53)
    constraints: ConstraintsModel = ConstraintsModel()
    sweep: SweepModel | None = None


class EnvelopePoint(BaseModel):
    spin_rate_deg_s: float
    sampling_period_s: float
    varpi_star: float
    theta_max_m: float
    y_max_m: float | None


class FeasibilityResponse(BaseModel):
    varpi_star: float
    theta_max_m: float
    y_max_m: float | None
    velocity_ball_radius: float
    dv_ball_radius: float
    sweep: list[EnvelopePoint] = []


class AttitudeRequest(BaseModel):
    orbit: OrbitModel = OrbitModel()
    inertia: InertiaModel | None = None
    q_scalar_first: Vec4 = (1.0, 0.0, 0.0, 0.0)
    omega_body_deg_s: Vec3 = (0.0, 3.53, 3.53)
    steps: int = Field(100, ge=1)
    substeps: int = Field(10, ge=1)
    mode: str = "full"


class AttitudeRowModel(BaseModel):
    k: int
    t_s: float
    dcm: list[float]  # 9 entries, row-major
    omega_rad_s: Vec3


class AttitudeResponse(BaseModel):
    rows: list[AttitudeRowModel]


class StmResponse(BaseModel):
    n_rad_s: float
    period_s: float
    A_L: list[list[float]]
    B_L: list[list[float]]


class HealthResponse(BaseModel):
    status: str
    version: str


def default_inertia_model() -> InertiaModel:
    cfg = table1_scenario()
    return InertiaModel(
        i1_kg_m2=cfg.inertia.i1, i2_kg_m2=cfg.inertia.i2, i3_kg_m2=cfg.inertia.i3
    )


def scenario_from_request(req: ScenarioRequest) -> ScenarioConfig:
    inertia = req.inertia or default_inertia_model()
    w = req.weights
    return ScenarioConfig(
        orbit=OrbitParams(
            mu=req.orbit.mu_km3_s2,
            radius=req.orbit.orbit_radius_km,
            period=req.orbit.sampling_period_s,
        ),
        inertia=InertiaTensor(
            inertia.i1_kg_m2, inertia.i2_kg_m2, inertia.i3_kg_m2
        ),
        r_body0=np.array(req.initial_state.r_body_m),
        v_lvlh0=np.array(req.initial_state.v_lvlh_m_s),
        q0=np.array(req.initial_state.q_scalar_first),
        omega0=np.deg2rad(req.initial_state.omega_body_deg_s),
        horizon=HorizonConfig(
            N_c=req.horizon.control_horizon, N=req.horizon.lqr_window
        ),
        weights=Weights(
            Q=np.array([w.q_position] * 3 + [w.q_velocity] * 3),
            R=np.full(3, w.r_control),
            T_w=np.array([w.t_lateral, w.t_radial, w.t_lateral]),
        ),
        q_lqr=w.q_lqr,
        alpha_lqr=w.alpha_lqr,
        c_x=req.constraints.c_x,
        c_z=req.constraints.c_z,
        x0=req.constraints.x0_m,
        z0=req.constraints.z0_m,
        u_max=req.constraints.u_max_m_s,
        steps=req.steps,
        mode=req.mode,
        attitude_mode=req.attitude_mode,
        attitude_substeps=req.attitude_substeps,
        isp=req.isp_s,
        m0=req.m0_kg,
    )


def request_from_scenario(cfg: ScenarioConfig) -> ScenarioRequest:
    return ScenarioRequest(
        orbit=OrbitModel(
            mu_km3_s2=cfg.orbit.mu,
            orbit_radius_km=cfg.orbit.radius,
            sampling_period_s=cfg.orbit.period,
        ),
        inertia=InertiaModel(
            i1_kg_m2=cfg.inertia.i1,
            i2_kg_m2=cfg.inertia.i2,
            i3_kg_m2=cfg.inertia.i3,
        ),
        initial_state=InitialStateModel(
            r_body_m=tuple(cfg.r_body0),
            v_lvlh_m_s=tuple(cfg.v_lvlh0),
            q_scalar_first=tuple(cfg.q0),
            omega_body_deg_s=tuple(np.rad2deg(cfg.omega0)),
        ),
        horizon=HorizonModel(
            control_horizon=cfg.horizon.N_c, lqr_window=cfg.horizon.N
        ),
        weights=WeightsModel(
            q_position=float(cfg.weights.Q[0]),
            q_velocity=float(cfg.weights.Q[3]),
            r_control=float(cfg.weights.R[0]),
            t_lateral=float(cfg.weights.T_w[0]),
            t_radial=float(cfg.weights.T_w[1]),
            q_lqr=cfg.q_lqr,
            alpha_lqr=cfg.alpha_lqr,
        ),
        constraints=ConstraintsModel(
            c_x=cfg.c_x,
            c_z=cfg.c_z,
            x0_m=cfg.x0,
            z0_m=cfg.z0,
            u_max_m_s=cfg.u_max,
        ),
        steps=cfg.steps,
        mode=cfg.mode,
        attitude_mode=cfg.attitude_mode,
        attitude_substeps=cfg.attitude_substeps,
        isp_s=cfg.isp,
        m0_kg=cfg.m0,
    )
