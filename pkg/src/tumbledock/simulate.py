"""Closed-loop rendezvous simulation against the rotating-target plant.

Each step builds and solves the condensed QP, applies the first input
through the same hybrid model used for prediction (nominal plant), and
records full telemetry.  Any constraint violation beyond tolerance or an
infeasible QP aborts the run with a binding-constraint report.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .attitude import (
    AttitudeTrajectory,
    InertiaTensor,
    RotationalState,
    polhode_invariants,
    propagate_attitude,
)
from .controller import (
    CondensedQP,
    ConstraintSet,
    ControlSchedules,
    HorizonConfig,
    Weights,
    build_qp,
    extract_control,
    reduce_constraints,
)
from .cw import ImpulseBudget, OrbitParams, hcw_stm
from .envelope import (
    ControlPolytope,
    los_cap,
    theta_max_envelope,
    tracking_control_matrix,
)
from .gains import LqrDesign
from .ltv import RelativeState

MARGIN_TOL = -1e-9

TELEMETRY_COLUMNS = [
    "step", "t_s",
    "rB_x", "rB_y", "rB_z",
    "rL_x", "rL_y", "rL_z",
    "vL_x", "vL_y", "vL_z",
    "uB_x", "uB_y", "uB_z",
    "thb_x", "thb_y", "thb_z",
    "Vstar", "status", "min_margin", "cum_dv",
]


class InfeasibleStepError(RuntimeError):
    """QP infeasible or constraints violated during the closed loop."""

    def __init__(self, step: int, detail: str):
        super().__init__(f"step {step}: {detail}")
        self.step = step
        self.detail = detail


@dataclass
class ScenarioConfig:
    """Everything needed to reproduce one closed-loop run."""

    orbit: OrbitParams
    inertia: InertiaTensor
    r_body0: np.ndarray
    v_lvlh0: np.ndarray
    q0: np.ndarray
    omega0: np.ndarray
    horizon: HorizonConfig
    weights: Weights
    q_lqr: float
    alpha_lqr: float
    c_x: float
    c_z: float
    x0: float
    z0: float
    u_max: float
    steps: int
    mode: str = "mpct"  # mpct | baseline_mpc
    attitude_mode: str = "full"
    attitude_substeps: int = 10
    isp: float = 220.0
    m0: float = 500.0

    def __post_init__(self):
        self.r_body0 = np.asarray(self.r_body0, dtype=float).reshape(3)
        self.v_lvlh0 = np.asarray(self.v_lvlh0, dtype=float).reshape(3)
        self.q0 = np.asarray(self.q0, dtype=float).reshape(4)
        self.omega0 = np.asarray(self.omega0, dtype=float).reshape(3)
        if self.mode not in ("mpct", "baseline_mpc"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")


# Externally sourced Envisat principal inertia (kg m^2); the values are the
# ones circulating in debris-removal studies, not measured here.
ENVISAT_INERTIA = (17023.3, 124825.7, 129112.2)


def table1_scenario(
    mode: str = "mpct",
    N_c: int = 3,
    N: int = 30,
    steps: int = 35,
) -> ScenarioConfig:
    """Named preset reproducing the restrictive near-rendezvous case study."""
    return ScenarioConfig(
        orbit=OrbitParams(),
        inertia=InertiaTensor(*ENVISAT_INERTIA),
        r_body0=np.array([1.5, 2.5, 1.5]),
        v_lvlh0=np.zeros(3),
        q0=np.array([1.0, 0.0, 0.0, 0.0]),
        omega0=np.deg2rad([0.0, 3.53, 3.53]),
        horizon=HorizonConfig(N_c=N_c, N=N),
        weights=Weights(
            Q=np.array([1.0, 1.0, 1.0, 10.0, 10.0, 10.0]),
            R=np.array([500.0, 500.0, 500.0]),
            T_w=np.array([50.0, 10.0, 50.0]),
        ),
        q_lqr=0.02,
        alpha_lqr=10.0,
        c_x=1.0,
        c_z=1.0,
        x0=0.1,
        z0=0.1,
        u_max=0.075,
        steps=steps,
        mode=mode,
    )


@dataclass
class PreparedScenario:
    """Scenario with every offline quantity precomputed."""

    config: ScenarioConfig
    attitude: AttitudeTrajectory
    schedules: ControlSchedules
    constraints: ConstraintSet
    theta_max: float
    y_max: float
    varpi_star: float


def prepare(config: ScenarioConfig) -> PreparedScenario:
    """Precompute the attitude grid, model schedules, gains and envelope."""
    stm = hcw_stm(config.orbit)
    grid_steps = config.steps + config.horizon.N_p + 2
    traj = propagate_attitude(
        RotationalState(q=config.q0, omega=config.omega0),
        config.inertia,
        config.orbit,
        steps=grid_steps,
        substeps=config.attitude_substeps,
        mode=config.attitude_mode,
    )
    design = LqrDesign.design(stm, config.q_lqr, config.alpha_lqr)
    schedules = ControlSchedules.build(stm, traj, design)
    inv = polhode_invariants(config.omega0, config.inertia)
    env = theta_max_envelope(
        ControlPolytope.box(config.u_max),
        tracking_control_matrix(stm),
        config.inertia,
        inv,
        config.orbit.period,
    )
    y_max = los_cap(config.c_x, config.c_z, config.x0, config.z0, env.theta_max)
    constraints = ConstraintSet.from_geometry(
        config.c_x, config.c_z, config.x0, config.z0, config.u_max, y_max
    )
    return PreparedScenario(
        config=config,
        attitude=traj,
        schedules=schedules,
        constraints=constraints,
        theta_max=env.theta_max,
        y_max=y_max,
        varpi_star=env.varpi_star,
    )


@dataclass
class Telemetry:
    """Append-only per-step records plus the terminal state."""

    rows: list[dict] = field(default_factory=list)
    final_state: np.ndarray | None = None
    theta_max: float = math.nan
    y_max: float = math.nan

    def append(self, **kw) -> None:
        self.rows.append(kw)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows])


def _margins(qp: CondensedQP, z: np.ndarray) -> tuple[float, list]:
    slack = qp.g - qp.G @ z
    worst = int(np.argmin(slack))
    binding = [
        (qp.tags[i], float(slack[i])) for i in np.argsort(slack)[:3]
    ]
    return float(slack[worst]), binding


def run_closed_loop(
    config: ScenarioConfig, prepared: PreparedScenario | None = None
) -> Telemetry:
    """Run the receding-horizon loop for the configured number of steps."""
    from .qp import QpOptions, solve_qp

    prep = prepared or prepare(config)
    fix_theta = config.mode == "baseline_mpc"
    state = RelativeState(config.r_body0, config.v_lvlh0).vector
    budget = ImpulseBudget(isp=config.isp, m0=config.m0)
    telem = Telemetry(theta_max=prep.theta_max, y_max=prep.y_max)
    options = QpOptions()
    for k in range(config.steps):
        qp = build_qp(
            k,
            state,
            prep.schedules,
            config.weights,
            prep.constraints,
            config.horizon,
            fix_theta_zero=fix_theta,
        )
        qp = reduce_constraints(qp)
        sol = solve_qp(qp.H, qp.f, qp.G, qp.g, options=options)
        if sol.status == "infeasible":
            raise InfeasibleStepError(k, "QP infeasible")
        if sol.status != "optimal":
            raise InfeasibleStepError(k, f"solver failure ({sol.status})")
        min_margin, binding = _margins(qp, sol.z)
        if min_margin < MARGIN_TOL:
            raise InfeasibleStepError(
                k, f"constraint violation {min_margin:.3e} at {binding[0][0]}"
            )
        u, theta = extract_control(sol.z, qp)
        budget.add(u)
        C_k = prep.attitude.dcm(k)
        r_lvlh = C_k.T @ state[:3]
        telem.append(
            step=k,
            t_s=k * config.orbit.period,
            rB_x=state[0], rB_y=state[1], rB_z=state[2],
            rL_x=r_lvlh[0], rL_y=r_lvlh[1], rL_z=r_lvlh[2],
            vL_x=state[3], vL_y=state[4], vL_z=state[5],
            uB_x=u[0], uB_y=u[1], uB_z=u[2],
            thb_x=theta[0], thb_y=theta[1], thb_z=theta[2],
            Vstar=qp.cost(sol.z),
            status=sol.status,
            min_margin=min_margin,
            cum_dv=budget.total_dv,
        )
        step_model = prep.schedules.steps[k]
        state = step_model.A @ state + step_model.B @ u
    telem.final_state = state
    return telem


def metrics(telem: Telemetry) -> dict:
    """Run summary: impulse totals, worst margin, terminal errors, descent."""
    if not telem.rows:
        raise ValueError("empty telemetry")
    u = np.column_stack([telem.column(f"uB_{ax}") for ax in "xyz"])
    norms = np.linalg.norm(u, axis=1)
    vstar = telem.column("Vstar")
    violations = int(
        np.sum(vstar[1:] > vstar[:-1] + 1e-6 * (1.0 + vstar[:-1]))
    )
    last = telem.rows[-1]
    theta_last = np.array([last["thb_x"], last["thb_y"], last["thb_z"]])
    if telem.final_state is not None:
        final_err = float(np.linalg.norm(telem.final_state[:3] - theta_last))
    else:
        r_last = np.array([last["rB_x"], last["rB_y"], last["rB_z"]])
        final_err = float(np.linalg.norm(r_last - theta_last))
    return {
        "steps": len(telem.rows),
        "total_dv": float(np.sum(norms)),
        "total_dv_sq": float(np.sum(norms**2)),
        "min_margin": float(telem.column("min_margin").min()),
        "max_abs_u": float(np.abs(u).max()),
        "final_tracking_err_m": final_err,
        "vstar_increase_count": violations,
        "theta_norm_first_m": float(
            np.linalg.norm([telem.rows[0][f"thb_{ax}"] for ax in "xyz"])
        ),
        "theta_norm_last_m": float(np.linalg.norm(theta_last)),
    }


def write_telemetry_csv(telem: Telemetry, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TELEMETRY_COLUMNS)
        writer.writeheader()
        for row in telem.rows:
            writer.writerow({k: row[k] for k in TELEMETRY_COLUMNS})


def write_summary_csv(summary: dict, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(summary.keys()))
        writer.writerow(list(summary.values()))
