"""Condensed tracking-MPC problem built per control step.

The decision vector stacks the free control inputs and the equilibrium
parameter.  Predicted states are eliminated by recursive substitution
through three phases (free inputs, scheduled LQR, two-step dead-beat),
leaving one dense QP whose constraint rows all carry provenance tags for
telemetry of binding constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attitude import AttitudeTrajectory
from .cw import StmPair
from .gains import GainSchedule, LqrDesign, build_gain_schedule
from .ltv import EquilibriumBasis, LtvStep, body_ltv_step, equilibrium_basis


class HorizonCoverageError(ValueError):
    """Precomputed schedules do not span the requested prediction window."""


@dataclass(frozen=True)
class HorizonConfig:
    """Phase layout: N_c free inputs, N+1 LQR steps, two dead-beat steps."""

    N_c: int
    N: int

    def __post_init__(self):
        if self.N_c < 1:
            raise ValueError("control horizon must be >= 1")
        if self.N < 0:
            raise ValueError("LQR window must be >= 0")

    @property
    def N_p(self) -> int:
        return self.N_c + self.N + 2


@dataclass(frozen=True)
class Weights:
    """Diagonal stage weights: state Q, control R, equilibrium offset T_w."""

    Q: np.ndarray  # (6,)
    R: np.ndarray  # (3,)
    T_w: np.ndarray  # (3,)

    def __post_init__(self):
        object.__setattr__(self, "Q", np.asarray(self.Q, dtype=float).reshape(6))
        object.__setattr__(self, "R", np.asarray(self.R, dtype=float).reshape(3))
        object.__setattr__(self, "T_w", np.asarray(self.T_w, dtype=float).reshape(3))
        if np.any(self.Q < 0):
            raise ValueError("state weights must be nonnegative")
        if np.any(self.R <= 0) or np.any(self.T_w <= 0):
            raise ValueError("control and offset weights must be positive")


def los_rows(c_x: float, c_z: float, x0: float, z0: float) -> tuple[np.ndarray, np.ndarray]:
    """Line-of-sight prism half-planes on the body-frame position."""
    A = np.array(
        [
            [0.0, -1.0, 0.0],
            [c_x, -1.0, 0.0],
            [-c_x, -1.0, 0.0],
            [0.0, -1.0, c_z],
            [0.0, -1.0, -c_z],
        ]
    )
    b = np.array([0.0, c_x * x0, c_x * x0, c_z * z0, c_z * z0])
    return A, b


@dataclass(frozen=True)
class ConstraintSet:
    """Stage constraints on the hybrid state, the control and the parameter."""

    A_x: np.ndarray  # (m_x, 6)
    b_x: np.ndarray
    A_u: np.ndarray  # (m_u, 3)
    b_u: np.ndarray
    A_db: np.ndarray  # (m_db, 3)
    b_db: np.ndarray

    @classmethod
    def from_geometry(
        cls,
        c_x: float,
        c_z: float,
        x0: float,
        z0: float,
        u_max: float,
        y_max: float,
    ) -> "ConstraintSet":
        """Position-only LOS rows, componentwise control box, approach cap."""
        A_los, b_los = los_rows(c_x, c_z, x0, z0)
        A_x = np.hstack([A_los, np.zeros((5, 3))])
        A_u = np.vstack([np.eye(3), -np.eye(3)])
        b_u = np.full(6, float(u_max))
        return cls(
            A_x=A_x,
            b_x=b_los,
            A_u=A_u,
            b_u=b_u,
            A_db=np.array([[0.0, 1.0, 0.0]]),
            b_db=np.array([float(y_max)]),
        )


@dataclass
class CondensedQP:
    """Dense QP data: cost 0.5 z'Hz + f'z + const, rows G z <= g."""

    H: np.ndarray
    f: np.ndarray
    G: np.ndarray
    g: np.ndarray
    const: float
    tags: list[tuple[str, int, int]]
    n_controls: int  # free inputs in z; the tail of z is the parameter block

    @property
    def dim(self) -> int:
        return self.f.shape[0]

    def cost(self, z: np.ndarray) -> float:
        z = np.asarray(z, dtype=float).reshape(-1)
        return float(0.5 * z @ self.H @ z + self.f @ z + self.const)


@dataclass(frozen=True)
class ControlSchedules:
    """Immutable per-grid-step model, basis and gain data for a whole run."""

    stm: StmPair
    steps: list[LtvStep]
    bases: list[EquilibriumBasis]
    gains: GainSchedule

    @classmethod
    def build(
        cls, stm: StmPair, traj: AttitudeTrajectory, design: LqrDesign
    ) -> "ControlSchedules":
        n_steps = len(traj) - 1
        steps = [
            body_ltv_step(stm, traj.dcm(k), traj.dcm(k + 1), k=k)
            for k in range(n_steps)
        ]
        bases = [equilibrium_basis(s) for s in steps]
        gains = build_gain_schedule(stm, traj, design)
        return cls(stm=stm, steps=steps, bases=bases, gains=gains)


def build_qp(
    k: int,
    x_k: np.ndarray,
    schedules: ControlSchedules,
    weights: Weights,
    constraints: ConstraintSet,
    horizon: HorizonConfig,
    fix_theta_zero: bool = False,
) -> CondensedQP:
    """Condense the three-phase prediction into one dense QP at step k.

    ``fix_theta_zero`` pins the equilibrium parameter at the origin and
    removes it from the decision vector (plain MPC with the same
    terminal machinery).
    """
    N_c, N_p = horizon.N_c, horizon.N_p
    if (
        k + N_p + 1 > len(schedules.bases)
        or k + N_p + 1 > len(schedules.gains)
        or k + N_p > len(schedules.steps)
    ):
        raise HorizonCoverageError(
            f"schedules cover {len(schedules.gains)} gain steps; "
            f"step {k} with N_p = {N_p} needs {k + N_p + 1}"
        )
    x_k = np.asarray(x_k, dtype=float).reshape(6)
    d = 3 * N_c + 3
    S_theta = np.zeros((3, d))
    S_theta[:, 3 * N_c:] = np.eye(3)

    Q = np.diag(weights.Q)
    R = np.diag(weights.R)
    T_w = np.diag(weights.T_w)

    H = np.zeros((d, d))
    f = np.zeros(d)
    const = 0.0

    def add_cost(S, c, Wmat):
        nonlocal H, f, const
        WS = Wmat @ S
        H += 2.0 * S.T @ WS
        f += 2.0 * (c @ WS)
        const += float(c @ Wmat @ c)

    rows_G: list[np.ndarray] = []
    rows_g: list[np.ndarray] = []
    tags: list[tuple[str, int, int]] = []

    def add_rows(A, S, c, b, phase, i):
        rows_G.append(A @ S)
        rows_g.append(b - A @ c)
        tags.extend((phase, i, r) for r in range(A.shape[0]))

    Sx = np.zeros((6, d))
    cx = x_k.copy()
    for i in range(N_p + 1):
        base = schedules.bases[k + i]
        if i < N_c:
            Su = np.zeros((3, d))
            Su[:, 3 * i : 3 * (i + 1)] = np.eye(3)
            cu = np.zeros(3)
            phase = "mpc"
        elif i <= N_p - 2:
            K = schedules.gains.K_lqr[k + i]
            Su = K @ Sx + (base.M_u - K @ base.M_x) @ S_theta
            cu = K @ cx
            phase = "lqr"
        else:
            Kx = schedules.gains.K_db_x[k + i]
            Kt = schedules.gains.K_db_theta[k + i]
            Su = Kx @ Sx + Kt @ S_theta
            cu = Kx @ cx
            phase = "deadbeat"

        if i <= N_p - 1:
            add_cost(Sx - base.M_x @ S_theta, cx, Q)
        add_cost(Su - base.M_u @ S_theta, cu, R)
        if i >= 1:
            add_rows(constraints.A_x, Sx, cx, constraints.b_x, "state", i)
        add_rows(constraints.A_u, Su, cu, constraints.b_u, phase, i)

        if i <= N_p - 1:
            step = schedules.steps[k + i]
            Sx = step.A @ Sx + step.B @ Su
            cx = step.A @ cx + step.B @ cu

    add_cost(S_theta, np.zeros(3), T_w)
    add_rows(
        constraints.A_db, S_theta, np.zeros(3), constraints.b_db, "theta_cap", 0
    )

    G = np.vstack(rows_G)
    g = np.concatenate(rows_g)
    H = 0.5 * (H + H.T)

    if fix_theta_zero:
        nu = 3 * N_c
        H = H[:nu, :nu]
        f = f[:nu]
        G = G[:, :nu]
        qp = CondensedQP(H=H, f=f, G=G, g=g, const=const, tags=tags, n_controls=N_c)
        return reduce_constraints(qp)
    return CondensedQP(H=H, f=f, G=G, g=g, const=const, tags=tags, n_controls=N_c)


def extract_control(solution: np.ndarray, qp: CondensedQP) -> tuple[np.ndarray, np.ndarray]:
    """Applied body-frame impulse and equilibrium parameter from a solution."""
    z = np.asarray(solution, dtype=float).reshape(-1)
    u = z[:3].copy()
    if qp.dim == 3 * qp.n_controls:  # parameter pinned at the origin
        theta = np.zeros(3)
    else:
        theta = z[-3:].copy()
    return u, theta


def reduce_constraints(qp: CondensedQP, decimals: int = 12) -> CondensedQP:
    """Drop duplicate rows and rows dominated by positive scalings.

    Rows are normalized to unit length; among rows sharing a direction
    only the tightest bound is kept.  Zero rows with nonnegative bounds
    are vacuous and removed; a zero row with a negative bound is kept as
    an explicit certificate of infeasibility.
    """
    G, g, tags = qp.G, qp.g, qp.tags
    keep: dict[tuple, int] = {}
    order: list[int] = []
    norm_g = np.empty(len(g))
    for i in range(G.shape[0]):
        nrm = np.linalg.norm(G[i])
        if nrm < 1e-14:
            if g[i] >= -1e-12:
                continue
            key = ("zero", i)
            norm_g[i] = g[i]
        else:
            key = tuple(np.round(G[i] / nrm, decimals))
            norm_g[i] = g[i] / nrm
        if key in keep:
            j = keep[key]
            if norm_g[i] < norm_g[j]:
                order[order.index(j)] = i
                keep[key] = i
        else:
            keep[key] = i
            order.append(i)
    idx = sorted(order)
    return CondensedQP(
        H=qp.H,
        f=qp.f,
        G=G[idx],
        g=g[idx],
        const=qp.const,
        tags=[tags[i] for i in idx],
        n_controls=qp.n_controls,
    )


def dump_qp(qp: CondensedQP, path: str) -> None:
    """Plain-text dump: one header line per block (name rows cols), then rows."""
    with open(path, "w") as fh:
        for name, arr in (("H", qp.H), ("f", qp.f), ("G", qp.G), ("g", qp.g)):
            mat = np.atleast_2d(arr)
            fh.write(f"{name} {mat.shape[0]} {mat.shape[1]}\n")
            for row in mat:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
        fh.write(f"const 1 1\n{qp.const:.17g}\n")
