"""Rotational state of the tumbling target on the controller grid.

Free rigid-body rotation (optionally with the LVLH-rate coupling term)
integrated with fixed-step RK4 over scalar-first quaternions.  The
direction-cosine matrices produced here map LVLH coordinates into the
target's body axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cw import OrbitParams


class IntegrationBlowupError(FloatingPointError):
    """Attitude propagation produced a non-finite state."""


class PolhodeRangeError(ValueError):
    """(h, E) pair incompatible with any torque-free rotation of this body."""


def cross_matrix(a: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix such that cross_matrix(a) @ b == a x b."""
    ax, ay, az = a
    return np.array([[0.0, -az, ay], [az, 0.0, -ax], [-ay, ax, 0.0]])


@dataclass(frozen=True)
class InertiaTensor:
    """Principal moments of inertia in body axes, kg m^2.

    Components are stored in the same axis order as the body-frame
    angular velocity; the moment entering the velocity bound is the
    minimum ("minor axis") one, exposed as ``minor_moment``.
    """

    i1: float
    i2: float
    i3: float

    def __post_init__(self):
        m = (self.i1, self.i2, self.i3)
        if min(m) <= 0:
            raise ValueError("principal moments must be positive")
        s = sum(m)
        if any(s - 2 * mi < -1e-9 * s for mi in m):
            raise ValueError("principal moments violate the triangle inequality")

    @property
    def diag(self) -> np.ndarray:
        return np.array([self.i1, self.i2, self.i3])

    @property
    def minor_moment(self) -> float:
        return min(self.i1, self.i2, self.i3)


@dataclass
class RotationalState:
    """Scalar-first unit quaternion (LVLH -> body) and body rate, rad/s."""

    q: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float).reshape(4).copy()
        self.omega = np.asarray(self.omega, dtype=float).reshape(3).copy()
        nq = np.linalg.norm(self.q)
        if not np.isfinite(nq) or nq == 0:
            raise ValueError("quaternion must be finite and nonzero")
        self.q /= nq


def dcm_from_quaternion(q: np.ndarray) -> np.ndarray:
    """Direction-cosine matrix (frame rotation) for a scalar-first quaternion."""
    q0 = q[0]
    qv = q[1:]
    return (
        (q0 * q0 - qv @ qv) * np.eye(3)
        + 2.0 * np.outer(qv, qv)
        - 2.0 * q0 * cross_matrix(qv)
    )


def _quat_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    p0, pv = p[0], p[1:]
    q0, qv = q[0], q[1:]
    return np.concatenate(
        [[p0 * q0 - pv @ qv], p0 * qv + q0 * pv + np.cross(pv, qv)]
    )


def euler_poinsot_rate(
    state: RotationalState,
    inertia: InertiaTensor,
    n: float = 0.0,
    mode: str = "torque_free",
) -> np.ndarray:
    """Body-frame angular acceleration of the target's LVLH-relative rate.

    ``torque_free`` treats the LVLH frame as inertial; ``full`` keeps the
    orbital-rate coupling, for which the current attitude matters.
    """
    I = inertia.diag
    w = state.omega
    if mode == "torque_free":
        return -np.cross(w, I * w) / I
    if mode == "full":
        C = dcm_from_quaternion(state.q)
        w_lvlh = n * C @ np.array([0.0, 0.0, 1.0])  # LVLH rate in body axes
        w_in = w + w_lvlh
        return np.cross(w, w_lvlh) - np.cross(w_in, I * w_in) / I
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class AttitudeTrajectory:
    """Direction-cosine matrices and body rates on the sampling grid kT."""

    C_seq: np.ndarray  # (K+1, 3, 3)
    omega_seq: np.ndarray  # (K+1, 3)
    T: float

    def __len__(self) -> int:
        return self.C_seq.shape[0]

    def dcm(self, k: int) -> np.ndarray:
        return self.C_seq[k]

    def omega(self, k: int) -> np.ndarray:
        return self.omega_seq[k]


def propagate_attitude(
    initial: RotationalState,
    inertia: InertiaTensor,
    orbit: OrbitParams,
    steps: int,
    substeps: int = 10,
    mode: str = "full",
) -> AttitudeTrajectory:
    """RK4 propagation of (quaternion, body rate) over ``steps`` grid points.

    The quaternion is renormalized after every substep, which keeps every
    returned DCM orthonormal to machine precision.
    """
    if steps < 1 or substeps < 1:
        raise ValueError("steps and substeps must be >= 1")
    n = orbit.n
    h = orbit.period / substeps

    def rate(q, w):
        st = RotationalState.__new__(RotationalState)
        st.q = q
        st.omega = w
        dw = euler_poinsot_rate(st, inertia, n=n, mode=mode)
        dq = 0.5 * _quat_mul(q, np.concatenate([[0.0], w]))
        return dq, dw

    q = initial.q.copy()
    w = initial.omega.copy()
    C_seq = np.empty((steps + 1, 3, 3))
    omega_seq = np.empty((steps + 1, 3))
    C_seq[0] = dcm_from_quaternion(q)
    omega_seq[0] = w
    for k in range(steps):
        for _ in range(substeps):
            dq1, dw1 = rate(q, w)
            dq2, dw2 = rate(q + 0.5 * h * dq1, w + 0.5 * h * dw1)
            dq3, dw3 = rate(q + 0.5 * h * dq2, w + 0.5 * h * dw2)
            dq4, dw4 = rate(q + h * dq3, w + h * dw3)
            q = q + (h / 6.0) * (dq1 + 2 * dq2 + 2 * dq3 + dq4)
            w = w + (h / 6.0) * (dw1 + 2 * dw2 + 2 * dw3 + dw4)
            q = q / np.linalg.norm(q)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(w))):
            raise IntegrationBlowupError(f"non-finite attitude state at step {k + 1}")
        C_seq[k + 1] = dcm_from_quaternion(q)
        omega_seq[k + 1] = w
    C_seq.setflags(write=False)
    omega_seq.setflags(write=False)
    return AttitudeTrajectory(C_seq=C_seq, omega_seq=omega_seq, T=orbit.period)


@dataclass(frozen=True)
class PolhodeInvariants:
    """Angular momentum magnitude and rotational kinetic energy."""

    h: float
    E: float


def polhode_invariants(omega: np.ndarray, inertia: InertiaTensor) -> PolhodeInvariants:
    """Conserved pair (|I w|, 0.5 w' I w) of the torque-free rotation."""
    w = np.asarray(omega, dtype=float).reshape(3)
    I = inertia.diag
    h = float(np.linalg.norm(I * w))
    E = float(0.5 * w @ (I * w))
    lo, hi = 2 * E * inertia.minor_moment, 2 * E * max(I)
    if not (lo - 1e-9 * (1 + hi) <= h * h <= hi + 1e-9 * (1 + hi)):
        raise PolhodeRangeError(f"h^2 = {h * h:.6g} outside [{lo:.6g}, {hi:.6g}]")
    return PolhodeInvariants(h=h, E=E)


def export_attitude_csv(traj: AttitudeTrajectory, path: str) -> None:
    """Write the grid as CSV: k, t, DCM entries row-major, rate components."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["k", "t_s"]
            + [f"c{i}{j}" for i in range(1, 4) for j in range(1, 4)]
            + ["w1_rad_s", "w2_rad_s", "w3_rad_s"]
        )
        for k in range(len(traj)):
            row = [k, k * traj.T]
            row += [f"{v:.15g}" for v in traj.dcm(k).reshape(9)]
            row += [f"{v:.15g}" for v in traj.omega(k)]
            writer.writerow(row)
