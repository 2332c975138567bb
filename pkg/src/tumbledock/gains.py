"""Terminal virtual-controller gains.

A constant LVLH LQR gain (from the discrete algebraic Riccati equation)
rotated onto the hybrid state per grid step, plus the explicit two-step
dead-beat gains that land the position exactly on an equilibrium
trajectory.  All gains depend only on the precomputed attitude grid, so
the whole schedule is built before the control loop runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attitude import AttitudeTrajectory
from .cw import StmPair


class DareError(RuntimeError):
    """Riccati iteration failed to converge or produced an indefinite cost."""


def solve_dare(
    A: np.ndarray,
    B: np.ndarray,
    Q: np.ndarray,
    R: np.ndarray,
    method: str = "iteration",
    tol: float = 1e-12,
    max_iter: int = 10000,
) -> tuple[np.ndarray, np.ndarray]:
    """Solve P = Q + A'PA - A'PB (R + B'PB)^-1 B'PA and the optimal gain.

    ``iteration`` runs the plain fixed-point recursion; ``doubling`` the
    structure-preserving doubling algorithm.  Both return (P, K) with
    K = -(R + B'PB)^-1 B'PA.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Q = np.asarray(Q, dtype=float)
    R = np.asarray(R, dtype=float)

    if method == "iteration":
        P = Q.copy()
        for _ in range(max_iter):
            BtP = B.T @ P
            K = -np.linalg.solve(R + BtP @ B, BtP @ A)
            P_next = Q + A.T @ P @ (A + B @ K)
            P_next = 0.5 * (P_next + P_next.T)
            if np.linalg.norm(P_next - P) <= tol * max(1.0, np.linalg.norm(P_next)):
                P = P_next
                break
            P = P_next
        else:
            raise DareError("fixed-point Riccati iteration did not converge")
    elif method == "doubling":
        Ak = A.copy()
        Gk = B @ np.linalg.solve(R, B.T)
        Hk = Q.copy()
        for _ in range(200):
            W = np.eye(A.shape[0]) + Gk @ Hk
            WinvA = np.linalg.solve(W, Ak)
            WinvG = np.linalg.solve(W, Gk)
            H_next = Hk + Ak.T @ Hk @ WinvA
            G_next = Gk + Ak @ WinvG @ Ak.T
            A_next = Ak @ WinvA
            if np.linalg.norm(H_next - Hk) <= tol * max(1.0, np.linalg.norm(H_next)):
                Hk = H_next
                break
            Ak, Gk, Hk = A_next, 0.5 * (G_next + G_next.T), 0.5 * (H_next + H_next.T)
        else:
            raise DareError("doubling Riccati recursion did not converge")
        P = 0.5 * (Hk + Hk.T)
    else:
        raise ValueError(f"unknown method {method!r}")

    eigs = np.linalg.eigvalsh(P)
    if eigs.min() < -1e-9 * max(1.0, eigs.max()):
        raise DareError("Riccati solution is indefinite")
    BtP = B.T @ P
    K = -np.linalg.solve(R + BtP @ B, BtP @ A)
    return P, K


def lqr_weights(q_lqr: float, alpha_lqr: float) -> tuple[np.ndarray, np.ndarray]:
    """Scalar-parameterized LQR weight pair: Q = q*diag(I, alpha*I), R = I."""
    if q_lqr <= 0 or alpha_lqr <= 0:
        raise ValueError("q_lqr and alpha_lqr must be positive")
    Q = q_lqr * np.diag([1.0, 1.0, 1.0, alpha_lqr, alpha_lqr, alpha_lqr])
    return Q, np.eye(3)


@dataclass(frozen=True)
class LqrDesign:
    """Constant LVLH LQR data: weights, Riccati cost and gain."""

    Q: np.ndarray
    R: np.ndarray
    P: np.ndarray
    K_F: np.ndarray

    @classmethod
    def design(cls, stm: StmPair, q_lqr: float, alpha_lqr: float) -> "LqrDesign":
        Q, R = lqr_weights(q_lqr, alpha_lqr)
        P, K = solve_dare(stm.A_L, stm.B_L, Q, R)
        rho = np.max(np.abs(np.linalg.eigvals(stm.A_L + stm.B_L @ K)))
        if rho >= 1.0:
            raise DareError(f"closed loop not contractive (rho = {rho:.6f})")
        return cls(Q=Q, R=R, P=P, K_F=K)


def _state_rotation(C: np.ndarray) -> np.ndarray:
    """blockdiag(C^T, I) mapping the hybrid state into LVLH coordinates."""
    S = np.zeros((6, 6))
    S[:3, :3] = C.T
    S[3:, 3:] = np.eye(3)
    return S


def rotate_lqr_gain(K_F: np.ndarray, C_k: np.ndarray) -> np.ndarray:
    """LVLH gain re-expressed on the hybrid state with body-frame output."""
    return C_k @ K_F @ _state_rotation(C_k)


def deadbeat_gains(
    stm: StmPair, C_k: np.ndarray, C_k2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Two-step dead-beat gain pair (K_x, K_theta) at one grid step.

    Solving the two-step reachability identity
    r(k+2) = (A_rr^2 + A_rv A_vr) r(k) + (A_rr A_rv + A_rv A_vv) v(k) + A_rv u(k)
    for the u(k) that places r(k+2) on the equilibrium position gives an
    LVLH gain, which is then rotated onto the hybrid state and the
    equilibrium parameter.
    """
    A_rv_inv = stm.A_rv_inv()
    K_hat_r = -A_rv_inv @ (stm.A_rr @ stm.A_rr + stm.A_rv @ stm.A_vr)
    K_hat_v = -A_rv_inv @ (stm.A_rr @ stm.A_rv + stm.A_rv @ stm.A_vv)
    K_hat = np.hstack([K_hat_r, K_hat_v])
    K_x = C_k @ K_hat @ _state_rotation(C_k)
    K_theta = C_k @ A_rv_inv @ C_k2.T
    return K_x, K_theta


@dataclass(frozen=True)
class GainSchedule:
    """Per-grid-step LQR and dead-beat gains over the whole run."""

    K_lqr: np.ndarray  # (K, 3, 6)
    K_db_x: np.ndarray  # (K, 3, 6)
    K_db_theta: np.ndarray  # (K, 3, 3)

    def __len__(self) -> int:
        return self.K_lqr.shape[0]


def build_gain_schedule(
    stm: StmPair, traj: AttitudeTrajectory, design: LqrDesign
) -> GainSchedule:
    """Evaluate all rotation-dependent gains on the attitude grid.

    Dead-beat gains at step k need the DCM at k+2, so the schedule is two
    entries shorter than the attitude grid.
    """
    K = len(traj) - 2
    if K < 1:
        raise ValueError("attitude grid too short for a gain schedule")
    K_lqr = np.empty((K, 3, 6))
    K_db_x = np.empty((K, 3, 6))
    K_db_theta = np.empty((K, 3, 3))
    for k in range(K):
        C_k = traj.dcm(k)
        K_lqr[k] = rotate_lqr_gain(design.K_F, C_k)
        K_db_x[k], K_db_theta[k] = deadbeat_gains(stm, C_k, traj.dcm(k + 2))
    for arr in (K_lqr, K_db_x, K_db_theta):
        arr.setflags(write=False)
    return GainSchedule(K_lqr=K_lqr, K_db_x=K_db_x, K_db_theta=K_db_theta)
