"""Hybrid body/LVLH time-varying model and its equilibrium structure.

The working state stacks the relative position in target body axes on
top of the relative velocity in LVLH axes, which makes the line-of-sight
and control constraints constant matrices while the step dynamics pick
up the target's rotation.  Every step admits a 3-dimensional space of
equilibrium state/control pairs, parameterized by the constant
body-frame position; the basis is normalized so the parameter IS that
position.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cw import StmPair


class RankDeficientBasisError(RuntimeError):
    """Numerical kernel dimension departed from 3 for one step."""


@dataclass
class RelativeState:
    """Position in body axes (m) stacked on velocity in LVLH axes (m/s)."""

    r_body: np.ndarray
    v_lvlh: np.ndarray

    def __post_init__(self):
        self.r_body = np.asarray(self.r_body, dtype=float).reshape(3).copy()
        self.v_lvlh = np.asarray(self.v_lvlh, dtype=float).reshape(3).copy()
        if not (np.all(np.isfinite(self.r_body)) and np.all(np.isfinite(self.v_lvlh))):
            raise ValueError("relative state must be finite")

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.r_body, self.v_lvlh])


def hybrid_from_lvlh(x_lvlh: np.ndarray, C: np.ndarray) -> np.ndarray:
    """(r_L, v_L) -> (r_B, v_L) with the given LVLH->body DCM."""
    x = np.asarray(x_lvlh, dtype=float).reshape(6)
    return np.concatenate([C @ x[:3], x[3:]])


def lvlh_from_hybrid(x_hyb: np.ndarray, C: np.ndarray) -> np.ndarray:
    """(r_B, v_L) -> (r_L, v_L) with the given LVLH->body DCM."""
    x = np.asarray(x_hyb, dtype=float).reshape(6)
    return np.concatenate([C.T @ x[:3], x[3:]])


@dataclass(frozen=True)
class LtvStep:
    """One-step transition of the hybrid state under a body-frame impulse."""

    A: np.ndarray  # 6x6
    B: np.ndarray  # 6x3
    k: int = 0


def body_ltv_step(stm: StmPair, C_k: np.ndarray, C_k1: np.ndarray, k: int = 0) -> LtvStep:
    """Assemble the hybrid-state step matrices from the DCMs at k and k+1."""
    A = np.empty((6, 6))
    A[:3, :3] = C_k1 @ stm.A_rr @ C_k.T
    A[:3, 3:] = C_k1 @ stm.A_rv
    A[3:, :3] = stm.A_vr @ C_k.T
    A[3:, 3:] = stm.A_vv
    B = np.vstack([C_k1 @ stm.B_ru @ C_k.T, stm.B_vu @ C_k.T])
    A.setflags(write=False)
    B.setflags(write=False)
    return LtvStep(A=A, B=B, k=k)


@dataclass(frozen=True)
class EquilibriumBasis:
    """9x3 map from the equilibrium position parameter to a (state, control) pair.

    The leading 3x3 block is the identity, so the parameter equals the
    body-frame equilibrium position directly.
    """

    M: np.ndarray  # 9x3
    k: int = 0

    @property
    def M_x(self) -> np.ndarray:
        return self.M[:6, :]

    @property
    def M_u(self) -> np.ndarray:
        return self.M[6:, :]


def equilibrium_basis(step: LtvStep, rank_rtol: float = 1e-8) -> EquilibriumBasis:
    """Kernel of [A - I, B] normalized to the identity-position form.

    The kernel is computed by SVD with a relative rank tolerance; the
    echelon normalization inverts the top position block, which the
    equilibrium structure guarantees to be invertible whenever the
    kernel dimension is the expected 3.
    """
    K = np.hstack([step.A - np.eye(6), step.B])
    _, sing, vt = np.linalg.svd(K)
    tol = rank_rtol * sing[0]
    nullity = int(np.sum(sing <= tol)) + (9 - len(sing))
    if nullity != 3:
        raise RankDeficientBasisError(
            f"kernel dimension {nullity} != 3 at step {step.k}"
        )
    basis = vt[6:, :].T  # 9x3, orthonormal columns spanning the kernel
    top = basis[:3, :]
    if abs(np.linalg.det(top)) < 1e-12:
        raise RankDeficientBasisError(
            f"degenerate position block in kernel basis at step {step.k}"
        )
    M = basis @ np.linalg.inv(top)
    M.setflags(write=False)
    return EquilibriumBasis(M=M, k=step.k)


def equilibrium_trajectory(
    theta: np.ndarray, bases: list[EquilibriumBasis]
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-step (state, control) pairs for a fixed equilibrium parameter."""
    theta = np.asarray(theta, dtype=float).reshape(3)
    return [(b.M_x @ theta, b.M_u @ theta) for b in bases]
