"""Hill-Clohessy-Wiltshire relative motion about a circular orbit.

Discrete impulsive model in the target's LVLH frame (x radial, y
along-track, z along the orbit angular momentum).  The impulse is a
velocity increment applied at the step boundary, so the input matrix
couples to velocity only.  Also carries the propellant bookkeeping
(Tsiolkovsky).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

G0 = 9.81  # standard gravity, m/s^2


class SingularSamplingPeriodError(ValueError):
    """The position/velocity coupling block is not invertible for this n*T."""


@dataclass(frozen=True)
class OrbitParams:
    """Circular reference orbit and controller sampling period.

    mu in km^3/s^2, radius in km; the mean motion is derived.  The
    small-step regime n*T < pi/2 is required by the feasibility
    kinematics downstream.
    """

    mu: float = 398600.4
    radius: float = 7148.137  # 770 km altitude, Envisat-class (not paper-specified)
    period: float = 1.0  # sampling period T, s

    def __post_init__(self):
        if self.mu <= 0 or self.radius <= 0:
            raise ValueError("mu and radius must be positive")
        if self.period < 0:
            raise ValueError("sampling period must be nonnegative")
        if self.n * self.period >= math.pi / 2:
            raise ValueError("n*T must be below pi/2 (small-step regime)")

    @property
    def n(self) -> float:
        """Mean motion sqrt(mu/R^3), rad/s."""
        return math.sqrt(self.mu / self.radius**3)


@dataclass(frozen=True)
class StmPair:
    """Discrete HCW state transition pair (A_L, B_L) with submatrix views."""

    A_L: np.ndarray
    B_L: np.ndarray
    n: float
    T: float

    @property
    def A_rr(self) -> np.ndarray:
        return self.A_L[:3, :3]

    @property
    def A_rv(self) -> np.ndarray:
        return self.A_L[:3, 3:]

    @property
    def A_vr(self) -> np.ndarray:
        return self.A_L[3:, :3]

    @property
    def A_vv(self) -> np.ndarray:
        return self.A_L[3:, 3:]

    @property
    def B_ru(self) -> np.ndarray:
        return self.B_L[:3, :]

    @property
    def B_vu(self) -> np.ndarray:
        return self.B_L[3:, :]

    def A_rv_inv(self) -> np.ndarray:
        """Inverse of the position/velocity coupling block.

        Raises SingularSamplingPeriodError when the block cannot be
        inverted (T = 0 or n*T at a transfer singularity).
        """
        det = np.linalg.det(self.A_rv)
        if abs(det) < 1e-300 or not np.isfinite(det):
            raise SingularSamplingPeriodError(
                f"A_rv singular at n*T = {self.n * self.T:.6g}"
            )
        inv = np.linalg.inv(self.A_rv)
        if not np.all(np.isfinite(inv)) or np.linalg.cond(self.A_rv) > 1e12:
            raise SingularSamplingPeriodError(
                f"A_rv ill-conditioned at n*T = {self.n * self.T:.6g}"
            )
        return inv


def hcw_stm(orbit: OrbitParams) -> StmPair:
    """Closed-form HCW transition matrices for one sampling period.

    T = 0 returns the exact identity pair (a zero-time step moves
    nothing); consumers that invert A_rv reject that case themselves.
    """
    n = orbit.n
    T = orbit.period
    s = math.sin(n * T)
    c = math.cos(n * T)
    A_L = np.array(
        [
            [4 - 3 * c, 0.0, 0.0, s / n, 2 * (1 - c) / n, 0.0],
            [6 * (s - n * T), 1.0, 0.0, -2 * (1 - c) / n, (4 * s - 3 * n * T) / n, 0.0],
            [0.0, 0.0, c, 0.0, 0.0, s / n],
            [3 * n * s, 0.0, 0.0, c, 2 * s, 0.0],
            [-6 * n * (1 - c), 0.0, 0.0, -2 * s, 4 * c - 3, 0.0],
            [0.0, 0.0, -n * s, 0.0, 0.0, c],
        ]
    )
    B_L = np.vstack([np.zeros((3, 3)), np.eye(3)])
    A_L.setflags(write=False)
    B_L.setflags(write=False)
    return StmPair(A_L=A_L, B_L=B_L, n=n, T=T)


def propagate_lvlh(x: np.ndarray, u: np.ndarray, stm: StmPair) -> np.ndarray:
    """One impulsive step x(k+1) = A_L x(k) + B_L u(k) in LVLH coordinates."""
    x = np.asarray(x, dtype=float).reshape(6)
    u = np.asarray(u, dtype=float).reshape(3)
    return stm.A_L @ x + stm.B_L @ u


@dataclass
class ImpulseBudget:
    """Accumulated impulse magnitudes and the propellant model inputs."""

    isp: float = 220.0
    m0: float = 500.0
    total_dv: float = 0.0
    total_dv_sq: float = 0.0

    def add(self, u: np.ndarray) -> None:
        dv = float(np.linalg.norm(np.asarray(u, dtype=float)))
        self.total_dv += dv
        self.total_dv_sq += dv * dv


def fuel_mass(budget: ImpulseBudget) -> float:
    """Propellant mass for the accumulated delta-v (Tsiolkovsky inverse)."""
    if budget.isp <= 0 or budget.m0 <= 0:
        raise ValueError("isp and m0 must be positive")
    return budget.m0 * (1.0 - math.exp(-budget.total_dv / (budget.isp * G0)))
