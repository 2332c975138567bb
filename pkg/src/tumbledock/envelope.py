"""Closed-form feasibility envelope for equilibrium parameters.

Answers, offline and in closed form, how far from the target an
equilibrium position may sit so that tracking it forever respects the
control polytope: a constant control-sensitivity matrix depending only
on (n, T), the extremum of the squared gyroscopic-coupling vector over
the polhode, a ball-polytope maximization, and the planar cap on the
approach-axis coordinate that folds the spherical bound into the
line-of-sight polytope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attitude import InertiaTensor, PolhodeInvariants
from .cw import StmPair


class CapNotReachedError(ValueError):
    """The sphere bound is too small to intersect the line-of-sight prism."""


@dataclass(frozen=True)
class TrackingControlMatrix:
    """Blocks of the constant equilibrium-tracking control sensitivity.

    The three blocks multiply the equilibrium position, velocity and
    per-step velocity increment; only their spectral norms enter the
    envelope.
    """

    U_r: np.ndarray
    U_v: np.ndarray
    U_dv: np.ndarray

    @property
    def norms(self) -> tuple[float, float, float]:
        return (
            float(np.linalg.norm(self.U_r, 2)),
            float(np.linalg.norm(self.U_v, 2)),
            float(np.linalg.norm(self.U_dv, 2)),
        )


def tracking_control_matrix(stm: StmPair) -> TrackingControlMatrix:
    """Control needed to ride an equilibrium point, per unit (r_e, v_e, dv_e)."""
    T = stm.T
    A_rv_inv = stm.A_rv_inv()
    A_rr_p = np.eye(3) - stm.A_rr
    U_r = A_rv_inv @ A_rr_p - stm.A_vv @ A_rv_inv @ A_rr_p - stm.A_vr
    U_v = T * (A_rv_inv @ A_rr_p - stm.A_vv @ A_rv_inv + A_rv_inv)
    U_dv = T * A_rv_inv
    return TrackingControlMatrix(U_r=U_r, U_v=U_v, U_dv=U_dv)


def polhode_extremum(inertia: InertiaTensor, inv: PolhodeInvariants) -> float:
    """Extremum of the squared gyroscopic-coupling norm over the polhode.

    Closed form over the three principal-plane crossings, floored at
    zero (steady spins about the major or minor axis produce no
    coupling).
    """
    I = inertia.diag
    h2 = inv.h * inv.h
    E2 = 2.0 * inv.E
    lo, hi = E2 * I.min(), E2 * I.max()
    if not (lo - 1e-9 * (1 + hi) <= h2 <= hi + 1e-9 * (1 + hi)):
        raise ValueError(f"(h, E) outside the polhode range [{lo:.6g}, {hi:.6g}]")
    best = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            val = (
                -((I[i] + I[j]) ** 2 / (I[i] * I[j]) ** 3)
                * (h2 - E2 * I[i])
                * (h2 - E2 * I[j])
            )
            best = max(best, val)
    return best


def lemma2_theta_max(
    A_list: list[np.ndarray], b: np.ndarray, r: np.ndarray
) -> float:
    """Largest scale for which sum_j A^j x_j <= b holds over balls of radius r_j*scale.

    Rows whose coefficient rows all vanish do not constrain the scale and
    are skipped; an empty effective row set is reported as unbounded.
    """
    b = np.asarray(b, dtype=float).reshape(-1)
    r = np.asarray(r, dtype=float).reshape(-1)
    if np.any(b < 0):
        raise ValueError("right-hand side must be componentwise nonnegative")
    if np.any(r <= 0):
        raise ValueError("ball radius factors must be positive")
    if len(A_list) != len(r):
        raise ValueError("one radius factor per coefficient matrix required")
    mats = [np.asarray(A, dtype=float) for A in A_list]
    best = math.inf
    for i in range(b.shape[0]):
        denom = sum(rj * np.linalg.norm(Aj[i]) for rj, Aj in zip(r, mats))
        if denom > 0:
            best = min(best, b[i] / denom)
    return best


@dataclass(frozen=True)
class ControlPolytope:
    """Control constraint rows A_u u <= b_u with the origin inside."""

    A_u: np.ndarray
    b_u: np.ndarray

    def __post_init__(self):
        if np.any(self.b_u < 0):
            raise ValueError("control polytope must contain the origin (b_u >= 0)")
        if not np.all(np.isfinite(self.A_u)):
            raise ValueError("control polytope rows must be finite")

    @classmethod
    def box(cls, u_max: float) -> "ControlPolytope":
        """Symmetric componentwise bound |u_i| <= u_max."""
        A = np.vstack([np.eye(3), -np.eye(3)])
        b = np.full(6, float(u_max))
        return cls(A_u=A, b_u=b)


@dataclass(frozen=True)
class FeasibilityEnvelope:
    """Scalar summary of the offline equilibrium-parameter feasibility set."""

    varpi_star: float
    radius_v: float
    radius_dv: float
    theta_max: float
    y_max: float | None = None


def theta_max_envelope(
    polytope: ControlPolytope,
    U: TrackingControlMatrix,
    inertia: InertiaTensor,
    inv: PolhodeInvariants,
    T: float,
) -> FeasibilityEnvelope:
    """Maximum equilibrium distance respecting the control polytope forever.

    The position, velocity and velocity-increment contributions are
    bounded by balls of radius (1, h/I_min, sqrt(varpi*)T) times the
    equilibrium distance and folded through the blockwise norms of the
    tracking control sensitivity.
    """
    varpi = polhode_extremum(inertia, inv)
    nr, nv, ndv = U.norms
    radius_v = inv.h / inertia.minor_moment
    radius_dv = math.sqrt(varpi) * T
    A_scaled = [nr * polytope.A_u, nv * polytope.A_u, ndv * polytope.A_u]
    radii = [1.0, radius_v, radius_dv]
    # Zero radii (static target, steady spin) contribute nothing: drop them.
    A_eff = [A for A, rj in zip(A_scaled, radii) if rj > 0]
    r_eff = [rj for rj in radii if rj > 0]
    theta_max = lemma2_theta_max(A_eff, polytope.b_u, np.array(r_eff))
    return FeasibilityEnvelope(
        varpi_star=varpi,
        radius_v=radius_v,
        radius_dv=radius_dv,
        theta_max=theta_max,
    )


def los_cap(c_x: float, c_z: float, x0: float, z0: float, theta_max: float) -> float:
    """Planar cap on the approach-axis coordinate inside the sphere bound.

    Intersecting the sphere of radius theta_max with the line-of-sight
    prism and flattening the spherical face into a plane normal to the
    approach axis yields a single linear constraint; this returns its
    bound.
    """
    if c_x <= 0 or c_z <= 0:
        raise ValueError("corridor slopes must be positive")
    if x0 < 0 or z0 < 0:
        raise ValueError("apex offsets must be nonnegative")
    xi1 = c_x**2 * c_z**2 * (x0**2 + z0**2) + (c_z * z0 + c_x * x0) ** 2
    xi2 = c_x * z0 + c_z * x0
    xi3 = c_x**2 * c_z**2 + c_x**2 + c_z**2
    disc = xi3 * theta_max**2 - xi1
    if disc < 0:
        raise CapNotReachedError(
            f"theta_max = {theta_max:.6g} m too small for the prism apex"
        )
    y = c_x * c_z * (math.sqrt(disc) - xi2) / xi3
    if y < 0:
        raise CapNotReachedError(
            f"theta_max = {theta_max:.6g} m gives a negative approach cap"
        )
    return y


def envelope_sweep(
    inertia: InertiaTensor,
    omega_direction: np.ndarray,
    spin_rates: np.ndarray,
    periods: np.ndarray,
    n: float,
    u_max: float,
    c_x: float,
    c_z: float,
    x0: float,
    z0: float,
) -> list[dict]:
    """Envelope over a (spin rate, sampling period) grid, for design maps.

    Spin rates are magnitudes in rad/s applied along ``omega_direction``;
    each grid point reports the polhode extremum, the sphere bound and
    the planar cap (None when the sphere misses the prism apex).
    """
    from .attitude import polhode_invariants
    from .cw import OrbitParams, hcw_stm

    direction = np.asarray(omega_direction, dtype=float).reshape(3)
    nrm = np.linalg.norm(direction)
    if nrm == 0:
        raise ValueError("omega direction must be nonzero")
    direction = direction / nrm
    polytope = ControlPolytope.box(u_max)
    mu = 398600.4
    radius = (mu / n**2) ** (1.0 / 3.0)
    rows = []
    for T in periods:
        stm = hcw_stm(OrbitParams(mu=mu, radius=radius, period=float(T)))
        U = tracking_control_matrix(stm)
        for rate in spin_rates:
            inv = polhode_invariants(rate * direction, inertia)
            env = theta_max_envelope(polytope, U, inertia, inv, float(T))
            try:
                y = los_cap(c_x, c_z, x0, z0, env.theta_max)
            except CapNotReachedError:
                y = None
            rows.append(
                {
                    "spin_rate_rad_s": float(rate),
                    "sampling_period_s": float(T),
                    "varpi_star": env.varpi_star,
                    "theta_max_m": env.theta_max,
                    "y_max_m": y,
                }
            )
    return rows
