"""Dense convex QP solver for small condensed control problems.

Dual active-set method in the Goldfarb-Idnani style: start from the
unconstrained minimizer and add violated rows one at a time, taking
partial dual steps (dropping blocking rows) until each target row joins
the working set.  No feasibility phase is needed and infeasibility falls
out as a certified dual ray.  Sized for a dozen to a hundred decision
variables and a few hundred inequality rows; solutions carry certified
KKT residuals.  Solver state is local to each call, so concurrent
solves never interact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class QpOptions:
    tol: float = 1e-9
    max_iter: int = 5000


@dataclass
class QpSolution:
    z: np.ndarray
    lam: np.ndarray
    status: str  # optimal | infeasible | iteration_limit
    kkt_residual: float
    iterations: int = 0
    active_set: list[int] = field(default_factory=list)


def kkt_residual(
    H: np.ndarray,
    f: np.ndarray,
    G: np.ndarray,
    g: np.ndarray,
    z: np.ndarray,
    lam: np.ndarray,
) -> float:
    """Largest violation among stationarity, feasibility, dual sign and
    complementarity for the point (z, lam)."""
    z = np.asarray(z, dtype=float).reshape(-1)
    lam = np.asarray(lam, dtype=float).reshape(-1)
    stat = float(np.max(np.abs(H @ z + f + G.T @ lam))) if G.size else float(
        np.max(np.abs(H @ z + f))
    )
    slack = G @ z - g if G.size else np.zeros(0)
    primal = float(np.max(slack)) if slack.size else 0.0
    dual = float(np.max(-lam)) if lam.size else 0.0
    comp = float(np.max(np.abs(lam * slack))) if slack.size else 0.0
    return max(stat, max(primal, 0.0), max(dual, 0.0), comp)


def _solve_kkt(H, G_w, rhs_top):
    """Direction pair (p, r) from [H Gw'; Gw 0][p; r] = [rhs_top; 0]."""
    d = H.shape[0]
    nw = G_w.shape[0]
    if nw == 0:
        return np.linalg.solve(H, rhs_top), np.zeros(0)
    KKT = np.zeros((d + nw, d + nw))
    KKT[:d, :d] = H
    KKT[:d, d:] = G_w.T
    KKT[d:, :d] = G_w
    rhs = np.concatenate([rhs_top, np.zeros(nw)])
    try:
        sol = np.linalg.solve(KKT, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(KKT, rhs, rcond=None)[0]
    return sol[:d], sol[d:]


def solve_qp(
    H: np.ndarray,
    f: np.ndarray,
    G: np.ndarray | None = None,
    g: np.ndarray | None = None,
    options: QpOptions | None = None,
) -> QpSolution:
    """Minimize 0.5 z'Hz + f'z subject to G z <= g.

    H must be symmetric positive semidefinite; a curvature floor of
    1e-10 trace(H)/d is added when it is singular, which leaves the
    minimizer of well-posed problems unchanged to solver tolerance.
    """
    options = options or QpOptions()
    H = 0.5 * (np.asarray(H, dtype=float) + np.asarray(H, dtype=float).T)
    f = np.asarray(f, dtype=float).reshape(-1)
    d = f.shape[0]
    if G is None or g is None or np.asarray(G).size == 0:
        G = np.zeros((0, d))
        g = np.zeros(0)
    G = np.asarray(G, dtype=float).reshape(-1, d)
    g = np.asarray(g, dtype=float).reshape(-1)
    m = G.shape[0]

    try:
        np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        eps = max(1e-10 * np.trace(H) / max(d, 1), 1e-14)
        H = H + eps * np.eye(d)

    viol_tol = options.tol * (1.0 + float(np.max(np.abs(g))) if m else 1.0)
    z = np.linalg.solve(H, -f)
    W: list[int] = []
    lam_w: list[float] = []
    iters = 0

    while iters < options.max_iter:
        slack = G @ z - g if m else np.zeros(0)
        if not m or np.max(slack) <= viol_tol:
            lam_full = np.zeros(m)
            for j, l in zip(W, lam_w):
                lam_full[j] = max(l, 0.0)
            res = kkt_residual(H, f, G, g, z, lam_full)
            return QpSolution(
                z=z, lam=lam_full, status="optimal",
                kkt_residual=res, iterations=iters, active_set=sorted(W),
            )
        i = int(np.argmax(slack))
        s_i = float(slack[i])
        u_plus = 0.0
        while iters < options.max_iter:
            iters += 1
            G_w = G[W] if W else np.zeros((0, d))
            p, r = _solve_kkt(H, G_w, -G[i])
            curv = float(-G[i] @ p)  # equals p'Hp >= 0
            t2 = s_i / curv if curv > options.tol * (1 + abs(s_i)) else np.inf
            t1 = np.inf
            blocker = -1
            for idx in range(len(W)):
                if r[idx] < -options.tol:
                    cand = lam_w[idx] / (-r[idx])
                    if cand < t1 - 1e-15:
                        t1 = cand
                        blocker = idx
            t = min(t1, t2)
            if not np.isfinite(t):
                lam_full = np.zeros(m)
                for j, l in zip(W, lam_w):
                    lam_full[j] = max(l, 0.0)
                return QpSolution(
                    z=z, lam=lam_full, status="infeasible",
                    kkt_residual=float("nan"), iterations=iters,
                    active_set=sorted(W),
                )
            if t > 0:
                z = z + t * p
                for idx in range(len(W)):
                    lam_w[idx] += t * r[idx]
                u_plus += t
                s_i -= t * curv
            if t2 <= t1:
                W.append(i)
                lam_w.append(u_plus)
                break
            W.pop(blocker)
            lam_w.pop(blocker)

    lam_full = np.zeros(m)
    for j, l in zip(W, lam_w):
        lam_full[j] = max(l, 0.0)
    return QpSolution(
        z=z, lam=lam_full,
        status="iteration_limit",
        kkt_residual=kkt_residual(H, f, G, g, z, lam_full),
        iterations=iters, active_set=sorted(W),
    )
