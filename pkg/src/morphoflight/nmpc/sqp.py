"""Gauss-Newton SQP on the shooting NLP, condensed to a dense input-only QP."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..dynamics import NU, NX
from .ocp import NlpIterate, ShootingNlp
from .qp import qp_solve

REAL_TIME = "real_time_single_step"
CONVERGE = "converge"

_MERIT_PENALTY = 100.0
_ARMIJO = 1e-4
_MAX_BACKTRACK = 30


@dataclass
class CondensedQp:
    H: np.ndarray  # (N*4, N*4)
    g: np.ndarray  # gradient of the model at du = 0
    G: np.ndarray  # (N, 12, N*4) state sensitivities of the costed nodes
    c: np.ndarray  # (N, 12) state offsets from initial mismatch and defects
    A: np.ndarray
    B: np.ndarray
    F: np.ndarray


@dataclass
class SqpInfo:
    objective: float
    merit: float
    step_norm: float
    step_length: float
    kkt_stationarity: float
    primal_feasibility: float
    qp_iterations: int
    iterations: int
    working_set: np.ndarray | None = None


def condense(nlp: ShootingNlp, it: NlpIterate) -> CondensedQp:
    """Eliminate the state deviations by forward sensitivity propagation."""
    N = nlp.N
    X, U = it.X, it.U
    F, A, B = _kernels.discrete_jac(X, U, nlp.frame, nlp.ge_ratio, nlp.dt)
    d = F - X[1:]
    c = np.zeros((N, NX))
    G = np.zeros((N, NX, N * NU))
    c[0] = nlp.x0 - X[0]
    for k in range(N - 1):
        c[k + 1] = A[k] @ c[k] + d[k]
        G[k + 1] = A[k] @ G[k]
        G[k + 1][:, NU * k : NU * (k + 1)] += B[k]
    q = nlp.q
    rx = X[:-1] + c - nlp.x_ref
    Gs = G.reshape(N * NX, N * NU)
    w = np.tile(q, N)
    r = np.tile(nlp.cfg.R, N)
    H = 2.0 * (Gs.T @ (w[:, None] * Gs))
    H[np.diag_indices_from(H)] += 2.0 * r
    g = 2.0 * (Gs.T @ (w * rx.ravel()) + r * (U - nlp.u_ref).ravel())
    return CondensedQp(H, g, G, c, A, B, F)


def merit(nlp: ShootingNlp, it: NlpIterate) -> float:
    infeas = np.sum(np.abs(nlp.defects(it.X, it.U))) + np.sum(np.abs(nlp.initial_residual(it.X)))
    return nlp.objective(it.X, it.U) + _MERIT_PENALTY * infeas


def primal_feasibility(nlp: ShootingNlp, it: NlpIterate) -> float:
    return float(
        max(np.max(np.abs(nlp.defects(it.X, it.U))), np.max(np.abs(nlp.initial_residual(it.X))))
    )


def stationarity(nlp: ShootingNlp, it: NlpIterate) -> float:
    """Projected reduced-gradient norm at a dynamically consistent iterate."""
    qp = condense(nlp, it)
    lb, ub = nlp.bounds()
    u = it.U.ravel()
    return float(np.max(np.abs(u - np.clip(u - qp.g, lb, ub))))


def _gn_step(nlp: ShootingNlp, it: NlpIterate, working_set, line_search: bool):
    qp = condense(nlp, it)
    lb, ub = nlp.bounds()
    u = it.U.ravel()
    # QP in absolute inputs so active bounds land exactly on u_min/u_max
    res = qp_solve(qp.H, qp.g - qp.H @ u, lb, ub, x0=u, working_set=working_set)
    v = res.x
    du = v - u
    m0 = merit(nlp, it)
    infeas = np.sum(np.abs(qp.c[0])) + np.sum(np.abs(qp.F - it.X[1:]))
    slope = float(qp.g @ du) - _MERIT_PENALTY * infeas

    t = 1.0
    U_new = v.reshape(nlp.N, NU).copy()
    X_new = nlp.rollout(U_new)
    m_new = nlp.objective(X_new, U_new)
    if line_search and m_new > m0 + _ARMIJO * t * slope:
        accepted = False
        if slope < 0.0:
            for _ in range(_MAX_BACKTRACK):
                t *= 0.5
                U_new = ((1.0 - t) * u + t * v).reshape(nlp.N, NU)
                U_new = np.minimum(np.maximum(U_new, nlp.cfg.u_min), nlp.cfg.u_max)
                X_new = nlp.rollout(U_new)
                m_new = nlp.objective(X_new, U_new)
                if m_new <= m0 + _ARMIJO * t * slope:
                    accepted = True
                    break
        if not accepted:
            t = 0.0
            U_new = it.U.copy()
            X_new = nlp.rollout(U_new)
            m_new = nlp.objective(X_new, U_new)
    step_norm = float(np.max(np.abs(U_new.ravel() - u), initial=0.0))
    return NlpIterate(X_new, U_new), res, m0, m_new, t, step_norm


def sqp_iterate(nlp: ShootingNlp, iterate: NlpIterate, mode: str = REAL_TIME, working_set=None,
                line_search: bool | None = None, tol: float = 1e-8, max_iter: int = 50):
    """One real-time Gauss-Newton iteration, or iterate to convergence.

    States are refreshed by re-rolling the dynamics from ``x0`` after each
    input update. Real-time mode takes the full step unless it fails to
    decrease the merit, converge mode always backtracks (Armijo).
    Returns ``(iterate, SqpInfo)``.
    """
    if not (np.all(np.isfinite(iterate.X)) and np.all(np.isfinite(iterate.U))):
        raise ValueError("non-finite iterate")
    if mode not in (REAL_TIME, CONVERGE):
        raise ValueError(f"unknown mode {mode!r}")
    if line_search is None:
        line_search = True
    it = iterate
    n_iter = 0
    qp_iters = 0
    ws = working_set
    while True:
        it, res, m0, m_new, t, step_norm = _gn_step(nlp, it, ws, line_search)
        ws = res.working_set
        n_iter += 1
        qp_iters += res.iterations
        if mode == REAL_TIME or step_norm < tol or t == 0.0 or n_iter >= max_iter:
            break
    info = SqpInfo(
        objective=nlp.objective(it.X, it.U),
        merit=m_new,
        step_norm=step_norm,
        step_length=t,
        kkt_stationarity=stationarity(nlp, it) if mode == CONVERGE else res.kkt_residual,
        primal_feasibility=primal_feasibility(nlp, it),
        qp_iterations=qp_iters,
        iterations=n_iter,
        working_set=ws,
    )
    return it, info


def initial_iterate(nlp: ShootingNlp, U=None) -> NlpIterate:
    U = np.tile(nlp.u_ref, (nlp.N, 1)) if U is None else np.asarray(U, float).copy()
    return NlpIterate(nlp.rollout(U), U)
