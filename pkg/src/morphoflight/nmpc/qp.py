"""Primal active-set solver for box-constrained convex QPs.

    minimize 0.5 x'Hx + g'x   subject to   lb <= x <= ub
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import MaxIterations, NumericalBreakdown

_FREE, _LOWER, _UPPER = 0, 1, 2


@dataclass
class QpResult:
    x: np.ndarray
    kkt_residual: float
    iterations: int
    working_set: np.ndarray  # 0 free, 1 at lower, 2 at upper


def kkt_residual(H, g, lb, ub, x) -> float:
    """Infinity norm of the projected-gradient step; zero exactly at a KKT point."""
    grad = H @ x + g
    return float(np.max(np.abs(x - np.clip(x - grad, lb, ub)), initial=0.0))


def _factor(Hff, reg):
    try:
        return scipy.linalg.cho_factor(Hff, check_finite=False)
    except np.linalg.LinAlgError:
        pass
    n = Hff.shape[0]
    shift = reg
    for _ in range(12):
        try:
            return scipy.linalg.cho_factor(Hff + shift * np.eye(n), check_finite=False)
        except np.linalg.LinAlgError:
            shift *= 10.0
    raise NumericalBreakdown("reduced Hessian not positive definite after regularization")


def qp_solve(H, g, lb, ub, x0=None, working_set=None, max_iter: int = 500, tol: float = 1e-12,
             reg: float = 1e-10) -> QpResult:
    """Solve the box QP; ``x0``/``working_set`` warm-start the active set.

    An infeasible ``x0`` is projected onto the box first. Variables on the
    working set sit exactly on their bound.
    """
    H = np.asarray(H, float)
    g = np.asarray(g, float)
    lb = np.asarray(lb, float)
    ub = np.asarray(ub, float)
    n = g.size
    if np.any(lb > ub):
        raise ValueError("lb > ub")
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(g))):
        raise NumericalBreakdown("non-finite QP data")

    x = np.zeros(n) if x0 is None else np.asarray(x0, float).copy()
    x = np.minimum(np.maximum(x, lb), ub)
    W = np.zeros(n, dtype=np.int8)
    if working_set is not None:
        W[:] = working_set
    W[(W == _FREE) & (x <= lb)] = _LOWER
    W[(W == _FREE) & (x >= ub)] = _UPPER
    x[W == _LOWER] = lb[W == _LOWER]
    x[W == _UPPER] = ub[W == _UPPER]

    at_subspace_min = False
    for it in range(1, max_iter + 1):
        free = W == _FREE
        grad = H @ x + g
        if at_subspace_min or not free.any():
            # multipliers of the bound constraints in the working set
            lam = np.where(W == _LOWER, grad, np.where(W == _UPPER, -grad, np.inf))
            lam[lb == ub] = np.inf
            j = int(np.argmin(lam))
            if lam[j] >= -tol * max(1.0, float(np.max(np.abs(g), initial=0.0))):
                return QpResult(x, kkt_residual(H, g, lb, ub, x), it, W)
            W[j] = _FREE
            at_subspace_min = False
            continue
        p = np.zeros(n)
        c = _factor(H[np.ix_(free, free)], reg)
        p[free] = -scipy.linalg.cho_solve(c, grad[free], check_finite=False)
        # ratio test against the bounds of the free variables
        step = 1.0
        block = -1
        block_kind = _FREE
        neg = free & (p < 0)
        pos = free & (p > 0)
        if neg.any():
            r = (lb[neg] - x[neg]) / p[neg]
            k = int(np.argmin(r))
            if r[k] < step:
                step, block, block_kind = r[k], np.flatnonzero(neg)[k], _LOWER
        if pos.any():
            r = (ub[pos] - x[pos]) / p[pos]
            k = int(np.argmin(r))
            if r[k] < step:
                step, block, block_kind = r[k], np.flatnonzero(pos)[k], _UPPER
        step = max(step, 0.0)
        x[free] += step * p[free]
        if block >= 0:
            W[block] = block_kind
            x[block] = lb[block] if block_kind == _LOWER else ub[block]
        else:
            at_subspace_min = True
        # rounding in the update may nudge other free variables past a bound by an ulp
        x[free] = np.minimum(np.maximum(x[free], lb[free]), ub[free])
    raise MaxIterations(f"active-set QP did not terminate in {max_iter} iterations")
