"""Blended-cost optimal control problem and its multiple-shooting transcription."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..dynamics import NU, NX

# diagonal weights, state order (p, theta_zyx, v, omega)
PRESETS = {
    "fig5": {
        "Q1": (1, 1, 1, 10, 10, 20, 0.1, 0.1, 0.1, 3, 5, 1.5),
        "Q2": (0, 0, 0, 0, 0, 0, 0, 0, 0, 3, 5, 1.5),
        "R": (0.1, 0.1, 0.1, 0.1),
    },
    "retuned": {
        "Q1": (1, 1, 1, 10, 10, 18, 0.1, 0.1, 0.8, 1.5, 2.7, 2.0),
        "Q2": (0, 0, 0, 0, 0, 0, 0, 0, 0, 1.5, 2.7, 2.0),
        "R": (0.1, 0.1, 0.1, 0.1),
    },
}


@dataclass(frozen=True)
class OcpConfig:
    horizon: float = 1.0
    nodes: int = 10
    Q1: np.ndarray = field(default_factory=lambda: np.array(PRESETS["retuned"]["Q1"], float))
    Q2: np.ndarray = field(default_factory=lambda: np.array(PRESETS["retuned"]["Q2"], float))
    R: np.ndarray = field(default_factory=lambda: np.array(PRESETS["retuned"]["R"], float))
    u_min: float = 0.0
    u_max: float = 1.0
    alpha_update_period: int = 10
    control_rate: float = 150.0
    # "hover": phi-dependent hover input; "level": the phi = 0 hover input; "zero"
    u_ref_mode: str = "hover"

    def __post_init__(self):
        for name in ("Q1", "Q2", "R"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.Q1.shape != (NX,) or self.Q2.shape != (NX,) or self.R.shape != (NU,):
            raise ValueError("Q1, Q2 must have 12 diagonal entries and R 4")
        if min(self.Q1.min(), self.Q2.min(), self.R.min()) < 0:
            raise ValueError("weights must be non-negative")
        if self.nodes < 2:
            raise ValueError("need at least two shooting nodes")
        if not self.u_min < self.u_max:
            raise ValueError("u_min must be below u_max")
        if self.u_ref_mode not in ("hover", "level", "zero"):
            raise ValueError(f"unknown u_ref_mode {self.u_ref_mode!r}")

    @property
    def dt_node(self) -> float:
        return self.horizon / self.nodes

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "OcpConfig":
        try:
            w = PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown weight preset {name!r}; choose from {sorted(PRESETS)}") from None
        return cls(Q1=np.array(w["Q1"], float), Q2=np.array(w["Q2"], float), R=np.array(w["R"], float), **overrides)


@dataclass(frozen=True)
class BlendContext:
    z_star: float = 0.45
    z_g: float = 0.0

    def __post_init__(self):
        if not self.z_star > self.z_g:
            raise ValueError("z_star must lie above z_g")


def blend_alpha(z: float, phi: float, ctx: BlendContext) -> float:
    """Weight of the flight cost: f(z) * cos(phi), with f ramping from 0 at z_g to 1 at z_star."""
    if z >= ctx.z_star:
        f = 1.0
    elif z >= ctx.z_g:
        f = (z - ctx.z_g) / (ctx.z_star - ctx.z_g)
    else:
        f = 0.0
    return min(max(f * math.cos(phi), 0.0), 1.0)


def blended_weights(alpha: float, cfg: OcpConfig) -> np.ndarray:
    return alpha * cfg.Q1 + (1.0 - alpha) * cfg.Q2


def stage_cost(x, u, x_ref, u_ref, alpha: float, cfg: OcpConfig) -> float:
    ex = np.asarray(x, float) - x_ref
    eu = np.asarray(u, float) - u_ref
    l1 = ex @ (cfg.Q1 * ex) + eu @ (cfg.R * eu)
    l2 = ex @ (cfg.Q2 * ex) + eu @ (cfg.R * eu)
    return float(alpha * l1 + (1.0 - alpha) * l2)


@dataclass
class NlpIterate:
    X: np.ndarray  # (N+1, 12)
    U: np.ndarray  # (N, 4)

    def copy(self) -> "NlpIterate":
        return NlpIterate(self.X.copy(), self.U.copy())


@dataclass
class ShootingNlp:
    """min sum_k L(x_k, u_k)  s.t.  x_0 = x0,  x_{k+1} = rk4(x_k, u_k),  u_min <= u_k <= u_max.

    ``x_ref`` is either one state (12,) shared by all nodes or per node (N, 12).
    """

    x0: np.ndarray
    x_ref: np.ndarray
    u_ref: np.ndarray
    alpha: float
    frame: np.ndarray
    cfg: OcpConfig
    ge_ratio: float = 1.0

    @property
    def N(self) -> int:
        return self.cfg.nodes

    @property
    def dt(self) -> float:
        return self.cfg.dt_node

    @property
    def q(self) -> np.ndarray:
        return blended_weights(self.alpha, self.cfg)

    def counts(self) -> dict:
        N = self.N
        return {
            "inputs": N * NU,
            "states": (N + 1) * NX,
            "defects": N * NX,
            "initial": NX,
        }

    def objective(self, X, U) -> float:
        ex = X[:-1] - self.x_ref
        eu = U - self.u_ref
        return float(np.sum(ex * ex * self.q) + np.sum(eu * eu * self.cfg.R))

    def defects(self, X, U) -> np.ndarray:
        """x_{k+1} - rk4(x_k, u_k), shape (N, 12)."""
        return X[1:] - _kernels.shoot(X, U, self.frame, self.ge_ratio, self.dt)

    def initial_residual(self, X) -> np.ndarray:
        return X[0] - self.x0

    def rollout(self, U) -> np.ndarray:
        return _kernels.rollout(self.x0, U, self.frame, self.ge_ratio, self.dt)

    def reduced_objective(self, U) -> float:
        U = np.asarray(U, float).reshape(self.N, NU)
        return self.objective(self.rollout(U), U)

    def bounds(self):
        n = self.N * NU
        return np.full(n, self.cfg.u_min), np.full(n, self.cfg.u_max)


def transcribe(x0, x_ref, u_ref, phi_frame, alpha: float, cfg: OcpConfig, ge_ratio: float = 1.0) -> ShootingNlp:
    """Build the shooting NLP; ``phi_frame`` is ``dynamics.model_frame(phi, params)``."""
    return ShootingNlp(
        np.asarray(x0, float).copy(),
        np.asarray(x_ref, float).copy(),
        np.asarray(u_ref, float).copy(),
        float(alpha),
        np.asarray(phi_frame, float),
        cfg,
        float(ge_ratio),
    )
