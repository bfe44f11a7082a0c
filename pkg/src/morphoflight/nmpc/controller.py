"""Receding-horizon wrapper: warm start, alpha cadence, failsafe."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..dynamics import NU, RobotParams, hover_input, model_frame
from ..errors import MorphoflightError
from .ocp import BlendContext, NlpIterate, OcpConfig, blend_alpha, transcribe
from .sqp import REAL_TIME, initial_iterate, sqp_iterate

log = logging.getLogger(__name__)


@dataclass
class Diagnostics:
    alpha: float = 1.0
    objective: float = float("nan")
    kkt_residual: float = float("nan")
    solve_time: float = 0.0
    failed: bool = False


@dataclass
class ControllerState:
    cycle: int = 0
    alpha: float = 1.0
    iterate: NlpIterate | None = None
    working_set: np.ndarray | None = None
    last_u: np.ndarray | None = None
    history: list = field(default_factory=list)


class NmpcController:
    """Blended-cost NMPC taking one real-time SQP iteration per call."""

    def __init__(self, params: RobotParams, cfg: OcpConfig | None = None,
                 blend: BlendContext | None = None, record: bool = False):
        self.params = params
        self.cfg = cfg or OcpConfig()
        self.blend = blend or BlendContext()
        self.record = record
        self.state = ControllerState()
        self._frame_phi = None
        self._frame = None

    def reset(self):
        self.state = ControllerState()

    def frame(self, phi: float) -> np.ndarray:
        if self._frame_phi != phi:
            self._frame = model_frame(phi, self.params)
            self._frame_phi = phi
        return self._frame

    def u_ref(self, phi: float) -> np.ndarray:
        if self.cfg.u_ref_mode == "zero":
            return np.zeros(NU)
        if self.cfg.u_ref_mode == "level":
            return hover_input(0.0, self.params)
        return hover_input(phi, self.params)

    def _warm_start(self, nlp):
        st = self.state
        if st.iterate is None:
            return initial_iterate(nlp), None
        U = np.vstack([st.iterate.U[1:], st.iterate.U[-1:]])
        X = np.vstack([st.iterate.X[1:], st.iterate.X[-1:]])
        ws = None
        if st.working_set is not None:
            ws = np.concatenate([st.working_set[NU:], st.working_set[-NU:]])
        return NlpIterate(X, U), ws

    def step(self, x_hat, x_ref, phi: float, z: float | None = None, u_ref=None,
             blend: BlendContext | None = None) -> np.ndarray:
        """Return the first input of the updated plan."""
        st = self.state
        t0 = time.perf_counter()
        x_hat = np.asarray(x_hat, float)
        if blend is not None:
            self.blend = blend
        if st.cycle % self.cfg.alpha_update_period == 0:
            st.alpha = blend_alpha(x_hat[2] if z is None else z, phi, self.blend)
        st.cycle += 1
        u_ref = self.u_ref(phi) if u_ref is None else np.asarray(u_ref, float)
        nlp = transcribe(x_hat, x_ref, u_ref, self.frame(phi), st.alpha, self.cfg)
        diag = Diagnostics(alpha=st.alpha)
        try:
            guess, ws = self._warm_start(nlp)
            it, info = sqp_iterate(nlp, guess, REAL_TIME, working_set=ws)
            if not np.all(np.isfinite(it.U)):
                raise FloatingPointError("non-finite plan")
            st.iterate = it
            st.working_set = info.working_set
            u = it.U[0].copy()
            diag.objective = info.objective
            diag.kkt_residual = info.kkt_stationarity
        except (MorphoflightError, FloatingPointError, np.linalg.LinAlgError) as exc:
            log.warning("NMPC solve failed (%s); holding previous input", exc)
            st.iterate = None
            st.working_set = None
            u = st.last_u.copy() if st.last_u is not None else u_ref.copy()
            diag.failed = True
        st.last_u = u
        diag.solve_time = time.perf_counter() - t0
        if self.record:
            st.history.append(diag)
        self.last_diagnostics = diag
        return u


def mpc_step(x_hat, refs, phi: float, z: float, controller: NmpcController) -> np.ndarray:
    """Functional form: ``refs`` is ``(x_ref, u_ref)``; ``u_ref`` may be None."""
    x_ref, u_ref = refs
    return controller.step(x_hat, x_ref, phi, z=z, u_ref=u_ref)
