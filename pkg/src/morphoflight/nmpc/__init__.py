from .controller import ControllerState, Diagnostics, NmpcController, mpc_step
from .ocp import (
    PRESETS,
    BlendContext,
    NlpIterate,
    OcpConfig,
    ShootingNlp,
    blend_alpha,
    blended_weights,
    stage_cost,
    transcribe,
)
from .qp import QpResult, kkt_residual, qp_solve
from .sqp import CONVERGE, REAL_TIME, condense, initial_iterate, sqp_iterate

__all__ = [
    "PRESETS",
    "BlendContext",
    "ControllerState",
    "CONVERGE",
    "Diagnostics",
    "NlpIterate",
    "NmpcController",
    "OcpConfig",
    "QpResult",
    "REAL_TIME",
    "ShootingNlp",
    "blend_alpha",
    "blended_weights",
    "condense",
    "initial_iterate",
    "kkt_residual",
    "mpc_step",
    "qp_solve",
    "sqp_iterate",
    "stage_cost",
    "transcribe",
]
