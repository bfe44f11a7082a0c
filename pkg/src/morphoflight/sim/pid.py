"""Cascaded PID baseline: position -> attitude -> body rate, with a flat-quadrotor mixer.

Tuning (done once at phi = 0 hover, then frozen): the rate loop was set
for roughly 25 rad/s bandwidth on the composite inertia and the attitude
loop a factor of four slower. The horizontal position loop was then scaled
(kp by s^2, kd by s, ki by s^3) until the peak excursion after a 1 N s
sideways push at phi = 0 matched the NMPC's ("retuned" weights) within
1 %, giving s = 0.42. Vertical gains are unscaled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..dynamics import RobotParams, composite_inertia, wrench_matrices


@dataclass(frozen=True)
class PidGains:
    kp_pos: tuple = (0.28, 0.28, 4.0)
    kd_pos: tuple = (0.84, 0.84, 3.5)
    ki_pos: tuple = (0.015, 0.015, 1.0)
    kp_att: tuple = (6.0, 6.0, 3.0)  # roll, pitch, yaw -> rate setpoint (1/s)
    kp_rate: tuple = (25.0, 25.0, 12.0)  # rate error -> angular acceleration (1/s)
    tilt_limit: float = math.radians(30.0)
    integral_limit: float = 2.0


@dataclass
class PidBaseline:
    """Stateful cascade; ``step`` is called at the control rate."""

    params: RobotParams
    gains: PidGains = field(default_factory=PidGains)
    dt: float = 1.0 / 150.0

    def __post_init__(self):
        # the mixer and inertia assume the flat (phi = 0) geometry regardless of the actual tilt
        F, T = wrench_matrices(0.0, self.params)
        self._mix = np.linalg.pinv(np.vstack([F[2], T]))
        self._J = composite_inertia(0.0, self.params)
        self.reset()

    def reset(self):
        self._integral = np.zeros(3)

    def step(self, x_hat, x_ref, phi: float = 0.0) -> np.ndarray:
        g = self.gains
        p = self.params
        x_hat = np.asarray(x_hat, float)
        x_ref = np.asarray(x_ref, float)
        e_p = x_ref[0:3] - x_hat[0:3]
        e_v = x_ref[6:9] - x_hat[6:9]
        self._integral = np.clip(self._integral + e_p * self.dt, -g.integral_limit, g.integral_limit)
        a = np.asarray(g.kp_pos) * e_p + np.asarray(g.kd_pos) * e_v + np.asarray(g.ki_pos) * self._integral

        yaw, pitch, roll = x_hat[3], x_hat[4], x_hat[5]
        cy, sy = math.cos(yaw), math.sin(yaw)
        # small-angle inversion of the thrust direction
        pitch_d = (a[0] * cy + a[1] * sy) / p.g
        roll_d = (a[0] * sy - a[1] * cy) / p.g
        pitch_d = float(np.clip(pitch_d, -g.tilt_limit, g.tilt_limit))
        roll_d = float(np.clip(roll_d, -g.tilt_limit, g.tilt_limit))
        thrust = p.mass * (p.g + a[2]) / max(math.cos(roll) * math.cos(pitch), 0.5)

        e_att = np.array([roll_d - roll, pitch_d - pitch, x_ref[3] - yaw])
        e_att[2] = (e_att[2] + math.pi) % (2 * math.pi) - math.pi
        rate_d = np.asarray(g.kp_att) * e_att
        torque = self._J @ (np.asarray(g.kp_rate) * (rate_d - x_hat[9:12]))

        u = self._mix @ np.concatenate([[thrust], torque])
        return np.clip(u, 0.0, 1.0)


def pid_baseline_step(x_hat, refs, phi: float, controller: PidBaseline) -> np.ndarray:
    """Functional form matching ``mpc_step``; ``refs`` is ``(x_ref, _)``."""
    x_ref = refs[0] if isinstance(refs, tuple) else refs
    return controller.step(x_hat, x_ref, phi)
