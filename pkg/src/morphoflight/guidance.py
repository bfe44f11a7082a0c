"""Pilot-command references, flight/transition/ground supervision and the drive controller."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

FLIGHT = "flight"
TRANSITION = "transition"
GROUNDED = "grounded"

PHI_FLIGHT_MAX = math.radians(50.0)
PHI_TRANSITION_MAX = math.radians(70.0)
V_CMD_LIMIT = 1.0

# grounded-detection thresholds
CONTACT_MARGIN = 0.01  # m
CONTACT_VZ = 0.05  # m/s
RELEASE_HOLD = 0.05  # s

DRIVE_K_V = 1.0
DRIVE_K_THETA = 2.0
DRIVE_V_MAX = 1.0
DRIVE_OMEGA_MAX = 2.0


@dataclass(frozen=True)
class PilotCommand:
    v_cmd: tuple = (0.0, 0.0, 0.0)
    throttle: float = 0.0
    yaw_rate_cmd: float = 0.0

    def limited(self) -> "PilotCommand":
        v = tuple(float(np.clip(c, -V_CMD_LIMIT, V_CMD_LIMIT)) for c in self.v_cmd)
        return replace(self, v_cmd=v, throttle=float(np.clip(self.throttle, 0.0, 1.0)))


@dataclass(frozen=True)
class ModeState:
    mode: str = FLIGHT
    lam: int = 0
    phi_limit: float = PHI_FLIGHT_MAX
    release_timer: float = 0.0
    # set between a commanded liftoff and the pilot dropping the throttle below 50 %
    takeoff: bool = False

    @property
    def grounded(self) -> bool:
        return self.lam == 1


@dataclass
class DrivePose:
    x: float
    y: float
    heading: float
    R: float
    l: float

    def __post_init__(self):
        if self.R <= 0 or self.l <= 0:
            raise ValueError("wheel radius and half wheel base must be positive")


def position_reference(p, cmd: PilotCommand, T_s: float) -> np.ndarray:
    """p_ref = p + v*T_s with the velocity command limited to 1 m/s per axis."""
    if T_s <= 0:
        raise ValueError("T_s must be positive")
    v = np.asarray(cmd.limited().v_cmd, float)
    return np.asarray(p, float) + v * T_s


def state_reference(p, cmd: PilotCommand, T_s: float, yaw: float = 0.0) -> np.ndarray:
    """Full 12-state reference: position from the pilot law, velocity equal to the
    limited command, attitude (except held yaw) and body rates zero."""
    x_ref = np.zeros(12)
    x_ref[0:3] = position_reference(p, cmd, T_s)
    x_ref[3] = yaw
    x_ref[6:9] = cmd.limited().v_cmd
    return x_ref


def horizon_reference(p, cmd: PilotCommand, T_s: float, nodes: int, h: float,
                      yaw: float = 0.0) -> np.ndarray:
    """Per-node references (nodes, 12): the position target keeps moving at the
    commanded velocity along the horizon, p + v*(T_s + k*h)."""
    x_ref = np.tile(state_reference(p, cmd, T_s, yaw), (nodes, 1))
    v = np.asarray(cmd.limited().v_cmd, float)
    x_ref[:, 0:3] += np.arange(nodes)[:, None] * h * v
    return x_ref


def tilt_reference(z: float, c: float, lam: int, z_phi: float, v_max: float) -> float:
    if z < z_phi and lam == 0:
        return v_max
    if c >= 0.5 and lam == 1:
        return -v_max
    return 0.0


def _limit_for(mode: str) -> float:
    return PHI_FLIGHT_MAX if mode == FLIGHT else PHI_TRANSITION_MAX


def mode_update(x, z_g: float, ride_height: float, prev: ModeState, dt: float = 0.0,
                z_star: float = 0.45, throttle: float = 0.0, phi: float | None = None) -> ModeState:
    """Advance the contact state machine by ``dt`` seconds.

    ``z_g`` is the ground height under the robot and ``ride_height`` the CoM
    clearance when resting on the wheels; ``z_star`` is the transition height
    above ground. A grounded robot lifts off when the throttle reaches 50 %
    and the tilt is back within the flight limit.
    """
    z, vz = float(x[2]), float(x[8])
    near = z <= z_g + ride_height + CONTACT_MARGIN and abs(vz) < CONTACT_VZ

    if prev.mode == GROUNDED:
        if throttle >= 0.5 and phi is not None and phi <= PHI_FLIGHT_MAX + 1e-9:
            return ModeState(FLIGHT, 0, PHI_FLIGHT_MAX, 0.0, takeoff=True)
        if near:
            return replace(prev, release_timer=0.0)
        timer = prev.release_timer + dt
        if timer < RELEASE_HOLD:
            return replace(prev, release_timer=timer)
        mode = TRANSITION if z < z_g + z_star else FLIGHT
        return ModeState(mode, 0, _limit_for(mode), 0.0)

    takeoff = prev.takeoff and throttle >= 0.5
    if near and not takeoff:
        return ModeState(GROUNDED, 1, PHI_TRANSITION_MAX, 0.0)
    if takeoff:
        mode = FLIGHT
    elif z < z_g + z_star:
        mode = TRANSITION
    elif prev.mode == TRANSITION and z < z_g + z_star + CONTACT_MARGIN:
        mode = TRANSITION
    else:
        mode = FLIGHT
    return ModeState(mode, 0, _limit_for(mode), 0.0, takeoff=takeoff)


def actuator_switch(mode: ModeState, u_a, u_g):
    """Route thruster and wheel commands according to the contact state."""
    u_a = np.asarray(u_a, float)
    u_g = np.asarray(u_g, float)
    if mode.mode == GROUNDED:
        return np.zeros_like(u_a), u_g.copy()
    if mode.mode == TRANSITION:
        return u_a.copy(), u_g.copy()
    return u_a.copy(), np.zeros_like(u_g)


def wheel_speeds(V: float, omega: float, R: float, l: float) -> tuple[float, float]:
    """Left and right wheel rates (rad/s) for a body speed and yaw rate."""
    if R <= 0:
        raise ValueError("wheel radius must be positive")
    return (V + l * omega) / R, (V - l * omega) / R


def unicycle_rates(rate_l: float, rate_r: float, R: float, l: float) -> tuple[float, float]:
    return 0.5 * R * (rate_l + rate_r), R / (2.0 * l) * (rate_l - rate_r)


def _unicycle_rhs(s, V, omega):
    return np.array([V * math.cos(s[2]), V * math.sin(s[2]), omega])


def unicycle_step(pose: DrivePose, V: float, omega: float, dt: float) -> DrivePose:
    if dt <= 0:
        raise ValueError("dt must be positive")
    s = np.array([pose.x, pose.y, pose.heading])
    k1 = _unicycle_rhs(s, V, omega)
    k2 = _unicycle_rhs(s + 0.5 * dt * k1, V, omega)
    k3 = _unicycle_rhs(s + 0.5 * dt * k2, V, omega)
    k4 = _unicycle_rhs(s + dt * k3, V, omega)
    s = s + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return replace(pose, x=float(s[0]), y=float(s[1]), heading=float(s[2]))


def wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def drive_track(pose: DrivePose, p_ref, tol: float = 1e-3) -> tuple[float, float]:
    """Saturated proportional point tracking; turns in place when the target is behind."""
    dx = float(p_ref[0]) - pose.x
    dy = float(p_ref[1]) - pose.y
    dist = math.hypot(dx, dy)
    if dist < tol:
        return 0.0, 0.0
    bearing_err = wrap_angle(math.atan2(dy, dx) - pose.heading)
    omega = float(np.clip(DRIVE_K_THETA * bearing_err, -DRIVE_OMEGA_MAX, DRIVE_OMEGA_MAX))
    if abs(bearing_err) > 0.5 * math.pi:
        return 0.0, omega
    longitudinal = dx * math.cos(pose.heading) + dy * math.sin(pose.heading)
    V = float(np.clip(DRIVE_K_V * longitudinal, -DRIVE_V_MAX, DRIVE_V_MAX))
    return V, omega
