"""Rigid-body model of the tilting-arm quadrotor.

Body frame: x forward, y left, z up. Rotors are numbered front-left,
rear-left, rear-right, front-right. Each side arm hinges about an axis
parallel to body x; at tilt ``phi`` the arm swings down and the rotor axes
lean inward so the jets converge beneath the body.

State layout (12): position (world), zyx Euler angles (theta_z, theta_y,
theta_x), velocity (world), body angular rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import EulerSingularity, InfeasibleMargin, NoCriticalAngle
from .kinematics import LinkageGeometry

NX = 12
NU = 4
SINGULAR_PITCH = math.radians(89.0)
# commonly quoted rounded critical angle for T/W 2.1; critical_angle() gives arccos(1/2.1)
CRITICAL_ANGLE_ROUNDED_DEG = 60.0

# rotor layout: (fore/aft sign, side sign); side +1 is the left arm
ROTOR_LAYOUT = ((1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0))


@dataclass(frozen=True)
class Component:
    name: str
    mass: float
    shape: str  # "box" (dims = full extents) or "disk" (dims = radius, thickness)
    dims: tuple
    center: np.ndarray  # body frame, base reference point at origin
    rotation: np.ndarray  # local -> body


@dataclass(frozen=True)
class RobotParams:
    """Physical parameters.

    Rotor geometry, component masses and ``k_M`` are estimates chosen to
    match the 5.5 kg, 65 cm wide, 16 cm tall flight envelope with a
    2.1 thrust-to-weight ratio.
    """

    g: float = 9.81
    thrust_to_weight: float = 2.1
    k_T: float | None = None  # N per unit command; derived from thrust_to_weight when None
    k_M: float = 0.016
    # base box (full extents, m)
    base_mass: float = 3.1
    base_dims: tuple = (0.24, 0.12, 0.16)
    # arms: each carries two wheel-thrusters; wheels are folded into the arm mass
    arm_mass: float = 1.1
    arm_thickness: float = 0.03
    hinge_y: float = 0.06
    hinge_z: float = 0.02
    arm_length: float = 0.175  # hinge to rotor hub
    rotor_x: float = 0.12
    wheel_radius: float = 0.09
    prop_mass: float = 0.05
    prop_radius: float = 0.075
    prop_thickness: float = 0.01
    rotor_spin_signs: tuple = (1.0, -1.0, 1.0, -1.0)
    tilt_sign_left: float = -1.0
    tilt_sign_right: float = 1.0
    linkage: LinkageGeometry = field(default_factory=LinkageGeometry)

    def __post_init__(self):
        if self.k_T is None:
            object.__setattr__(self, "k_T", self.mass * self.g * self.thrust_to_weight / 4.0)
        else:
            object.__setattr__(self, "thrust_to_weight", 4.0 * self.k_T / (self.mass * self.g))
        if self.mass <= 0 or self.k_T <= 0:
            raise ValueError("mass and k_T must be positive")
        if abs(sum(self.rotor_spin_signs)) > 1e-12:
            raise ValueError("rotor spin signs must cancel (two CW, two CCW)")

    @property
    def mass(self) -> float:
        return self.base_mass + 2 * self.arm_mass + 4 * self.prop_mass

    @property
    def T_max(self) -> float:
        return 4.0 * self.k_T

    def with_(self, **changes) -> "RobotParams":
        if "thrust_to_weight" in changes and "k_T" not in changes:
            changes["k_T"] = None
        return replace(self, **changes)


def rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def euler_to_rotation(theta: np.ndarray) -> np.ndarray:
    """Body-to-world rotation for zyx Euler angles ordered (theta_z, theta_y, theta_x)."""
    return _kernels.rotation_zyx(theta[0], theta[1], theta[2])


def rotation_to_euler(R: np.ndarray) -> np.ndarray:
    return np.array(
        [
            math.atan2(R[1, 0], R[0, 0]),
            -math.asin(max(-1.0, min(1.0, R[2, 0]))),
            math.atan2(R[2, 1], R[2, 2]),
        ]
    )


def _side_angle(side: float, params: RobotParams, phi: float) -> float:
    return (params.tilt_sign_left if side > 0 else params.tilt_sign_right) * phi


def components(phi: float, params: RobotParams) -> list[Component]:
    """The seven inertial components posed at tilt ``phi``."""
    out = [
        Component("base", params.base_mass, "box", tuple(params.base_dims), np.zeros(3), np.eye(3))
    ]
    reach = params.arm_length + params.wheel_radius
    for side, name in ((1.0, "arm_left"), (-1.0, "arm_right")):
        R = rot_x(_side_angle(side, params, phi))
        hinge = np.array([0.0, side * params.hinge_y, params.hinge_z])
        center = hinge + R @ np.array([0.0, side * reach / 2.0, 0.0])
        dims = (2.0 * (params.rotor_x + params.wheel_radius), reach, params.arm_thickness)
        out.append(Component(name, params.arm_mass, "box", dims, center, R))
    for i, (fx, side) in enumerate(ROTOR_LAYOUT):
        R = rot_x(_side_angle(side, params, phi))
        hinge = np.array([0.0, side * params.hinge_y, params.hinge_z])
        center = hinge + R @ np.array([fx * params.rotor_x, side * params.arm_length, 0.0])
        out.append(
            Component(
                f"prop{i + 1}",
                params.prop_mass,
                "disk",
                (params.prop_radius, params.prop_thickness),
                center,
                R,
            )
        )
    return out


def _local_inertia(c: Component) -> np.ndarray:
    m = c.mass
    if c.shape == "box":
        a, b, h = c.dims
        return np.diag([m * (b * b + h * h), m * (a * a + h * h), m * (a * a + b * b)]) / 12.0
    r, t = c.dims
    ixx = m * (3 * r * r + t * t) / 12.0
    return np.diag([ixx, ixx, 0.5 * m * r * r])


def center_of_mass(phi: float, params: RobotParams) -> np.ndarray:
    comps = components(phi, params)
    return sum(c.mass * c.center for c in comps) / sum(c.mass for c in comps)


def composite_inertia(phi: float, params: RobotParams) -> np.ndarray:
    """Inertia tensor (kg m^2) about the composite center of mass, body axes."""
    comps = components(phi, params)
    com = sum(c.mass * c.center for c in comps) / sum(c.mass for c in comps)
    J = np.zeros((3, 3))
    for c in comps:
        r = c.center - com
        J += c.rotation @ _local_inertia(c) @ c.rotation.T
        J += c.mass * (np.dot(r, r) * np.eye(3) - np.outer(r, r))
    return 0.5 * (J + J.T)


def rotor_geometry(phi: float, params: RobotParams) -> tuple[np.ndarray, np.ndarray]:
    """Rotor hub positions relative to the CoM and unit thrust axes, both (4, 3)."""
    com = center_of_mass(phi, params)
    pos = np.empty((4, 3))
    axes = np.empty((4, 3))
    for i, (fx, side) in enumerate(ROTOR_LAYOUT):
        R = rot_x(_side_angle(side, params, phi))
        hinge = np.array([0.0, side * params.hinge_y, params.hinge_z])
        pos[i] = hinge + R @ np.array([fx * params.rotor_x, side * params.arm_length, 0.0]) - com
        axes[i] = R[:, 2]
    return pos, axes


def wrench_matrices(phi: float, params: RobotParams) -> tuple[np.ndarray, np.ndarray]:
    """Force and torque per unit command, each (3, 4), excluding ground effect."""
    pos, axes = rotor_geometry(phi, params)
    spin = np.asarray(params.rotor_spin_signs, dtype=float)
    F = params.k_T * axes.T
    T = params.k_T * (np.cross(pos, axes) + (spin * params.k_M)[:, None] * axes).T
    return F, T


def thrust_wrench(u, phi: float, params: RobotParams, ge_ratio: float = 1.0):
    """Body-frame force (N) and torque about the CoM (N m) for rotor commands ``u``."""
    F, T = wrench_matrices(phi, params)
    u = np.asarray(u, dtype=float)
    return ge_ratio * F @ u, ge_ratio * T @ u


def model_frame(phi: float, params: RobotParams) -> np.ndarray:
    """Flat constant block consumed by the compiled kernels for a fixed tilt."""
    F, T = wrench_matrices(phi, params)
    J = composite_inertia(phi, params)
    return np.concatenate(
        [[params.mass, params.g], F.ravel(), T.ravel(), J.ravel(), np.linalg.inv(J).ravel()]
    )


def _check_state(x):
    if abs(x[4]) >= SINGULAR_PITCH:
        raise EulerSingularity(f"|theta_y| = {math.degrees(abs(x[4])):.2f} deg")


def eom(x, u, phi: float, params: RobotParams, ge_ratio: float = 1.0, frame=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    _check_state(x)
    if frame is None:
        frame = model_frame(phi, params)
    return _kernels.eom(x, np.asarray(u, dtype=float), frame, float(ge_ratio))


def rk4_step(x, u, phi: float, dt: float, params: RobotParams, ge_ratio: float = 1.0, frame=None):
    if not 0.0 < dt <= 0.01:
        raise ValueError(f"dt={dt!r} outside (0, 0.01]")
    x = np.asarray(x, dtype=float)
    _check_state(x)
    if frame is None:
        frame = model_frame(phi, params)
    out = _kernels.rk4(x, np.asarray(u, dtype=float), frame, float(ge_ratio), dt)
    _check_state(out)
    return out


def linearize(x, u, phi: float, params: RobotParams, ge_ratio: float = 1.0):
    """Central-difference Jacobians ``(A, B)`` of the continuous dynamics."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    frame = model_frame(phi, params)
    h = 1e-6
    A = np.empty((NX, NX))
    B = np.empty((NX, NU))
    for j in range(NX):
        e = np.zeros(NX)
        e[j] = h
        A[:, j] = (_kernels.eom(x + e, u, frame, ge_ratio) - _kernels.eom(x - e, u, frame, ge_ratio)) / (2 * h)
    for j in range(NU):
        e = np.zeros(NU)
        e[j] = h
        B[:, j] = (_kernels.eom(x, u + e, frame, ge_ratio) - _kernels.eom(x, u - e, frame, ge_ratio)) / (2 * h)
    return A, B


def hover_input(phi: float, params: RobotParams) -> np.ndarray:
    """Equal rotor commands whose vertical thrust equals weight, clipped to [0, 1]."""
    c = params.mass * params.g / (params.T_max * max(math.cos(phi), 1e-9))
    return np.full(NU, min(c, 1.0))


def critical_angle(params: RobotParams) -> float:
    tw = params.T_max / (params.mass * params.g)
    if tw < 1.0:
        raise NoCriticalAngle(f"thrust-to-weight {tw:.3f} < 1")
    return math.acos(min(1.0, 1.0 / tw))


def max_flight_tilt(params: RobotParams, margin: float) -> float:
    tw = params.T_max / (params.mass * params.g)
    if margin < 1.0:
        raise ValueError("margin must be >= 1")
    if margin > tw + 1e-12:
        raise InfeasibleMargin(f"margin {margin} exceeds thrust-to-weight {tw:.3f}")
    return math.acos(min(1.0, margin / tw))


def mechanical_energy(x, phi: float, params: RobotParams) -> float:
    J = composite_inertia(phi, params)
    v, w = x[6:9], x[9:12]
    return 0.5 * params.mass * v @ v + 0.5 * w @ J @ w + params.mass * params.g * x[2]


def mirror_state(x) -> np.ndarray:
    """Reflect a state through the body x-z plane (y -> -y)."""
    x = np.asarray(x, dtype=float)
    return x * np.array([1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1, -1], dtype=float)


def mirror_input(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return u[[3, 2, 1, 0]]


# ---------------------------------------------------------------- geometry for contact

def base_corners(phi: float, params: RobotParams) -> np.ndarray:
    """Eight corners of the base box relative to the CoM, (8, 3)."""
    a, b, c = (0.5 * d for d in params.base_dims)
    corners = np.array([[sx * a, sy * b, sz * c] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)])
    return corners - center_of_mass(phi, params)


def wheel_rings(phi: float, params: RobotParams) -> tuple[np.ndarray, np.ndarray]:
    """Wheel hub centers (relative to CoM) and wheel axes; a wheel is the ring of
    radius ``wheel_radius`` about each rotor hub, normal to its thrust axis."""
    return rotor_geometry(phi, params)


def ride_height(phi: float, params: RobotParams) -> float:
    """CoM height above flat ground when resting level on the wheels."""
    pos, axes = wheel_rings(phi, params)
    n = np.array([0.0, 0.0, 1.0])
    low = np.min(pos @ n - params.wheel_radius * np.sqrt(np.clip(1.0 - (axes @ n) ** 2, 0.0, 1.0)))
    return -low


def half_wheel_base(phi: float, params: RobotParams) -> float:
    """Lateral offset of the wheel contact points from the centerline."""
    pos, axes = wheel_rings(phi, params)
    n = np.array([0.0, 0.0, 1.0])
    # lowest ring point: hub - R * normalized projection of n onto the ring plane
    i = 0
    proj = n - (axes[i] @ n) * axes[i]
    nrm = np.linalg.norm(proj)
    if nrm < 1e-9:
        return abs(pos[i, 1]) + params.wheel_radius
    return abs(pos[i, 1] - params.wheel_radius * proj[1] / nrm)
