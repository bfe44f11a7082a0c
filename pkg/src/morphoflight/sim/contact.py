"""Wheel/body contact against a planar (possibly inclined) surface."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dynamics import RobotParams, base_corners, euler_to_rotation, rotation_to_euler, wheel_rings

AIRBORNE = "airborne"
TOUCHDOWN = "touchdown"
TIPOVER = "tipover"

TIPOVER_ANGLE = math.radians(15.0)


@dataclass(frozen=True)
class Surface:
    """Plane through ``point`` rising at ``slope`` (rad) along world +x."""

    slope: float = 0.0
    z_g: float = 0.0
    x0: float = 0.0

    @property
    def normal(self) -> np.ndarray:
        return np.array([-math.sin(self.slope), 0.0, math.cos(self.slope)])

    @property
    def point(self) -> np.ndarray:
        return np.array([self.x0, 0.0, self.z_g])

    def height(self, x: float) -> float:
        return self.z_g + math.tan(self.slope) * (x - self.x0)

    def distance(self, p) -> float:
        """Signed distance of a world point above the plane along its normal."""
        return float((np.asarray(p, float) - self.point) @ self.normal)


@dataclass
class TouchdownMetrics:
    phi_g: float  # deg
    impact_speed: float  # m/s, downward vertical
    roll: float  # deg
    pitch: float  # deg
    max_mean_thrust: float = float("nan")
    lateral_drift: float = float("nan")
    t: float = float("nan")


@dataclass
class ContactResult:
    kind: str
    reason: str = ""
    wheel_clearance: float = float("nan")
    body_clearance: float = float("nan")
    metrics: TouchdownMetrics | None = None


def _ring_low(hubs_w, axes_w, n, R):
    s = np.sqrt(np.clip(1.0 - (axes_w @ n) ** 2, 0.0, 1.0))
    return hubs_w @ n - R * s


def clearances(x, phi: float, surface: Surface, params: RobotParams) -> tuple[float, float]:
    """(lowest wheel point, lowest base corner) distances above the surface."""
    Rb = euler_to_rotation(np.asarray(x[3:6], float))
    p = np.asarray(x[0:3], float)
    hubs, axes = wheel_rings(phi, params)
    n = surface.normal
    off = p @ n - surface.point @ n
    wheel = float(np.min(_ring_low(hubs @ Rb.T, axes @ Rb.T, n, params.wheel_radius))) + off
    body = float(np.min(base_corners(phi, params) @ Rb.T @ n)) + off
    return wheel, body


def min_wheel_first_tilt(slope: float, params: RobotParams, tol: float = 1e-6) -> float:
    """Smallest tilt for which a level robot touches the slope wheels-first.

    Returns ``pi/2`` when no tilt achieves it.
    """
    surf = Surface(slope)
    x = np.zeros(12)

    def margin(phi):
        w, b = clearances(x, phi, surf, params)
        return b - w  # > 0 when the wheels are lower

    lo, hi = 0.0, 0.5 * math.pi
    if margin(lo) > 0:
        return 0.0
    if margin(hi) <= 0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if margin(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def contact_resolve(x, phi: float, surface: Surface, params: RobotParams) -> ContactResult:
    """Classify the configuration against the surface.

    Tilt of the body is judged against gravity (world roll/pitch) so a level
    robot may land on an incline it can drive on.
    """
    x = np.asarray(x, float)
    wheel, body = clearances(x, phi, surface, params)
    if wheel > 0.0 and body > 0.0:
        return ContactResult(AIRBORNE, "", wheel, body)
    roll, pitch = float(x[5]), float(x[4])
    if body <= 0.0 and body < wheel:
        return ContactResult(TIPOVER, "body_strike", wheel, body)
    if max(abs(roll), abs(pitch)) > TIPOVER_ANGLE:
        return ContactResult(TIPOVER, "attitude", wheel, body)
    m = TouchdownMetrics(
        phi_g=math.degrees(phi),
        impact_speed=max(0.0, -float(x[8])),
        roll=math.degrees(roll),
        pitch=math.degrees(pitch),
    )
    return ContactResult(TOUCHDOWN, "wheels", wheel, body, m)


def resting_pose(p, heading: float, phi: float, surface: Surface, params: RobotParams):
    """CoM position and zyx Euler angles of the robot resting on its wheels.

    The body z axis aligns with the surface normal and body x with the
    heading projected into the plane; ``p`` supplies the horizontal position.
    """
    n = surface.normal
    h = np.array([math.cos(heading), math.sin(heading), 0.0])
    bx = h - (h @ n) * n
    bx /= np.linalg.norm(bx)
    by = np.cross(n, bx)
    Rb = np.column_stack([bx, by, n])
    euler = rotation_to_euler(Rb)
    hubs, axes = wheel_rings(phi, params)
    low = float(np.min(_ring_low(hubs @ Rb.T, axes @ Rb.T, n, params.wheel_radius)))
    # ring low point is at -clearance relative to the CoM; lift the CoM so it touches
    pos = np.array([p[0], p[1], surface.height(p[0])], float) - low * n
    # keep the horizontal position of the CoM fixed
    pos[2] += math.tan(surface.slope) * (p[0] - pos[0])
    pos[0] = p[0]
    return pos, euler
