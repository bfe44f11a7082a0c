"""Closed-chain tilt linkage: encoder count <-> screw displacement <-> tilt angle.

Lengths are centimeters, angles radians. The linkage closes as

    Dx = h + d1*cos(theta) + d2*cos(phi)
    Dy = x + d1*sin(theta) - d2*sin(phi)

with ``x`` the displacement of the driven joint along its guide. The
operating branch runs from the drone configuration (phi = 0) to the full
drive posture (phi = pi/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleDisplacement, NonConvergence

HALF_PI = 0.5 * math.pi
_NEWTON_TOL = 1e-13
_NEWTON_MAX_ITER = 50
_RANGE_TOL = 1e-9  # cm


@dataclass(frozen=True)
class LinkageGeometry:
    h: float = 1.6
    d1: float = 5.2
    d2: float = 4.6
    Dx: float = 6.8
    Dy: float = 5.1
    pitch: float = 0.8
    counts_per_rev: float = 1632.67
    x_zero: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.h <= 0 or self.d1 <= 0:
            raise ValueError("link lengths must be positive")
        # d2 == 0 is accepted as a degenerate single-link chain
        if self.d2 < 0:
            raise ValueError("d2 must be non-negative")
        if self.pitch <= 0 or self.counts_per_rev <= 0:
            raise ValueError("pitch and counts_per_rev must be positive")
        x0 = solve_inverse(0.0, self) if self.d2 > 0 else math.nan
        object.__setattr__(self, "x_zero", x0)

    @property
    def slack(self) -> float:
        """d1 + h - Dx, snapped to 0 when the decimal inputs cancel up to rounding."""
        s = self.d1 + self.h - self.Dx
        return 0.0 if abs(s) < 1e-12 * (self.d1 + self.h + self.Dx) else s

    @property
    def displacement_range(self) -> tuple[float, float]:
        return solve_inverse(0.0, self), solve_inverse(HALF_PI, self)


@dataclass(frozen=True)
class MechanismState:
    encoder_count: int
    displacement_x: float
    internal_theta: float
    tilt_phi: float


def closure_residual(x: float, theta: float, phi: float, geom: LinkageGeometry) -> np.ndarray:
    return np.array(
        [
            geom.h + geom.d1 * math.cos(theta) + geom.d2 * math.cos(phi) - geom.Dx,
            x + geom.d1 * math.sin(theta) - geom.d2 * math.sin(phi) - geom.Dy,
        ]
    )


def _theta_on_branch(phi: float, geom: LinkageGeometry) -> float:
    # 1 - cos(theta) evaluated directly keeps precision near theta = 0, where theta
    # grows like sqrt(cos(phi)); cos(pi/2) is taken as exactly 0 via sin(pi/2 - phi)
    one_minus_c = (geom.slack + geom.d2 * math.sin(HALF_PI - phi)) / geom.d1
    c = 1.0 - one_minus_c
    if c > 1.0 + 1e-14 or c < -1.0 - 1e-14:
        raise InfeasibleDisplacement(f"linkage cannot close at phi={phi!r} rad")
    s2 = max(one_minus_c * (2.0 - one_minus_c), 0.0)
    return math.atan2(math.sqrt(s2), c)


def _x_of_phi(phi: float, geom: LinkageGeometry) -> float:
    theta = _theta_on_branch(phi, geom)
    return geom.Dy - geom.d1 * math.sin(theta) + geom.d2 * math.sin(phi)


def solve_inverse(phi: float, geom: LinkageGeometry) -> float:
    """Displacement ``x`` (cm) that places the linkage at tilt ``phi``."""
    if not (-1e-12 <= phi <= HALF_PI + 1e-12):
        raise ValueError(f"phi={phi!r} outside [0, pi/2]")
    return _x_of_phi(min(max(phi, 0.0), HALF_PI), geom)


def _newton(x, theta, phi, geom):
    d1, d2 = geom.d1, geom.d2
    for _ in range(_NEWTON_MAX_ITER):
        r = closure_residual(x, theta, phi, geom)
        if abs(r[0]) < _NEWTON_TOL and abs(r[1]) < _NEWTON_TOL:
            return theta, phi
        st, ct = math.sin(theta), math.cos(theta)
        sp, cp = math.sin(phi), math.cos(phi)
        det = d1 * d2 * (st * cp + ct * sp)
        if abs(det) < 1e-14:
            break
        # J = [[-d1 st, -d2 sp], [d1 ct, -d2 cp]]
        dtheta = (-d2 * cp * r[0] + d2 * sp * r[1]) / det
        dphi = (-d1 * ct * r[0] - d1 * st * r[1]) / det
        theta -= dtheta
        phi -= dphi
    raise NonConvergence("closure Newton iteration did not converge")


def _bisect_phi(x, geom):
    lo, hi = 0.0, HALF_PI
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _x_of_phi(mid, geom) < x:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    return 0.5 * (lo + hi)


def solve_forward(x: float, geom: LinkageGeometry, seed: tuple[float, float] | None = None):
    """Return ``(theta, phi)`` for displacement ``x`` (cm) on the operating branch.

    ``seed`` is a previous ``(theta, phi)`` solution; Newton starts there and
    falls back to bisection along the branch if it wanders off.
    """
    bx = geom.Dx - geom.h
    by = geom.Dy - x
    dist = math.hypot(bx, by)
    if dist > geom.d1 + geom.d2 + 1e-12 or dist < abs(geom.d1 - geom.d2) - 1e-12:
        raise InfeasibleDisplacement(f"no real closure for x={x!r} cm")
    if geom.d2 == 0.0:
        return math.atan2(by, bx), 0.0

    x_lo = _x_of_phi(0.0, geom)
    x_hi = _x_of_phi(HALF_PI, geom)
    if x < x_lo - _RANGE_TOL or x > x_hi + _RANGE_TOL:
        raise InfeasibleDisplacement(
            f"x={x!r} cm outside operating range [{x_lo:.6f}, {x_hi:.6f}]"
        )
    x = min(max(x, x_lo), x_hi)

    if seed is not None:
        try:
            theta, phi = _newton(x, seed[0], seed[1], geom)
            if 0.0 <= phi <= HALF_PI and 0.0 <= theta <= math.pi:
                return theta, phi
        except NonConvergence:
            pass

    phi = _bisect_phi(x, geom)
    theta = _theta_on_branch(phi, geom)
    try:
        theta, phi = _newton(x, theta, phi, geom)
    except NonConvergence:
        # the bracket solution is already at machine precision; keep it if it closes
        r = closure_residual(x, theta, phi, geom)
        if np.max(np.abs(r)) > 1e-10:
            raise
    return theta, min(max(phi, 0.0), HALF_PI)


def encoder_to_displacement(count: float, geom: LinkageGeometry) -> float:
    return geom.x_zero + geom.pitch * count / geom.counts_per_rev


def displacement_to_encoder(x: float, geom: LinkageGeometry) -> float:
    return (x - geom.x_zero) * geom.counts_per_rev / geom.pitch


def encoder_to_tilt(count: float, geom: LinkageGeometry) -> float:
    return solve_forward(encoder_to_displacement(count, geom), geom)[1]


def tilt_to_encoder(phi: float, geom: LinkageGeometry) -> int:
    return int(round(displacement_to_encoder(solve_inverse(phi, geom), geom)))


def mechanism_state(count: int, geom: LinkageGeometry) -> MechanismState:
    x = encoder_to_displacement(count, geom)
    theta, phi = solve_forward(x, geom)
    return MechanismState(int(count), x, theta, phi)


def tilt_integrate(phi: float, v: float, dt: float, phi_limit: float) -> float:
    """Advance the rate-commanded tilt by one Euler step, clamped to [0, phi_limit]."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return min(max(phi + v * dt, 0.0), phi_limit)
