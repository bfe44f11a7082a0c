"""Closed-loop scenario engine."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .. import guidance as gd
from ..dynamics import (
    RobotParams,
    euler_to_rotation,
    half_wheel_base,
    model_frame,
    ride_height,
    rk4_step,
    rotor_geometry,
)
from ..errors import EulerSingularity, SimDiverged
from ..ground_effect import GroundEffectTable, load_table, sample_ratio, thrust_ratio
from ..kinematics import tilt_integrate
from ..nmpc.controller import NmpcController
from ..nmpc.ocp import BlendContext, OcpConfig, blend_alpha
from .contact import AIRBORNE, TIPOVER, TOUCHDOWN, Surface, TouchdownMetrics, contact_resolve, min_wheel_first_tilt, resting_pose
from .pid import PidBaseline, PidGains
from .scenario import Scenario

log = logging.getLogger(__name__)

NMPC = "nmpc"
PID = "pid"

STATE_NAMES = (
    "x", "y", "z", "theta_z", "theta_y", "theta_x",
    "v_x", "v_y", "v_z", "omega_x", "omega_y", "omega_z",
)
CSV_COLUMNS = ("t", *STATE_NAMES, "phi", "alpha", "u1", "u2", "u3", "u4", "wheel_l", "wheel_r", "mode", "ge_ratio")


@dataclass
class Event:
    t: float
    kind: str  # "mode", "touchdown", "liftoff", "tipover"
    detail: str = ""


@dataclass
class SimLog:
    t: np.ndarray
    x: np.ndarray  # (n, 12)
    phi: np.ndarray
    alpha: np.ndarray
    u_a: np.ndarray  # (n, 4)
    u_g: np.ndarray  # (n, 2) wheel rates, rad/s
    mode: np.ndarray  # (n,) str
    ge_ratio: np.ndarray
    events: list = field(default_factory=list)
    touchdown: TouchdownMetrics | None = None
    tipover: str | None = None
    info: dict = field(default_factory=dict)
    v_cmd: np.ndarray | None = None  # (n, 3) limited pilot velocity, not persisted

    @property
    def mean_thrust(self) -> np.ndarray:
        return self.u_a.mean(axis=1)

    def mode_sequence(self) -> list[str]:
        seq = []
        for m in self.mode:
            if not seq or seq[-1] != m:
                seq.append(str(m))
        return seq

    def rows(self):
        for i in range(self.t.size):
            yield (
                self.t[i], *self.x[i], self.phi[i], self.alpha[i], *self.u_a[i], *self.u_g[i],
                self.mode[i], self.ge_ratio[i],
            )

    def equals(self, other: "SimLog") -> bool:
        return (
            np.array_equal(self.t, other.t)
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.phi, other.phi)
            and np.array_equal(self.alpha, other.alpha)
            and np.array_equal(self.u_a, other.u_a)
            and np.array_equal(self.u_g, other.u_g)
            and np.array_equal(self.mode, other.mode)
            and np.array_equal(self.ge_ratio, other.ge_ratio)
        )


class _Recorder:
    def __init__(self):
        self.cols = {k: [] for k in ("t", "x", "phi", "alpha", "u_a", "u_g", "mode", "ge", "v_cmd")}

    def add(self, t, x, phi, alpha, u_a, u_g, mode, ge, v_cmd):
        c = self.cols
        c["v_cmd"].append(np.array(v_cmd, float))
        c["t"].append(t)
        c["x"].append(np.array(x, float))
        c["phi"].append(phi)
        c["alpha"].append(alpha)
        c["u_a"].append(np.array(u_a, float))
        c["u_g"].append(np.array(u_g, float))
        c["mode"].append(mode)
        c["ge"].append(ge)

    def build(self, **kw) -> SimLog:
        c = self.cols
        return SimLog(
            t=np.asarray(c["t"], float),
            x=np.asarray(c["x"], float).reshape(-1, 12),
            phi=np.asarray(c["phi"], float),
            alpha=np.asarray(c["alpha"], float),
            u_a=np.asarray(c["u_a"], float).reshape(-1, 4),
            u_g=np.asarray(c["u_g"], float).reshape(-1, 2),
            mode=np.asarray(c["mode"], dtype=object),
            ge_ratio=np.asarray(c["ge"], float),
            v_cmd=np.asarray(c["v_cmd"], float).reshape(-1, 3),
            **kw,
        )


def _disturbance_wrench(scn: Scenario, t: float, Rb: np.ndarray):
    """World-frame force and body-frame torque active at time ``t``."""
    f = np.zeros(3)
    tau = np.zeros(3)
    for d in scn.disturbances:
        if d.t <= t < d.t + d.duration:
            force = np.asarray(d.force, float)
            torque = np.asarray(d.torque, float)
            if d.frame == "body":
                f += Rb @ force
                tau += torque
            else:
                f += force
                tau += Rb.T @ torque
    return f, tau


def _surface_frame(x, surface: Surface):
    """State rewritten relative to the surface: height and vertical speed along the normal."""
    xs = np.array(x, float)
    xs[2] = surface.distance(x[0:3])
    xs[8] = float(np.asarray(x[6:9]) @ surface.normal)
    return xs


def _rotor_height(x, phi, surface: Surface, params: RobotParams) -> float:
    """Mean rotor-hub distance to the surface along its normal."""
    pos, _ = rotor_geometry(phi, params)
    Rb = euler_to_rotation(np.asarray(x[3:6], float))
    hubs = np.asarray(x[0:3], float) + pos @ Rb.T
    return float(np.mean((hubs - surface.point) @ surface.normal))


def run(scenario: Scenario, controller: str = NMPC, params: RobotParams | None = None,
        table: GroundEffectTable | None = None, preset: str | None = None,
        ocp: OcpConfig | None = None, pid_gains: PidGains | None = None) -> SimLog:
    """Simulate ``scenario`` in closed loop and return the control-rate log."""
    params = params or RobotParams()
    if controller not in (NMPC, PID):
        raise ValueError(f"controller must be {NMPC!r} or {PID!r}")
    scn = scenario
    if scn.ground_effect and table is None:
        table = load_table()
    rng = np.random.default_rng(scn.seed)
    surface = Surface(math.radians(scn.slope_deg), scn.z_g, scn.slope_x0)
    T_s = scn.control_period
    dt = scn.physics_dt
    n_sub = scn.substeps
    phi_cap = math.radians(scn.phi_cap_transition_deg)
    v_max = scn.tilt_rate

    cfg = ocp or OcpConfig.from_preset(preset or scn.preset, control_rate=scn.control_rate,
                                       u_ref_mode=scn.u_ref_mode)
    nmpc = NmpcController(params, cfg, record=True) if controller == NMPC else None
    pid = PidBaseline(params, pid_gains or PidGains(), dt=T_s) if controller == PID else None

    x = scn.initial_state()
    phi = math.radians(scn.phi0_deg)
    on_ground = scn.start_grounded
    yaw_hold = float(x[3])
    hold = np.asarray(scn.hold_position if scn.hold_position is not None else x[0:3], float)

    if on_ground:
        pos, euler = resting_pose(x[0:3], yaw_hold, phi, surface, params)
        x[0:3], x[3:6], x[6:12] = pos, euler, 0.0
        mode = gd.ModeState(gd.GROUNDED, 1, phi_cap, 0.0)
    else:
        m0 = gd.FLIGHT if surface.distance(x[0:3]) >= scn.z_star else gd.TRANSITION
        mode = gd.ModeState(m0, 0, gd.PHI_FLIGHT_MAX if m0 == gd.FLIGHT else phi_cap, 0.0)
    heading = float(x[3])

    rec = _Recorder()
    events = [Event(0.0, "mode", mode.mode)]
    touchdown = None
    tipover = None
    t_ground = None
    carrot = np.array(x[0:2]) if on_ground else None
    u_a = np.zeros(4)
    u_g = np.zeros(2)
    alpha = 1.0
    ge = 1.0
    n_ticks = int(math.floor(scn.duration / T_s + 1e-9))
    frame_phi = None
    frame = None
    distance_driven = 0.0
    nmpc_failures = 0
    phi_ground_min = min_wheel_first_tilt(surface.slope, params)

    for k in range(n_ticks + 1):
        t = k * T_s
        if not np.all(np.isfinite(x)):
            raise SimDiverged(f"non-finite state at t={t:.3f}s")
        cmd = scn.pilot_at(t).limited()
        x_meas = x.copy()
        if scn.measurement_noise > 0:
            x_meas[0:3] += rng.normal(0.0, scn.measurement_noise, 3)
        xs = _surface_frame(x_meas, surface)
        prev_mode = mode.mode
        mode = gd.mode_update(xs, 0.0, ride_height(phi, params), mode, T_s, scn.z_star, cmd.throttle, phi)
        if mode.mode == gd.TRANSITION:
            # the transition cap is a scenario knob rather than the fixed default
            mode = gd.ModeState(mode.mode, mode.lam, phi_cap, mode.release_timer, mode.takeoff)
        if mode.mode != prev_mode:
            events.append(Event(t, "mode", mode.mode))
            if mode.mode == gd.GROUNDED:
                carrot = np.array(x[0:2])

        # tilt command: the takeoff latch retracts like the grounded branch
        lam = 1 if (mode.lam == 1 or mode.takeoff) else 0
        c = cmd.throttle if (mode.lam == 1 or mode.takeoff) else 0.0
        v_tilt = gd.tilt_reference(xs[2], c, lam, scn.z_phi, v_max)

        # references
        if scn.reference == "hold":
            x_ref = np.zeros(12)
            x_ref[0:3] = hold
            x_ref[3] = yaw_hold
            x_refs = x_ref
        else:
            yaw_hold = yaw_hold + cmd.yaw_rate_cmd * T_s
            x_refs = gd.horizon_reference(x_meas[0:3], cmd, T_s, cfg.nodes, cfg.dt_node, yaw_hold)
            x_ref = x_refs[0]

        # aerial command
        if mode.mode == gd.GROUNDED:
            alpha = 0.0
            u_air = np.zeros(4)
        elif nmpc is not None:
            # the ramp bottoms out at the landed ride height, so alpha reaches 0 on contact
            blend = BlendContext(z_star=scn.z_star, z_g=ride_height(phi, params))
            # a commanded takeoff flies on the flight cost even while still low
            z_blend = max(xs[2], scn.z_star) if mode.takeoff else xs[2]
            u_air = nmpc.step(x_meas, x_refs, phi, z=z_blend, blend=blend)
            alpha = nmpc.state.alpha
            nmpc_failures += int(nmpc.last_diagnostics.failed)
        else:
            u_air = pid.step(x_meas, x_ref, phi)
            alpha = blend_alpha(xs[2], phi, BlendContext(scn.z_star, ride_height(phi, params)))

        # ground command
        if not on_ground:
            heading = float(x[3])
        pose = gd.DrivePose(float(x[0]), float(x[1]), heading, params.wheel_radius,
                            half_wheel_base(phi, params))
        if mode.mode == gd.GROUNDED:
            carrot = carrot + np.asarray(cmd.v_cmd[0:2]) * T_s
            V, w = gd.drive_track(pose, carrot)
        else:
            V, w = gd.drive_track(pose, x_ref[0:2])
        wheels = gd.wheel_speeds(V, w, pose.R, pose.l)
        u_a, u_g = gd.actuator_switch(mode, u_air, wheels)

        if scn.ground_effect and not on_ground:
            h = _rotor_height(x, phi, surface, params)
            ge = (sample_ratio(h, phi, table, rng) if scn.measurement_noise > 0
                  else thrust_ratio(h, phi, table))
        else:
            ge = 1.0
        rec.add(t, x, phi, alpha, u_a, u_g, mode.mode, ge, cmd.v_cmd)

        if k == n_ticks or tipover is not None:
            break
        if t_ground is not None and t - t_ground >= scn.settle_after_touchdown - 1e-12:
            break

        if frame_phi != phi:
            frame = model_frame(phi, params)
            frame_phi = phi

        for j in range(n_sub):
            ts = t + j * dt
            if on_ground:
                Fw = euler_to_rotation(x[3:6]) @ (ge * frame[2:14].reshape(3, 4) @ u_a)
                if Fw @ surface.normal > params.mass * params.g * math.cos(surface.slope):
                    on_ground = False
                    events.append(Event(ts, "liftoff"))
                else:
                    rates = gd.unicycle_rates(u_g[0], u_g[1], pose.R, pose.l)
                    pose = gd.unicycle_step(pose, rates[0], rates[1], dt)
                    heading = pose.heading
                    p_new, euler = resting_pose((pose.x, pose.y, 0.0), pose.heading, phi, surface, params)
                    v_new = (p_new - x[0:3]) / dt
                    distance_driven += float(np.linalg.norm(p_new - x[0:3]))
                    x[0:3], x[3:6], x[6:9] = p_new, euler, v_new
                    x[9:12] = (0.0, 0.0, rates[1])
                    # retracting further would set the base on the ground
                    phi = max(tilt_integrate(phi, v_tilt, dt, mode.phi_limit), min(phi, phi_ground_min))
                    continue
            try:
                x = rk4_step(x, u_a, phi, dt, params, ge, frame=frame)
            except EulerSingularity as exc:
                raise SimDiverged(f"attitude singularity at t={ts:.3f}s: {exc}") from exc
            if scn.disturbances:
                f, tau = _disturbance_wrench(scn, ts, euler_to_rotation(x[3:6]))
                x[6:9] += f / params.mass * dt
                x[9:12] += frame[-9:].reshape(3, 3) @ tau * dt
            if not np.all(np.isfinite(x)) or np.max(np.abs(x[0:3])) > 1e4:
                raise SimDiverged(f"state diverged at t={ts + dt:.3f}s")
            phi = tilt_integrate(phi, v_tilt, dt, mode.phi_limit)
            res = contact_resolve(x, phi, surface, params)
            if res.kind == AIRBORNE:
                continue
            if res.kind == TIPOVER:
                tipover = res.reason
                events.append(Event(ts + dt, "tipover", res.reason))
                break
            # inelastic touchdown onto the wheels
            if touchdown is None:
                touchdown = res.metrics
                touchdown.t = ts + dt
            events.append(Event(ts + dt, "touchdown"))
            pos, euler = resting_pose(x[0:3], float(x[3]), phi, surface, params)
            x[0:3], x[3:6], x[6:12] = pos, euler, 0.0
            on_ground = True
            heading = float(x[3])
            pose = gd.DrivePose(float(x[0]), float(x[1]), heading, params.wheel_radius,
                                half_wheel_base(phi, params))
            if t_ground is None:
                t_ground = ts + dt


    info = {
        "scenario": scn.name,
        "controller": controller,
        "preset": preset or scn.preset,
        "ground_effect": bool(scn.ground_effect),
        "seed": int(scn.seed),
        "physics_dt": dt,
        "control_rate": scn.control_rate,
        "distance_driven": distance_driven,
    }
    if nmpc is not None:
        info["nmpc_failures"] = nmpc_failures
        times = [d.solve_time for d in nmpc.state.history]
        info["mpc_steps"] = len(times)
        info["mpc_step_mean_s"] = float(np.mean(times)) if times else 0.0
    return rec.build(events=events, touchdown=touchdown, tipover=tipover, info=info)
