"""Scenario description and YAML loading.

Schema (units per key)::

    name: str
    duration: s                      # hard stop
    settle_after_touchdown: s        # keep running this long after grounding (default 2.0)
    control_rate: Hz                 # default 150
    physics_dt: s | auto             # auto = largest step <= 1 ms dividing the control period
    initial:
      position: [m, m, m]
      euler_deg: [theta_z, theta_y, theta_x]
      velocity: [m/s, m/s, m/s]
      omega: [rad/s, rad/s, rad/s]
      phi_deg: deg
      grounded: bool                 # start resting on the wheels
    ground:
      z_g: m                         # surface height at x = slope_x0
      slope_deg: deg                 # incline rising along +x (0 = flat)
      slope_x0: m
    guidance:
      z_phi: m                       # morph-start height above ground
      z_star: m                      # transition height above ground
      tilt_rate: rad/s
      phi_cap_transition_deg: deg    # tilt cap in transition/ground (70)
      reference: pilot | hold
      hold_position: [m, m, m]       # for reference: hold
    pilot:                           # rows apply from t until the next row
      - {t: s, v: [m/s, m/s, m/s], throttle: 0..1, yaw_rate: rad/s}
    disturbances:
      - {t: s, duration: s, force: [N, N, N], torque: [N m, N m, N m], frame: body | world}
    ground_effect: bool
    measurement_noise: m             # std of additive Gaussian position noise (0 = off)
    seed: int
    preset: fig5 | retuned
    u_ref: hover | level | zero      # NMPC input reference (default hover)
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from ..errors import ScenarioInvalid
from ..guidance import PilotCommand
from ..nmpc.ocp import PRESETS

MAX_PHYSICS_DT = 1e-3


@dataclass(frozen=True)
class Disturbance:
    t: float
    duration: float
    force: tuple = (0.0, 0.0, 0.0)
    torque: tuple = (0.0, 0.0, 0.0)
    frame: str = "body"


@dataclass(frozen=True)
class Scenario:
    name: str = "unnamed"
    duration: float = 10.0
    settle_after_touchdown: float = 2.0
    control_rate: float = 150.0
    physics_dt: float | None = None
    position: tuple = (0.0, 0.0, 1.0)
    euler_deg: tuple = (0.0, 0.0, 0.0)
    velocity: tuple = (0.0, 0.0, 0.0)
    omega: tuple = (0.0, 0.0, 0.0)
    phi0_deg: float = 0.0
    start_grounded: bool = False
    z_g: float = 0.0
    slope_deg: float = 0.0
    slope_x0: float = 0.0
    z_phi: float = 1.5
    z_star: float = 0.45
    tilt_rate: float = 0.35
    phi_cap_transition_deg: float = 70.0
    reference: str = "pilot"
    hold_position: tuple | None = None
    pilot: tuple = ()  # of (t, PilotCommand)
    disturbances: tuple = ()
    ground_effect: bool = True
    measurement_noise: float = 0.0
    seed: int = 0
    preset: str = "retuned"
    u_ref_mode: str = "hover"

    def __post_init__(self):
        if self.physics_dt is None:
            period = 1.0 / self.control_rate
            object.__setattr__(self, "physics_dt", period / math.ceil(period / MAX_PHYSICS_DT - 1e-9))
        self.validate()

    @property
    def control_period(self) -> float:
        return 1.0 / self.control_rate

    @property
    def substeps(self) -> int:
        return int(round(self.control_period / self.physics_dt))

    def validate(self):
        if self.duration <= 0 or self.control_rate <= 0 or self.physics_dt <= 0:
            raise ScenarioInvalid("duration, control_rate and physics_dt must be positive")
        n = self.control_period / self.physics_dt
        if abs(n - round(n)) > 1e-6 or round(n) < 1:
            raise ScenarioInvalid(
                f"physics_dt={self.physics_dt} does not divide the control period {self.control_period}"
            )
        if self.physics_dt > 0.01:
            raise ScenarioInvalid("physics_dt must not exceed 10 ms")
        times = [t for t, _ in self.pilot]
        if times != sorted(times):
            raise ScenarioInvalid("pilot timeline must be sorted by time")
        dtimes = [d.t for d in self.disturbances]
        if dtimes != sorted(dtimes):
            raise ScenarioInvalid("disturbances must be sorted by time")
        if self.reference not in ("pilot", "hold"):
            raise ScenarioInvalid(f"reference must be pilot or hold, got {self.reference!r}")
        if self.preset not in PRESETS:
            raise ScenarioInvalid(f"unknown preset {self.preset!r}")
        if not 0.0 <= self.slope_deg < 60.0:
            raise ScenarioInvalid("slope_deg must be in [0, 60)")
        if not 0.0 <= self.phi0_deg <= 90.0:
            raise ScenarioInvalid("phi0_deg must be in [0, 90]")
        if not 0.0 < self.phi_cap_transition_deg <= 90.0:
            raise ScenarioInvalid("phi_cap_transition_deg must be in (0, 90]")
        if self.u_ref_mode not in ("hover", "level", "zero"):
            raise ScenarioInvalid(f"unknown u_ref {self.u_ref_mode!r}")
        if self.z_star <= 0:
            raise ScenarioInvalid("z_star must be positive")
        for d in self.disturbances:
            if d.frame not in ("body", "world") or d.duration <= 0:
                raise ScenarioInvalid("disturbance frame must be body|world with positive duration")
        vals = [*self.position, *self.euler_deg, *self.velocity, *self.omega]
        if not all(math.isfinite(v) for v in vals):
            raise ScenarioInvalid("initial state must be finite")
        if abs(self.euler_deg[1]) >= 80.0:
            raise ScenarioInvalid("initial |theta_y| must stay below 80 deg")

    def initial_state(self) -> np.ndarray:
        x = np.zeros(12)
        x[0:3] = self.position
        x[3:6] = np.radians(self.euler_deg)
        x[6:9] = self.velocity
        x[9:12] = self.omega
        return x

    def pilot_at(self, t: float) -> PilotCommand:
        cmd = PilotCommand()
        for ti, c in self.pilot:
            if ti <= t + 1e-12:
                cmd = c
            else:
                break
        return cmd

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def surface_height(self, x: float) -> float:
        return self.z_g + math.tan(math.radians(self.slope_deg)) * (x - self.slope_x0)

    def surface_normal(self) -> np.ndarray:
        s = math.radians(self.slope_deg)
        return np.array([-math.sin(s), 0.0, math.cos(s)])

    def surface_point(self) -> np.ndarray:
        return np.array([self.slope_x0, 0.0, self.z_g])


def _tuple(v, n=3):
    if v is None:
        return None
    v = tuple(float(c) for c in v)
    if len(v) != n:
        raise ScenarioInvalid(f"expected {n} values, got {len(v)}")
    return v


def scenario_from_dict(d: dict) -> Scenario:
    d = copy.deepcopy(d) or {}
    known = {
        "name", "duration", "settle_after_touchdown", "control_rate", "physics_dt", "initial",
        "ground", "guidance", "pilot", "disturbances", "ground_effect", "measurement_noise",
        "seed", "preset", "u_ref",
    }
    unknown = set(d) - known
    if unknown:
        raise ScenarioInvalid(f"unknown scenario keys: {sorted(unknown)}")
    kw = {}
    for k in ("name", "duration", "settle_after_touchdown", "control_rate", "ground_effect",
              "measurement_noise", "seed", "preset"):
        if k in d:
            kw[k] = d[k]
    if "u_ref" in d:
        kw["u_ref_mode"] = d["u_ref"]
    if d.get("physics_dt", "auto") != "auto":
        kw["physics_dt"] = float(d["physics_dt"])
    init = d.get("initial", {}) or {}
    if "position" in init:
        kw["position"] = _tuple(init["position"])
    if "euler_deg" in init:
        kw["euler_deg"] = _tuple(init["euler_deg"])
    if "velocity" in init:
        kw["velocity"] = _tuple(init["velocity"])
    if "omega" in init:
        kw["omega"] = _tuple(init["omega"])
    if "phi_deg" in init:
        kw["phi0_deg"] = float(init["phi_deg"])
    if "grounded" in init:
        kw["start_grounded"] = bool(init["grounded"])
    ground = d.get("ground", {}) or {}
    for src, dst in (("z_g", "z_g"), ("slope_deg", "slope_deg"), ("slope_x0", "slope_x0")):
        if src in ground:
            kw[dst] = float(ground[src])
    gd = d.get("guidance", {}) or {}
    for k in ("z_phi", "z_star", "tilt_rate", "phi_cap_transition_deg"):
        if k in gd:
            kw[k] = float(gd[k])
    if "reference" in gd:
        kw["reference"] = gd["reference"]
    if "hold_position" in gd:
        kw["hold_position"] = _tuple(gd["hold_position"])
    pilot = []
    for row in d.get("pilot", []) or []:
        pilot.append(
            (
                float(row["t"]),
                PilotCommand(
                    _tuple(row.get("v", (0, 0, 0))),
                    float(row.get("throttle", 0.0)),
                    float(row.get("yaw_rate", 0.0)),
                ),
            )
        )
    kw["pilot"] = tuple(pilot)
    dist = []
    for row in d.get("disturbances", []) or []:
        dist.append(
            Disturbance(
                float(row["t"]),
                float(row.get("duration", 0.01)),
                _tuple(row.get("force", (0, 0, 0))),
                _tuple(row.get("torque", (0, 0, 0))),
                row.get("frame", "body"),
            )
        )
    kw["disturbances"] = tuple(dist)
    try:
        return Scenario(**kw)
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, ScenarioInvalid):
            raise
        raise ScenarioInvalid(str(exc)) from exc


def load_scenario(path) -> Scenario:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ScenarioInvalid(f"cannot read scenario {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ScenarioInvalid(f"malformed scenario {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioInvalid(f"scenario {path} must be a mapping")
    return scenario_from_dict(data)


def shipped_scenario_path(name: str) -> Path:
    return Path(str(resources.files("morphoflight") / "data" / "scenarios" / f"{name}.yaml"))


def shipped_scenario(name: str) -> Scenario:
    return load_scenario(shipped_scenario_path(name))


SCENARIO_FIELDS = {f.name for f in fields(Scenario)}
