import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morphoflight import guidance as gd


def test_position_reference_limits_velocity():
    cmd = gd.PilotCommand((3.0, -0.5, 0.0))
    np.testing.assert_allclose(gd.position_reference([0, 0, 1], cmd, 0.1), [0.1, -0.05, 1.0])
    with pytest.raises(ValueError):
        gd.position_reference([0, 0, 0], cmd, 0.0)


def test_state_reference_layout():
    x = gd.state_reference([1, 2, 3], gd.PilotCommand((0.2, 0, -0.3)), 0.5, yaw=0.4)
    assert x[3] == 0.4 and np.all(x[4:6] == 0) and np.all(x[9:] == 0)
    np.testing.assert_allclose(x[6:9], [0.2, 0, -0.3])


def test_horizon_reference_ramps():
    ref = gd.horizon_reference([0, 0, 2], gd.PilotCommand((0, 0, -0.5)), 1 / 150, 10, 0.1)
    assert ref.shape == (10, 12)
    np.testing.assert_allclose(np.diff(ref[:, 2]), -0.05)
    assert ref[0, 2] == pytest.approx(2 - 0.5 / 150)


@pytest.mark.parametrize(
    "z, c, lam, expected",
    [(1.0, 0.0, 0, 0.35), (2.0, 0.0, 0, 0.0), (0.1, 0.6, 1, -0.35), (0.1, 0.2, 1, 0.0)],
)
def test_tilt_reference(z, c, lam, expected):
    assert gd.tilt_reference(z, c, lam, 1.5, 0.35) == expected


def test_mode_update_sequence():
    rh = 0.15
    x = np.zeros(12)
    x[2] = 1.0
    m = gd.mode_update(x, 0.0, rh, gd.ModeState())
    assert m.mode == gd.FLIGHT
    x[2] = 0.3
    m = gd.mode_update(x, 0.0, rh, m)
    assert m.mode == gd.TRANSITION and m.phi_limit == gd.PHI_TRANSITION_MAX
    x[2] = rh
    m = gd.mode_update(x, 0.0, rh, m)
    assert m.mode == gd.GROUNDED and m.grounded


def test_mode_update_hysteresis_and_release():
    rh = 0.15
    g = gd.ModeState(gd.GROUNDED, 1, gd.PHI_TRANSITION_MAX)
    x = np.zeros(12)
    x[2] = 0.3
    m = gd.mode_update(x, 0.0, rh, g, dt=0.02)
    assert m.mode == gd.GROUNDED  # release needs to persist
    m = gd.mode_update(x, 0.0, rh, m, dt=0.04)
    assert m.mode == gd.TRANSITION


def test_takeoff_latch():
    g = gd.ModeState(gd.GROUNDED, 1, gd.PHI_TRANSITION_MAX)
    x = np.zeros(12)
    x[2] = 0.15
    m = gd.mode_update(x, 0.0, 0.15, g, throttle=1.0, phi=0.5)
    assert m.mode == gd.FLIGHT and m.takeoff
    # still low, but the throttle keeps it from re-grounding
    m = gd.mode_update(x, 0.0, 0.15, m, throttle=1.0, phi=0.5)
    assert m.mode == gd.FLIGHT
    # too tilted to lift off
    assert gd.mode_update(x, 0.0, 0.15, g, throttle=1.0, phi=1.2).mode == gd.GROUNDED


def test_actuator_switch():
    ua, ug = np.full(4, 0.5), np.array([1.0, 2.0])
    a, w = gd.actuator_switch(gd.ModeState(gd.GROUNDED, 1), ua, ug)
    assert np.all(a == 0) and np.all(w == ug)
    a, w = gd.actuator_switch(gd.ModeState(gd.FLIGHT), ua, ug)
    assert np.all(a == ua) and np.all(w == 0)
    a, w = gd.actuator_switch(gd.ModeState(gd.TRANSITION), ua, ug)
    assert np.all(a == ua) and np.all(w == ug)


def test_wheel_speed_roundtrip():
    wl, wr = gd.wheel_speeds(0.8, 0.3, 0.09, 0.25)
    V, om = gd.unicycle_rates(wl, wr, 0.09, 0.25)
    assert V == pytest.approx(0.8) and om == pytest.approx(0.3)
    with pytest.raises(ValueError):
        gd.wheel_speeds(1.0, 0.0, 0.0, 0.2)


def test_unicycle_circle_closes():
    pose = gd.DrivePose(0.0, 0.0, 0.0, 0.09, 0.25)
    V, om = 0.5, 0.5
    dt = 2 * math.pi / om / 1000
    for _ in range(1000):
        pose = gd.unicycle_step(pose, V, om, dt)
    assert math.hypot(pose.x, pose.y) < 1e-6


def test_drive_track_turns_in_place_when_behind():
    pose = gd.DrivePose(0.0, 0.0, 0.0, 0.09, 0.25)
    V, om = gd.drive_track(pose, [-1.0, 0.1])
    assert V == 0.0 and om != 0.0
    V, om = gd.drive_track(pose, [1.0, 0.0])
    assert V > 0 and om == 0.0
    assert gd.drive_track(pose, [0.0, 0.0]) == (0.0, 0.0)


def test_drive_track_converges():
    pose = gd.DrivePose(0.0, 0.0, 0.0, 0.09, 0.25)
    target = [2.0, 1.0]
    for _ in range(2000):
        V, om = gd.drive_track(pose, target)
        pose = gd.unicycle_step(pose, V, om, 0.01)
    assert math.hypot(pose.x - 2.0, pose.y - 1.0) < 0.01


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50))
def test_property_wrap_angle(a):
    w = gd.wrap_angle(a)
    assert -math.pi <= w < math.pi
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)
