import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morphoflight.acceptance import displacement_oracle
from morphoflight.errors import InfeasibleDisplacement
from morphoflight.kinematics import (
    LinkageGeometry,
    closure_residual,
    encoder_to_tilt,
    mechanism_state,
    solve_forward,
    solve_inverse,
    tilt_integrate,
    tilt_to_encoder,
)


def test_displacement_range(geom):
    lo, hi = geom.displacement_range
    assert lo == pytest.approx(-0.0652686, abs=1e-6)
    assert hi == pytest.approx(9.7, abs=1e-12)


@pytest.mark.parametrize("phi_deg", [0, 10, 30, 45, 61.5, 80, 90])
def test_inverse_matches_bracketing_oracle(geom, phi_deg):
    phi = math.radians(phi_deg)
    assert solve_inverse(phi, geom) == pytest.approx(displacement_oracle(phi, geom), abs=1e-9)


@pytest.mark.parametrize("phi_deg", [0, 5, 22.5, 50, 70, 89.9, 90])
def test_roundtrip(geom, phi_deg):
    phi = math.radians(phi_deg)
    x = solve_inverse(phi, geom)
    theta, phi_back = solve_forward(x, geom)
    assert phi_back == pytest.approx(phi, abs=1e-9)
    assert np.max(np.abs(closure_residual(x, theta, phi_back, geom))) < 1e-10


def test_forward_with_seed(geom):
    x1 = solve_inverse(0.6, geom)
    x2 = solve_inverse(0.61, geom)
    seed = solve_forward(x1, geom)
    assert solve_forward(x2, geom, seed=seed)[1] == pytest.approx(0.61, abs=1e-10)


def test_encoder_zero_is_flat(geom):
    assert encoder_to_tilt(0, geom) == pytest.approx(0.0, abs=1e-9)
    assert mechanism_state(0, geom).displacement_x == pytest.approx(geom.x_zero)


def test_encoder_roundtrip_within_one_count(geom):
    for deg in (10, 40, 61.563, 85):
        phi = math.radians(deg)
        phi_q = encoder_to_tilt(tilt_to_encoder(phi, geom), geom)
        # one count is 0.8/1632.67 cm of travel
        assert abs(phi_q - phi) < 2e-3


@pytest.mark.parametrize("x", [-0.2, 9.71, 40.0])
def test_out_of_range_raises(geom, x):
    with pytest.raises(InfeasibleDisplacement):
        solve_forward(x, geom)


def test_inverse_rejects_bad_angle(geom):
    with pytest.raises(ValueError):
        solve_inverse(-0.1, geom)


def test_degenerate_single_link():
    # with d2 = 0 the crank closes only where |(Dx - h, Dy - x)| = d1, here x = Dy
    g = LinkageGeometry(d2=0.0)
    assert solve_forward(g.Dy, g) == (0.0, 0.0)
    with pytest.raises(InfeasibleDisplacement):
        solve_forward(3.0, g)


def test_invalid_geometry():
    with pytest.raises(ValueError):
        LinkageGeometry(h=0.0)


def test_tilt_integrate_clamps():
    assert tilt_integrate(1.2, 1.0, 0.5, 1.4) == 1.4
    assert tilt_integrate(0.1, -1.0, 0.5, 1.4) == 0.0
    with pytest.raises(ValueError):
        tilt_integrate(0.1, 1.0, 0.0, 1.4)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, math.pi / 2))
def test_property_roundtrip(phi):
    geom = LinkageGeometry()
    x = solve_inverse(phi, geom)
    assert solve_forward(x, geom)[1] == pytest.approx(phi, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.5), st.floats(1e-4, 0.05))
def test_property_inverse_monotone(phi, dphi):
    geom = LinkageGeometry()
    assert solve_inverse(phi + dphi, geom) > solve_inverse(phi, geom)
