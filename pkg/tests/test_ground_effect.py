import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.interpolate import RegularGridInterpolator

from morphoflight.errors import NonPositiveRatio, NonRectangularGrid, ParseError
from morphoflight.ground_effect import load_table, sample_ratio, thrust_ratio, thrust_sigma


def test_shipped_table_shape(table):
    assert table.ratio.shape == (4, 6)
    assert table.angles.tolist() == [40, 50, 60, 70]


def test_grid_points_exact(table):
    assert thrust_ratio(0.25, math.radians(50), table) == pytest.approx(1.19)
    assert thrust_ratio(0.25, math.radians(70), table) == pytest.approx(0.93)


def test_far_field_is_unity(table):
    assert thrust_ratio(5.0, math.radians(55), table) == 1.0


def test_matches_scipy_bilinear(table):
    interp = RegularGridInterpolator((table.angles, table.heights), table.ratio)
    rng = np.random.default_rng(0)
    for _ in range(200):
        a = rng.uniform(40, 70)
        z = rng.uniform(0.25, 0.72)
        assert thrust_ratio(z, math.radians(a), table) == pytest.approx(float(interp([a, z])[0]), abs=1e-12)


def test_below_grid_clamps_height(table):
    assert thrust_ratio(0.1, math.radians(50), table) == thrust_ratio(0.25, math.radians(50), table)


def test_small_tilt_blends_to_unity(table):
    assert thrust_ratio(0.3, 0.0, table) == 1.0
    mid = thrust_ratio(0.3, math.radians(20), table)
    edge = thrust_ratio(0.3, math.radians(40), table)
    assert mid == pytest.approx(1.0 + 0.5 * (edge - 1.0))


def test_sigma_positive(table):
    assert thrust_sigma(0.25, math.radians(70), table) == pytest.approx(0.08)


def test_sampling_deterministic(table):
    a = [sample_ratio(0.3, 0.9, table, np.random.default_rng(5)) for _ in range(3)]
    assert a[0] == a[1] == a[2]
    draws = [sample_ratio(0.3, 0.9, table, r) for r in [np.random.default_rng(7)] for _ in range(2000)]
    assert np.mean(draws) == pytest.approx(thrust_ratio(0.3, 0.9, table), abs=0.005)


HEAD = "phi_deg,z_m,ratio,sigma\n"


def test_missing_file():
    with pytest.raises(ParseError):
        load_table("/nonexistent/table.csv")


def test_bad_header():
    with pytest.raises(ParseError):
        load_table("a,b,c,d\n50,0.2,1.1,0.0\n")


def test_non_rectangular():
    text = HEAD + "50,0.2,1.1,0\n50,0.5,1.0,0\n60,0.2,1.1,0\n"
    with pytest.raises(NonRectangularGrid):
        load_table(text)


def test_non_positive_ratio():
    with pytest.raises(NonPositiveRatio):
        load_table(HEAD + "50,0.2,0.0,0\n50,0.5,1.0,0\n")


def test_far_field_must_be_unity():
    with pytest.raises(ParseError):
        load_table(HEAD + "50,0.2,1.1,0\n50,0.5,1.2,0\n")


def test_file_object():
    t = load_table(io.StringIO(HEAD + "50,0.2,1.1,0\n50,0.5,1.0,0\n"))
    assert t.ratio.shape == (1, 2)
    assert thrust_ratio(0.35, math.radians(50), t) == pytest.approx(1.05)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 2.0), st.floats(0.0, math.pi / 2))
def test_property_ratio_bounded(z, phi):
    t = load_table()
    r = thrust_ratio(z, phi, t)
    assert t.ratio.min() - 1e-12 <= r <= max(t.ratio.max(), 1.0) + 1e-12
