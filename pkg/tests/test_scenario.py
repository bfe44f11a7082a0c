import math

import pytest
import yaml

from morphoflight.errors import ScenarioInvalid
from morphoflight.sim import Scenario, load_scenario, scenario_from_dict, shipped_scenario
from morphoflight.sim.scenario import shipped_scenario_path

SHIPPED = ["wheel_landing", "driving_takeoff", "slope_landing", "slope_flat_phi0", "hover", "lateral_impulse"]


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_scenarios_load(name):
    s = shipped_scenario(name)
    assert s.substeps * s.physics_dt == pytest.approx(s.control_period)


def test_auto_physics_dt():
    s = Scenario()
    assert s.physics_dt == pytest.approx(1 / 1050)
    assert s.substeps == 7


def test_pilot_timeline():
    s = shipped_scenario("driving_takeoff")
    assert s.pilot_at(0.0).v_cmd == (0.5, 0.0, 0.0)
    assert s.pilot_at(3.0).throttle == 1.0
    assert s.pilot_at(100.0).v_cmd == (0.0, 0.0, -0.5)


@pytest.mark.parametrize(
    "bad",
    [
        {"duration": -1},
        {"physics_dt": 0.0015},
        {"bogus_key": 1},
        {"preset": "nope"},
        {"ground": {"slope_deg": 75}},
        {"initial": {"euler_deg": [0, 85, 0]}},
        {"initial": {"position": [0, 0]}},
        {"pilot": [{"t": 2}, {"t": 1}]},
        {"guidance": {"reference": "chase"}},
        {"disturbances": [{"t": 1, "frame": "moon"}]},
        {"u_ref": "max"},
    ],
)
def test_invalid_scenarios(bad):
    with pytest.raises(ScenarioInvalid):
        scenario_from_dict(bad)


def test_malformed_yaml(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text("duration: [1,\n")
    with pytest.raises(ScenarioInvalid):
        load_scenario(p)
    with pytest.raises(ScenarioInvalid):
        load_scenario(tmp_path / "missing.yaml")


def test_yaml_roundtrip(tmp_path):
    data = yaml.safe_load(shipped_scenario_path("slope_landing").read_text())
    p = tmp_path / "copy.yaml"
    p.write_text(yaml.safe_dump(data))
    assert load_scenario(p) == shipped_scenario("slope_landing")


def test_surface_helpers():
    s = Scenario(slope_deg=25, z_g=0.2, slope_x0=1.0)
    assert s.surface_height(1.0) == pytest.approx(0.2)
    assert s.surface_normal()[2] == pytest.approx(math.cos(math.radians(25)))
