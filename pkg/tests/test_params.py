import pytest
import yaml

from morphoflight.dynamics import RobotParams
from morphoflight.errors import ParseError, UnknownParameter
from morphoflight.params import default_params_path, load_params, params_from_dict


def test_shipped_params_equal_defaults():
    assert load_params() == RobotParams()


def test_linkage_block():
    p = params_from_dict({"linkage": {"Dx": 6.9}})
    assert p.linkage.Dx == 6.9


def test_unknown_keys():
    with pytest.raises(UnknownParameter):
        params_from_dict({"massss": 3})
    with pytest.raises(UnknownParameter):
        params_from_dict({"linkage": {"zz": 1}})


def test_invalid_values(tmp_path):
    with pytest.raises(ParseError):
        params_from_dict({"base_mass": -10.0})
    with pytest.raises(ParseError):
        load_params(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("g: [\n")
    with pytest.raises(ParseError):
        load_params(bad)


def test_file_roundtrip(tmp_path):
    data = yaml.safe_load(default_params_path().read_text())
    data["thrust_to_weight"] = 2.0
    p = tmp_path / "p.yaml"
    p.write_text(yaml.safe_dump(data))
    assert load_params(p).thrust_to_weight == pytest.approx(2.0)
