import json
import subprocess
import sys

import pytest

from morphoflight.cli import main
from morphoflight.sim import CSV_COLUMNS

QUICK = """\
name: quick
duration: 0.5
initial: {position: [0, 0, 1]}
guidance: {reference: hold, z_phi: 0.0}
ground_effect: true
"""


@pytest.fixture
def quick(tmp_path):
    p = tmp_path / "quick.yaml"
    p.write_text(QUICK)
    return str(p)


def test_run_writes_artifacts(tmp_path, quick):
    out = tmp_path / "out"
    assert main(["run", "--scenario", quick, "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["alpha.svg", "phi.svg", "run.csv", "summary.json", "ubar.svg", "z.svg"]
    assert (out / "run.csv").read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
    assert json.loads((out / "summary.json").read_text())["ground_effect"] is True


def test_run_byte_reproducible(tmp_path, quick):
    for d in ("a", "b"):
        assert main(["run", "--scenario", quick, "--noise", "0.005", "--seed", "3", "--out", str(tmp_path / d)]) == 0
    for name in ("run.csv", "summary.json", "z.svg", "phi.svg", "alpha.svg", "ubar.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_ground_effect_off_recorded(tmp_path, quick):
    main(["run", "--scenario", quick, "--ground-effect", "off", "--out", str(tmp_path / "off")])
    assert json.loads((tmp_path / "off" / "summary.json").read_text())["ground_effect"] is False


def test_missing_table(tmp_path, quick, capsys):
    rc = main(["run", "--scenario", quick, "--ge-table", str(tmp_path / "none.csv"), "--out", str(tmp_path / "o")])
    assert rc != 0
    assert "ParseError" in capsys.readouterr().err


def test_invalid_scenario(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("duration: -3\n")
    assert main(["run", "--scenario", str(p), "--out", str(tmp_path / "o")]) != 0
    assert "ScenarioInvalid" in capsys.readouterr().err


def test_sweep_empty_is_noop(tmp_path):
    assert main(["sweep", "--param", "phi_cap_transition_deg", "--out", str(tmp_path)]) == 0
    assert not list(tmp_path.iterdir())


def test_sweep_unknown_param(capsys):
    assert main(["sweep", "--param", "warp_factor", "--values", "1"]) != 0
    assert "UnknownParameter" in capsys.readouterr().err


def test_sweep_rows(tmp_path, quick):
    assert main(["sweep", "--scenario", quick, "--param", "seed", "--values", "0,1", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "sweep_seed.csv").read_text().splitlines()
    assert len(lines) == 3 and lines[0].startswith("value,")


def test_sweep_robot_param(tmp_path, quick):
    assert main(["sweep", "--scenario", quick, "--param", "k_M", "--values", "0.01", "--out", str(tmp_path)]) == 0


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "morphoflight", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "sweep" in out.stdout
