import numpy as np

from morphoflight.plots import _ticks, landing_panels, line_chart
from test_metrics import synthetic_log


def test_line_chart_is_svg_and_deterministic():
    t = np.linspace(0, 1, 50)
    a = line_chart(t, np.sin(t), "Sine", "y")
    assert a.startswith("<svg") or a.startswith("<?xml")
    assert a.rstrip().endswith("</svg>")
    assert a == line_chart(t, np.sin(t), "Sine", "y")


def test_constant_series():
    svg = line_chart(np.arange(3.0), np.ones(3), "Flat", "y")
    assert "nan" not in svg.lower()


def test_ticks_cover_range():
    ticks = _ticks(0.13, 1.87)
    assert ticks == [0.5, 1.0, 1.5]
    assert _ticks(1.0, 1.0) == [1.0]


def test_landing_panels():
    panels = landing_panels(synthetic_log())
    assert set(panels) == {"z", "phi", "alpha", "ubar"}
