"""Near-ground thrust ratio over (tilt angle, height).

The shipped table is a synthetic reconstruction of load-cell measurements
taken at 50% throttle: a thrust gain that peaks near 20% at 50 deg tilt and
0.25 m, and a loss of thrust at 70 deg. Users may substitute measured data
in the same format (``phi_deg,z_m,ratio,sigma``; degrees and meters).
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import NonPositiveRatio, NonRectangularGrid, ParseError

HEADER = ("phi_deg", "z_m", "ratio", "sigma")
FAR_FIELD_TOL = 0.02


@dataclass(frozen=True)
class GroundEffectTable:
    angles: np.ndarray  # deg, sorted
    heights: np.ndarray  # m, sorted
    ratio: np.ndarray  # (len(angles), len(heights))
    sigma: np.ndarray

    @property
    def angles_rad(self) -> np.ndarray:
        return np.radians(self.angles)


def default_table_path() -> str:
    return str(resources.files("morphoflight") / "data" / "ground_effect_default.csv")


def _read_text(source) -> str:
    if hasattr(source, "read"):
        return source.read()
    if isinstance(source, os.PathLike) or (isinstance(source, str) and "\n" not in source):
        try:
            with open(source) as fh:
                return fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read ground-effect table {source!s}: {exc}") from exc
    return source


def load_table(source=None) -> GroundEffectTable:
    """Parse and validate a table from a path, file object or CSV text."""
    text = _read_text(default_table_path() if source is None else source)
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows or tuple(c.strip() for c in rows[0]) != HEADER:
        raise ParseError(f"expected header {','.join(HEADER)}")
    cells = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise ParseError(f"line {lineno}: expected 4 fields, got {len(row)}")
        try:
            phi, z, r, s = (float(c) for c in row)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        if not all(math.isfinite(v) for v in (phi, z, r, s)):
            raise ParseError(f"line {lineno}: non-finite value")
        if r <= 0:
            raise NonPositiveRatio(f"line {lineno}: ratio {r} <= 0")
        if s < 0:
            raise ParseError(f"line {lineno}: negative sigma")
        if (phi, z) in cells:
            raise ParseError(f"line {lineno}: duplicate cell ({phi}, {z})")
        cells[(phi, z)] = (r, s)

    angles = np.array(sorted({k[0] for k in cells}))
    heights = np.array(sorted({k[1] for k in cells}))
    if len(angles) < 1 or len(heights) < 2:
        raise NonRectangularGrid("need at least one angle and two heights")
    ratio = np.empty((len(angles), len(heights)))
    sigma = np.empty_like(ratio)
    for i, a in enumerate(angles):
        for j, z in enumerate(heights):
            try:
                ratio[i, j], sigma[i, j] = cells[(a, z)]
            except KeyError:
                raise NonRectangularGrid(f"missing cell phi={a} deg, z={z} m") from None
    if np.any(np.abs(ratio[:, -1] - 1.0) > FAR_FIELD_TOL):
        raise ParseError("ratio at the largest height must be within 2% of 1")
    if angles[0] < 0 or heights[0] < 0:
        raise ParseError("angles and heights must be non-negative")
    return GroundEffectTable(angles, heights, ratio, sigma)


def _bilinear(grid, angles, heights, phi_deg, z):
    i = int(np.clip(np.searchsorted(angles, phi_deg) - 1, 0, max(len(angles) - 2, 0)))
    j = int(np.clip(np.searchsorted(heights, z) - 1, 0, len(heights) - 2))
    if len(angles) == 1:
        a, i1 = 0.0, i
    else:
        a = (phi_deg - angles[i]) / (angles[i + 1] - angles[i])
        i1 = i + 1
    b = (z - heights[j]) / (heights[j + 1] - heights[j])
    top = (1 - b) * grid[i, j] + b * grid[i, j + 1]
    bot = (1 - b) * grid[i1, j] + b * grid[i1, j + 1]
    return (1 - a) * top + a * bot


def _lookup(grid, table, z, phi, far_value, blend_to):
    if z > table.heights[-1]:
        return far_value
    zc = max(z, table.heights[0])
    phi_deg = math.degrees(phi)
    lo, hi = table.angles[0], table.angles[-1]
    if phi_deg >= hi:
        return _bilinear(grid, table.angles, table.heights, hi, zc)
    if phi_deg >= lo:
        return _bilinear(grid, table.angles, table.heights, phi_deg, zc)
    edge = _bilinear(grid, table.angles, table.heights, lo, zc)
    if blend_to is None or lo <= 0:
        return edge
    w = max(phi_deg, 0.0) / lo
    return blend_to + (edge - blend_to) * w


def thrust_ratio(z: float, phi: float, table: GroundEffectTable) -> float:
    """Mean thrust multiplier at height ``z`` (m) and tilt ``phi`` (rad)."""
    return float(_lookup(table.ratio, table, z, phi, 1.0, 1.0))


def thrust_sigma(z: float, phi: float, table: GroundEffectTable) -> float:
    """Relative standard deviation; clamped, not blended, outside the grid."""
    return float(_lookup(table.sigma, table, min(z, table.heights[-1]), phi, None, None))


def sample_ratio(z: float, phi: float, table: GroundEffectTable, rng: np.random.Generator) -> float:
    """Mean ratio plus a Gaussian draw scaled by the local sigma."""
    mean = thrust_ratio(z, phi, table)
    s = thrust_sigma(z, phi, table)
    if s == 0.0:
        return mean
    return mean + s * float(rng.standard_normal())
