"""Elevation-model ingestion, point lookup, and path profile extraction.

Terrain is supplied as an ESRI ASCII grid (.asc): a short whitespace-separated
header followed by a row-major raster, north row first. The format is plain
text, trivially authored for fixtures, and standard GIS tooling converts DTED
or GMTED tiles to it losslessly.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

import numpy as np

from .geodata import GeoCoordinate, haversine_distance, intermediate_points

DEFAULT_NODATA = -9999.0

_REQUIRED_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")


class TerrainParseError(ValueError):
    """Raised for malformed ESRI ASCII grid input; messages carry line numbers."""


class OutOfGridWarning(UserWarning):
    """Emitted once per grid when elevations are requested outside its extent."""


@dataclass(eq=False)
class TerrainGrid:
    """Raster elevation model. Immutable after load; safe to share across threads.

    `elevations` is row-major with the north row first, in meters AMSL.
    Nodata cells and out-of-grid queries resolve to 0 m (sea level) so coarse
    data degrades a scan instead of aborting it.
    """

    ncols: int
    nrows: int
    xllcorner: float
    yllcorner: float
    cellsize: float
    nodata_value: float
    elevations: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.ncols < 1 or self.nrows < 1:
            raise ValueError("grid must have at least one row and column")
        if self.cellsize <= 0.0:
            raise ValueError(f"cellsize {self.cellsize!r} must be > 0")
        if self.elevations.shape != (self.nrows, self.ncols):
            raise ValueError("raster shape does not match declared nrows x ncols")
        filled = np.where(self.elevations == self.nodata_value, 0.0, self.elevations)
        object.__setattr__(self, "_filled", np.ascontiguousarray(filled, dtype=np.float64))
        object.__setattr__(self, "_warned_outside", False)
        object.__setattr__(self, "_warn_lock", threading.Lock())

    @property
    def ll_corner(self) -> GeoCoordinate:
        return GeoCoordinate(self.yllcorner, self.xllcorner)

    @property
    def nodata_mask(self) -> np.ndarray:
        return self.elevations == self.nodata_value

    def _warn_outside_once(self) -> None:
        with self._warn_lock:
            if self._warned_outside:
                return
            object.__setattr__(self, "_warned_outside", True)
        warnings.warn(
            "elevation requested outside terrain grid extent; using 0 m",
            OutOfGridWarning,
            stacklevel=3,
        )


def load_terrain(source: str | Path | IO[str]) -> TerrainGrid:
    """Parse an ESRI ASCII grid from a path or text stream.

    Header keys are case-insensitive. NODATA_value is optional and defaults
    to -9999; the five geometric keys are required.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()

    header: dict[str, float] = {}
    values: list[float] = []
    expected: int | None = None
    in_header = True
    last_line_no = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        last_line_no = line_no
        if in_header and tokens[0][0].isalpha():
            if len(tokens) != 2:
                raise TerrainParseError(f"line {line_no}: malformed header entry {line.strip()!r}")
            try:
                header[tokens[0].lower()] = float(tokens[1])
            except ValueError as exc:
                raise TerrainParseError(f"line {line_no}: non-numeric header value {tokens[1]!r}") from exc
            continue
        if in_header:
            in_header = False
            for key in _REQUIRED_HEADER_KEYS:
                if key not in header:
                    raise TerrainParseError(f"line {line_no}: missing header key {key!r}")
            expected = int(header["ncols"]) * int(header["nrows"])
        for tok in tokens:
            try:
                values.append(float(tok))
            except ValueError as exc:
                raise TerrainParseError(f"line {line_no}: non-numeric cell {tok!r}") from exc
            if expected is not None and len(values) > expected:
                raise TerrainParseError(
                    f"line {line_no}: raster length mismatch: more than {expected} cells"
                )

    if in_header:
        raise TerrainParseError(f"line {last_line_no or 1}: no raster data found")
    assert expected is not None
    if len(values) != expected:
        raise TerrainParseError(
            f"line {last_line_no}: raster length mismatch: expected {expected} cells, found {len(values)}"
        )

    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    return TerrainGrid(
        ncols=ncols,
        nrows=nrows,
        xllcorner=header["xllcorner"],
        yllcorner=header["yllcorner"],
        cellsize=header["cellsize"],
        nodata_value=header.get("nodata_value", DEFAULT_NODATA),
        elevations=np.array(values, dtype=np.float64).reshape(nrows, ncols),
    )


def serialize_terrain(grid: TerrainGrid) -> str:
    """Render a grid back to ESRI ASCII text, preserving numeric content exactly."""
    lines = [
        f"ncols {grid.ncols}",
        f"nrows {grid.nrows}",
        f"xllcorner {grid.xllcorner!r}",
        f"yllcorner {grid.yllcorner!r}",
        f"cellsize {grid.cellsize!r}",
        f"NODATA_value {grid.nodata_value!r}",
    ]
    for row in grid.elevations:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def sample_elevations(grid: TerrainGrid, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    """Bilinear elevation lookup for arrays of coordinates (meters AMSL).

    Nodata cells contribute 0 m. Points outside the grid extent return 0 m
    and trigger a once-per-grid OutOfGridWarning.
    """
    lats = np.asarray(lats, dtype=np.float64)
    lons = np.asarray(lons, dtype=np.float64)
    cs = grid.cellsize
    east = grid.xllcorner + grid.ncols * cs
    north = grid.yllcorner + grid.nrows * cs
    outside = (lons < grid.xllcorner) | (lons > east) | (lats < grid.yllcorner) | (lats > north)

    # Fractional indices in cell-center space; row 0 of the raster is the north row.
    fx = (lons - grid.xllcorner) / cs - 0.5
    fy = (north - lats) / cs - 0.5
    fx = np.clip(fx, 0.0, grid.ncols - 1.0)
    fy = np.clip(fy, 0.0, grid.nrows - 1.0)
    c0 = np.floor(fx).astype(np.intp)
    r0 = np.floor(fy).astype(np.intp)
    c0 = np.minimum(c0, max(grid.ncols - 2, 0))
    r0 = np.minimum(r0, max(grid.nrows - 2, 0))
    c1 = np.minimum(c0 + 1, grid.ncols - 1)
    r1 = np.minimum(r0 + 1, grid.nrows - 1)
    wx = fx - c0
    wy = fy - r0

    filled = grid._filled
    top = filled[r0, c0] * (1.0 - wx) + filled[r0, c1] * wx
    bot = filled[r1, c0] * (1.0 - wx) + filled[r1, c1] * wx
    out = top * (1.0 - wy) + bot * wy
    if np.any(outside):
        out = np.where(outside, 0.0, out)
        grid._warn_outside_once()
    return out


def elevation_at(grid: TerrainGrid, p: GeoCoordinate) -> float:
    """Bilinear elevation at a single point (meters AMSL)."""
    return float(sample_elevations(grid, np.array([p.lat]), np.array([p.lon]))[0])


@dataclass(frozen=True)
class TerrainProfile:
    """Elevation samples along a great-circle path.

    distances_km ascend strictly from 0 to the total path length; elevations
    are meters AMSL at the matching sample points.
    """

    distances_km: np.ndarray
    elevations_m: np.ndarray
    start: GeoCoordinate
    end: GeoCoordinate

    def __post_init__(self) -> None:
        if len(self.distances_km) < 2 or len(self.distances_km) != len(self.elevations_m):
            raise ValueError("profile requires >= 2 matched distance/elevation samples")
        if np.any(np.diff(self.distances_km) <= 0.0):
            raise ValueError("profile distances must be strictly increasing")
        if self.distances_km[0] != 0.0:
            raise ValueError("profile distances must start at 0")

    @property
    def length_km(self) -> float:
        return float(self.distances_km[-1])


def extract_profile(
    grid: TerrainGrid | None,
    a: GeoCoordinate,
    b: GeoCoordinate,
    spacing_m: float,
) -> TerrainProfile:
    """Sample elevations along the great circle from a to b.

    Sample spacing never exceeds spacing_m: the path is split into
    ceil(length / spacing) equal segments so both endpoints are always
    included and a short path still yields its two endpoints. A None grid
    means flat sea level (all samples 0 m).
    """
    if spacing_m <= 0.0:
        raise ValueError(f"spacing {spacing_m!r} must be > 0")
    total_km = haversine_distance(a, b)
    if total_km == 0.0:
        raise ValueError("profile endpoints are coincident")
    n_seg = max(1, math.ceil(total_km * 1000.0 / spacing_m - 1e-9))
    fractions = np.arange(n_seg + 1, dtype=np.float64) / n_seg
    lats, lons = intermediate_points(a, b, fractions)
    if grid is None:
        elevations = np.zeros(n_seg + 1, dtype=np.float64)
    else:
        elevations = sample_elevations(grid, lats, lons)
    distances = fractions * total_km
    return TerrainProfile(distances_km=distances, elevations_m=elevations, start=a, end=b)
