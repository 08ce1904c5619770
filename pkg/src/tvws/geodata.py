"""Geographic primitives: coordinates, great-circle math, region boundaries,
and the pixel grid that discretizes a scan region.

All distances are great-circle kilometers on a sphere of radius 6371.0 km.
Polygon membership is evaluated planar in lat/lon space (even-odd rule,
boundary inclusive), which is adequate for regional masks but degrades near
the poles and across the antimeridian.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

EARTH_RADIUS_KM = 6371.0
KM_PER_DEGREE = 2.0 * math.pi * EARTH_RADIUS_KM / 360.0

# Inflation applied to zero-extent auto-boundary boxes so the polygon ring
# keeps distinct vertices while still containing the generating tower.
_DEGENERATE_BOX_EPS_DEG = 1e-9


def normalize_longitude(lon: float) -> float:
    """Wrap a longitude into [-180, 180)."""
    lon = math.fmod(lon + 180.0, 360.0)
    if lon < 0.0:
        lon += 360.0
    return lon - 180.0


@dataclass(frozen=True)
class GeoCoordinate:
    """Point on the sphere. Latitude in [-90, 90]; longitude wrapped to [-180, 180)."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.lat) or not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat!r} outside [-90, 90]")
        if not math.isfinite(self.lon):
            raise ValueError(f"longitude {self.lon!r} is not finite")
        object.__setattr__(self, "lon", normalize_longitude(self.lon))


def haversine_distance(a: GeoCoordinate, b: GeoCoordinate) -> float:
    """Great-circle distance between two points in kilometers."""
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlat = math.radians(b.lat - a.lat)
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    h = min(1.0, max(0.0, h))
    return EARTH_RADIUS_KM * 2.0 * math.atan2(math.sqrt(h), math.sqrt(1.0 - h))


def central_angle(a: GeoCoordinate, b: GeoCoordinate) -> float:
    """Great-circle central angle between two points in radians."""
    return haversine_distance(a, b) / EARTH_RADIUS_KM


def initial_bearing(a: GeoCoordinate, b: GeoCoordinate) -> float:
    """Forward azimuth of the great circle from a to b, degrees in [0, 360)."""
    if a.lat == b.lat and a.lon == b.lon:
        raise ValueError("bearing undefined for coincident points")
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlon = math.radians(b.lon - a.lon)
    x = math.sin(dlon) * math.cos(lat2)
    y = math.cos(lat1) * math.sin(lat2) - math.sin(lat1) * math.cos(lat2) * math.cos(dlon)
    return math.degrees(math.atan2(x, y)) % 360.0


def destination_point(origin: GeoCoordinate, bearing_deg: float, distance_km: float) -> GeoCoordinate:
    """Spherical forward geodesy: the point `distance_km` along `bearing_deg` from origin."""
    if distance_km < 0.0:
        raise ValueError(f"distance {distance_km!r} must be >= 0")
    if distance_km == 0.0:
        return origin
    delta = distance_km / EARTH_RADIUS_KM
    theta = math.radians(bearing_deg)
    lat1 = math.radians(origin.lat)
    lon1 = math.radians(origin.lon)
    sin_lat2 = math.sin(lat1) * math.cos(delta) + math.cos(lat1) * math.sin(delta) * math.cos(theta)
    sin_lat2 = min(1.0, max(-1.0, sin_lat2))
    lat2 = math.asin(sin_lat2)
    lon2 = lon1 + math.atan2(
        math.sin(theta) * math.sin(delta) * math.cos(lat1),
        math.cos(delta) - math.sin(lat1) * sin_lat2,
    )
    return GeoCoordinate(math.degrees(lat2), math.degrees(lon2))


def intermediate_points(a: GeoCoordinate, b: GeoCoordinate, fractions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Points along the great circle from a to b at the given fractions in [0, 1].

    Returns (lats, lons) in degrees. Evaluating at fraction f from a->b is
    bit-identical to evaluating at 1-f from b->a, which keeps extracted
    terrain profiles exactly reversible.
    """
    delta = central_angle(a, b)
    sin_delta = math.sin(delta)
    if sin_delta < 1e-15:
        raise ValueError("intermediate points undefined for coincident or antipodal endpoints")
    lat1, lon1 = math.radians(a.lat), math.radians(a.lon)
    lat2, lon2 = math.radians(b.lat), math.radians(b.lon)
    f = np.asarray(fractions, dtype=np.float64)
    wa = np.sin((1.0 - f) * delta) / sin_delta
    wb = np.sin(f * delta) / sin_delta
    x = wa * (math.cos(lat1) * math.cos(lon1)) + wb * (math.cos(lat2) * math.cos(lon2))
    y = wa * (math.cos(lat1) * math.sin(lon1)) + wb * (math.cos(lat2) * math.sin(lon2))
    z = wa * math.sin(lat1) + wb * math.sin(lat2)
    lats = np.degrees(np.arctan2(z, np.hypot(x, y)))
    lons = np.degrees(np.arctan2(y, x))
    return lats, lons


@dataclass(frozen=True)
class RegionBoundary:
    """Scan-region boundary: one of auto, circle, or polygon.

    Construct through the factory classmethods; they enforce the invariants.
    Polygon rings are stored open (distinct vertices, implicit closure).
    """

    variant: str
    center: GeoCoordinate | None = None
    radius_km: float | None = None
    ring: tuple[GeoCoordinate, ...] = ()

    @classmethod
    def auto(cls) -> "RegionBoundary":
        return cls(variant="auto")

    @classmethod
    def circle(cls, center: GeoCoordinate, radius_km: float) -> "RegionBoundary":
        if radius_km <= 0.0:
            raise ValueError(f"circle radius {radius_km!r} must be > 0")
        return cls(variant="circle", center=center, radius_km=float(radius_km))

    @classmethod
    def polygon(cls, vertices: Sequence[GeoCoordinate]) -> "RegionBoundary":
        verts = list(vertices)
        if len(verts) >= 2 and verts[0] == verts[-1]:
            verts = verts[:-1]
        distinct = {(v.lat, v.lon) for v in verts}
        if len(distinct) < 3:
            raise ValueError("polygon requires at least 3 distinct vertices")
        return cls(variant="polygon", ring=tuple(verts))

    @classmethod
    def from_geojson(cls, geometry: dict) -> "RegionBoundary":
        """Build a polygon boundary from a GeoJSON Polygon geometry (first ring only)."""
        if not isinstance(geometry, dict) or geometry.get("type") != "Polygon":
            raise ValueError("boundary file must contain a single GeoJSON Polygon geometry")
        rings = geometry.get("coordinates")
        if not isinstance(rings, list) or not rings:
            raise ValueError("GeoJSON Polygon has no coordinate rings")
        if len(rings) > 1:
            raise ValueError("GeoJSON Polygon holes are not supported")
        try:
            verts = [GeoCoordinate(lat=float(pt[1]), lon=float(pt[0])) for pt in rings[0]]
        except (TypeError, IndexError) as exc:
            raise ValueError(f"malformed GeoJSON ring: {exc}") from exc
        return cls.polygon(verts)

    @classmethod
    def from_geojson_file(cls, path: str | Path) -> "RegionBoundary":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_geojson(json.load(fh))

    def contains(self, p: GeoCoordinate) -> bool:
        """Membership test; edges are inclusive. Auto boundaries contain everything."""
        if self.variant == "auto":
            return True
        if self.variant == "circle":
            assert self.center is not None and self.radius_km is not None
            return haversine_distance(self.center, p) <= self.radius_km
        return _polygon_contains(self.ring, p)

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(lat_min, lat_max, lon_min, lon_max) of the boundary extent."""
        if self.variant == "circle":
            assert self.center is not None and self.radius_km is not None
            dlat = self.radius_km / KM_PER_DEGREE
            cos_lat = max(math.cos(math.radians(self.center.lat)), math.cos(math.radians(89.5)))
            dlon = self.radius_km / (KM_PER_DEGREE * cos_lat)
            return (
                max(-90.0, self.center.lat - dlat),
                min(90.0, self.center.lat + dlat),
                self.center.lon - dlon,
                self.center.lon + dlon,
            )
        if self.variant == "polygon":
            lats = [v.lat for v in self.ring]
            lons = [v.lon for v in self.ring]
            return (min(lats), max(lats), min(lons), max(lons))
        raise ValueError("auto boundary has no extent; resolve it with auto_boundary() first")


def _on_segment(p: GeoCoordinate, a: GeoCoordinate, b: GeoCoordinate) -> bool:
    # Planar point-on-segment test in lat/lon space.
    cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon)
    if abs(cross) > 1e-12:
        return False
    return (
        min(a.lon, b.lon) - 1e-12 <= p.lon <= max(a.lon, b.lon) + 1e-12
        and min(a.lat, b.lat) - 1e-12 <= p.lat <= max(a.lat, b.lat) + 1e-12
    )


def _polygon_contains(ring: Sequence[GeoCoordinate], p: GeoCoordinate) -> bool:
    # Even-odd ray casting with an explicit boundary-inclusive edge check.
    n = len(ring)
    for i in range(n):
        if _on_segment(p, ring[i], ring[(i + 1) % n]):
            return True
    inside = False
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        if (a.lat > p.lat) != (b.lat > p.lat):
            x_cross = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat)
            if p.lon < x_cross:
                inside = not inside
    return inside


def boundary_contains(b: RegionBoundary, p: GeoCoordinate) -> bool:
    """Functional alias for RegionBoundary.contains."""
    return b.contains(p)


def auto_boundary(towers: Sequence, max_range_km: float) -> RegionBoundary:
    """Bounding box of all tower positions, expanded by max_range_km on every side.

    Accepts anything with a ``location`` GeoCoordinate attribute (or bare
    GeoCoordinates). Longitude expansion uses the widest latitude of the
    expanded box, so the box is never narrower than the requested range.
    """
    if not towers:
        raise ValueError("auto boundary requires at least one tower")
    if max_range_km < 0.0:
        raise ValueError(f"max range {max_range_km!r} must be >= 0")
    points = [t if isinstance(t, GeoCoordinate) else t.location for t in towers]
    lat_min = min(p.lat for p in points)
    lat_max = max(p.lat for p in points)
    lon_min = min(p.lon for p in points)
    lon_max = max(p.lon for p in points)

    dlat = max_range_km / KM_PER_DEGREE
    lat_min = max(-90.0, lat_min - dlat)
    lat_max = min(90.0, lat_max + dlat)
    widest = min(max(abs(lat_min), abs(lat_max)), 89.5)
    dlon = max_range_km / (KM_PER_DEGREE * math.cos(math.radians(widest)))
    lon_min -= dlon
    lon_max += dlon

    if lat_max - lat_min <= 0.0:
        lat_min -= _DEGENERATE_BOX_EPS_DEG
        lat_max += _DEGENERATE_BOX_EPS_DEG
    if lon_max - lon_min <= 0.0:
        lon_min -= _DEGENERATE_BOX_EPS_DEG
        lon_max += _DEGENERATE_BOX_EPS_DEG
    return RegionBoundary.polygon(
        [
            GeoCoordinate(lat_min, lon_min),
            GeoCoordinate(lat_min, lon_max),
            GeoCoordinate(lat_max, lon_max),
            GeoCoordinate(lat_max, lon_min),
        ]
    )


@dataclass(eq=False)
class PixelGrid:
    """Row-major pixel lattice covering a boundary's bounding box.

    Row 0 is the northernmost row, column 0 the westernmost column; `origin`
    is the center of pixel (0, 0). Centers step `dlat_deg` south per row and
    `dlon_deg` east per column (fixed degree steps sized to pixel_size at the
    region's mid-latitude). `mask[r, c]` is True where the center lies inside
    the boundary.
    """

    pixel_size_km: float
    origin: GeoCoordinate
    rows: int
    cols: int
    dlat_deg: float
    dlon_deg: float
    mask: np.ndarray = field(repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PixelGrid):
            return NotImplemented
        return (
            self.pixel_size_km == other.pixel_size_km
            and self.origin == other.origin
            and self.rows == other.rows
            and self.cols == other.cols
            and self.dlat_deg == other.dlat_deg
            and self.dlon_deg == other.dlon_deg
            and np.array_equal(self.mask, other.mask)
        )

    def center(self, row: int, col: int) -> GeoCoordinate:
        return GeoCoordinate(
            self.origin.lat - row * self.dlat_deg,
            self.origin.lon + col * self.dlon_deg,
        )

    def unmasked_centers(self) -> Iterator[tuple[int, int, GeoCoordinate]]:
        """Yield (row, col, center) for in-boundary pixels in row-major order."""
        for r in range(self.rows):
            for c in range(self.cols):
                if self.mask[r, c]:
                    yield r, c, self.center(r, c)

    @property
    def unmasked_count(self) -> int:
        return int(self.mask.sum())


def build_pixel_grid(boundary: RegionBoundary, pixel_size_km: float) -> PixelGrid:
    """Tile the boundary's bounding box with square pixels of pixel_size_km.

    The lattice is centered on the bounding box, so a box no larger than one
    pixel yields a single pixel at the box center. Construction is a pure
    function of its inputs.
    """
    if pixel_size_km <= 0.0:
        raise ValueError(f"pixel size {pixel_size_km!r} must be > 0")
    lat_min, lat_max, lon_min, lon_max = boundary.bounding_box()
    lat_mid = (lat_min + lat_max) / 2.0
    lon_mid = (lon_min + lon_max) / 2.0
    cos_mid = max(math.cos(math.radians(min(abs(lat_mid), 89.5))), 1e-6)

    height_km = (lat_max - lat_min) * KM_PER_DEGREE
    width_km = (lon_max - lon_min) * KM_PER_DEGREE * cos_mid
    rows = max(1, math.ceil(height_km / pixel_size_km - 1e-9))
    cols = max(1, math.ceil(width_km / pixel_size_km - 1e-9))

    dlat = pixel_size_km / KM_PER_DEGREE
    dlon = pixel_size_km / (KM_PER_DEGREE * cos_mid)
    origin = GeoCoordinate(
        lat_mid + (rows - 1) / 2.0 * dlat,
        lon_mid - (cols - 1) / 2.0 * dlon,
    )

    mask = np.zeros((rows, cols), dtype=bool)
    for r in range(rows):
        lat = origin.lat - r * dlat
        for c in range(cols):
            mask[r, c] = boundary.contains(GeoCoordinate(lat, origin.lon + c * dlon))
    return PixelGrid(
        pixel_size_km=float(pixel_size_km),
        origin=origin,
        rows=rows,
        cols=cols,
        dlat_deg=dlat,
        dlon_deg=dlon,
        mask=mask,
    )
