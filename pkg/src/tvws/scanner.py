"""The availability/usability engine.

For every unmasked pixel and scanned channel: a channel is available iff it
is not reserved and the pixel lies outside the separation-padded protected
region of every co-channel and adjacent-channel tower; the channel noise is
the maximum co-channel RSS received with the WSD antenna. Results export to
a CSV with one row per pixel in grid order.
"""

from __future__ import annotations

import math
import re
import threading
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Callable, Mapping, Sequence

import numpy as np

from .geodata import (
    GeoCoordinate,
    PixelGrid,
    RegionBoundary,
    auto_boundary,
    build_pixel_grid,
    destination_point,
    haversine_distance,
    initial_bearing,
)
from .propagation import (
    NO_SIGNAL_DBM,
    PropagationParams,
    model_rss,
    resolve_resolution_m,
)
from .spectrum import (
    BANDS,
    EMISSION_CLASSES,
    ChannelPlan,
    TvTower,
    build_channel_index,
    channel_center_frequency,
    reserved_filter,
    tower_eirp_dbm,
)
from .terrain import TerrainGrid, extract_profile
from . import kernels

ProgressSink = Callable[[float], None]

ChannelStatus = namedtuple("ChannelStatus", ["available", "usable"])

#: Threshold table shipped for convenience only; regulators define the real
#: values, so treat these as placeholders and supply your own per scan.
PLACEHOLDER_THRESHOLDS_DBM: dict[str, dict[str, float]] = {
    band: {"a": -84.0, "d": -84.0} for band in BANDS
}


class ScanError(ValueError):
    """Fatal scan-configuration problem detected before any pixel work."""


@dataclass
class ScanConfig:
    """Everything a scan needs besides the tower list and terrain raster."""

    boundary: RegionBoundary
    pixel_size_km: float
    plan: ChannelPlan
    channels: tuple[int, ...]
    thresholds_dbm: Mapping[str, Mapping[str, float]]
    sep_co_km: float
    sep_adj_km: float
    reserved: tuple[int, ...] = ()
    wsd_height_m: float = 10.0
    wsd_gain_dbi: float = 0.0
    tv_rx_height_m: float = 10.0
    tv_rx_gain_dbi: float = 0.0
    model: str = "free_space"
    params: PropagationParams = field(default_factory=PropagationParams)
    radials: int = 72
    compute_noise: bool = True
    max_noise_dbm: float = -85.0
    erp_dipole: bool = False

    def __post_init__(self) -> None:
        self.channels = tuple(int(c) for c in self.channels)
        self.reserved = tuple(int(c) for c in self.reserved)
        if self.pixel_size_km <= 0.0:
            raise ScanError(f"pixel_size_km {self.pixel_size_km!r} must be > 0")
        if self.sep_co_km < 0.0 or self.sep_adj_km < 0.0:
            raise ScanError("separation distances must be >= 0")
        if self.radials < 4:
            raise ScanError(f"radials {self.radials!r} must be >= 4")
        if not self.channels:
            raise ScanError("scan channel list is empty")
        for n in self.channels:
            if not self.plan.contains(n):
                raise ScanError(f"scan channel {n} not in channel plan")
        if len(set(self.reserved)) > 12:
            raise ScanError("at most 12 reserved channels allowed")
        if self.wsd_height_m < 0.0 or self.tv_rx_height_m < 0.0:
            raise ScanError("antenna heights must be >= 0")
        for band, classes in self.thresholds_dbm.items():
            if band not in BANDS:
                raise ScanError(f"unknown band {band!r} in thresholds")
            for clazz in classes:
                if clazz not in EMISSION_CLASSES:
                    raise ScanError(f"unknown emission class {clazz!r} in thresholds")


@dataclass(eq=False, frozen=True)
class ProtectedContour:
    """Per-radial protected-contour radii of one tower.

    Radial k points along bearing k * (360 / radials) degrees clockwise from
    north. On flat terrain all radii coincide and the representation
    degenerates to a single scalar radius.
    """

    tower_pos: int
    radii_km: np.ndarray

    @property
    def radials(self) -> int:
        return len(self.radii_km)


@dataclass
class PixelResult:
    """Availability bits and per-channel noise at one pixel center."""

    center: GeoCoordinate
    availability: dict[int, int]
    noise_dbm: dict[int, float] | None
    total_available: int = -1

    def __post_init__(self) -> None:
        popcount = sum(self.availability.values())
        if self.total_available < 0:
            self.total_available = popcount
        elif self.total_available != popcount:
            raise ValueError("total_available does not match availability bits")


def resolve_threshold(cfg: ScanConfig, tower: TvTower) -> float:
    """RSS_th for a tower from the (band, emission class) table; fatal if absent."""
    try:
        band = cfg.plan.band_of(tower.channel)
    except ValueError as exc:
        raise ScanError(f"tower {tower.index}: {exc}") from exc
    try:
        return float(cfg.thresholds_dbm[band][tower.emission_class])
    except KeyError as exc:
        raise ScanError(
            f"tower {tower.index}: no threshold for band {band!r} class {tower.emission_class!r}"
        ) from exc


def _contour_distances_km(cfg: ScanConfig) -> np.ndarray:
    """Sample distances for contour sweeps: uniform steps out to max_range."""
    max_range = cfg.params.max_range_km
    step_m = resolve_resolution_m(cfg.params, max_range * 1000.0)
    n_seg = max(1, math.ceil(max_range * 1000.0 / step_m - 1e-9))
    return np.arange(1, n_seg + 1, dtype=np.float64) * (max_range / n_seg)


def protected_contour(
    tower: TvTower, cfg: ScanConfig, terrain: TerrainGrid | None = None, tower_pos: int = -1
) -> ProtectedContour:
    """Protected-contour radii of one tower, one per radial.

    Each radial samples RSS at the configured resolution out to max_range
    using the TV receiver height and gain; the radius is the farthest sampled
    distance still meeting the threshold, so coverage re-emerging beyond a
    shadowed valley extends the contour. A tower that never meets the
    threshold gets radius 0.
    """
    threshold = resolve_threshold(cfg, tower)
    eirp = tower_eirp_dbm(tower, cfg.erp_dipole)
    freq = channel_center_frequency(cfg.plan, tower.channel)
    distances = _contour_distances_km(cfg)
    radii = np.zeros(cfg.radials, dtype=np.float64)

    if cfg.model == "free_space":
        # Isotropic by construction: one radial sweep serves all bearings.
        rss = eirp + cfg.tv_rx_gain_dbi - (
            32.45 + 20.0 * np.log10(distances) + 20.0 * np.log10(freq)
        )
        hits = np.nonzero(rss >= threshold)[0]
        radius = distances[hits[-1]] if hits.size else 0.0
        radii[:] = radius
        return ProtectedContour(tower_pos=tower_pos, radii_km=radii)

    if terrain is None:
        raise ScanError("terrain model requires a terrain grid")
    step_m = resolve_resolution_m(cfg.params, cfg.params.max_range_km * 1000.0)
    for k in range(cfg.radials):
        bearing = k * (360.0 / cfg.radials)
        endpoint = destination_point(tower.location, bearing, cfg.params.max_range_km)
        profile = extract_profile(terrain, tower.location, endpoint, step_m)
        rss = kernels.rss_prefix_sweep(
            np.ascontiguousarray(profile.distances_km),
            np.ascontiguousarray(profile.elevations_m),
            tower.height_agl_m,
            cfg.tv_rx_height_m,
            freq,
            cfg.params.effective_earth_factor,
            eirp + cfg.tv_rx_gain_dbi,
        )
        hits = np.nonzero(rss[1:] >= threshold)[0]
        radii[k] = profile.distances_km[1:][hits[-1]] if hits.size else 0.0
    return ProtectedContour(tower_pos=tower_pos, radii_km=radii)


def in_protected_region(
    contour: ProtectedContour,
    d_s_km: float,
    p: GeoCoordinate,
    tower_location: GeoCoordinate,
) -> bool:
    """True iff p is within the separation-padded contour of the tower.

    Membership compares the tower->p distance against the radius of the radial
    nearest the tower->p bearing plus the separation distance d_s.
    """
    distance = haversine_distance(tower_location, p)
    if distance == 0.0:
        return True
    bearing = initial_bearing(tower_location, p)
    step = 360.0 / contour.radials
    idx = int(round(bearing / step)) % contour.radials
    return distance <= float(contour.radii_km[idx]) + d_s_km


def channel_noise(
    p: GeoCoordinate,
    co_towers: Sequence[TvTower],
    cfg: ScanConfig,
    terrain: TerrainGrid | None = None,
) -> float:
    """Noise level at p: maximum co-channel RSS received with the WSD antenna.

    Returns the -1000 dBm sentinel when there are no co-channel towers or all
    are beyond max_range. A pixel coincident with a tower receives EIRP plus
    the WSD gain (zero pathloss) rather than a singular value.
    """
    best = NO_SIGNAL_DBM
    for tower in co_towers:
        eirp = tower_eirp_dbm(tower, cfg.erp_dipole)
        freq = channel_center_frequency(cfg.plan, tower.channel)
        if haversine_distance(tower.location, p) == 0.0:
            rss = eirp + cfg.wsd_gain_dbi
        else:
            rss = model_rss(
                cfg.model,
                tower.location,
                tower.height_agl_m,
                p,
                cfg.wsd_height_m,
                eirp,
                cfg.wsd_gain_dbi,
                freq,
                terrain,
                cfg.params,
            )
        if rss > best:
            best = rss
    return best


class _MonotoneProgress:
    """Clamps progress callbacks to a monotone sequence in [0, 1]."""

    def __init__(self, sink: ProgressSink | None):
        self._sink = sink
        self._last = -1.0
        self._lock = threading.Lock()

    def emit(self, fraction: float) -> None:
        if self._sink is None:
            return
        fraction = min(1.0, max(0.0, fraction))
        with self._lock:
            if fraction <= self._last:
                return
            self._last = fraction
        self._sink(fraction)


def resolve_scan_grid(
    cfg: ScanConfig, towers: Sequence[TvTower]
) -> tuple[RegionBoundary, PixelGrid]:
    """Resolve an auto boundary against the towers and build the pixel grid."""
    boundary = cfg.boundary
    if boundary.variant == "auto":
        boundary = auto_boundary(towers, cfg.params.max_range_km)
    return boundary, build_pixel_grid(boundary, cfg.pixel_size_km)


def scan(
    cfg: ScanConfig,
    towers: Sequence[TvTower],
    terrain: TerrainGrid | None = None,
    progress_sink: ProgressSink | None = None,
    workers: int = 1,
) -> list[PixelResult]:
    """Run the availability/noise scan over every unmasked pixel.

    Output is ordered row-major from the grid's northwest corner and is
    bit-identical for any worker count: pixels are evaluated independently
    and reassembled in grid order. Progress fractions are monotone and end
    at 1.0.
    """
    progress = _MonotoneProgress(progress_sink)
    progress.emit(0.0)

    # Fail on unresolvable thresholds before any pixel work.
    for tower in towers:
        resolve_threshold(cfg, tower)
    if cfg.model == "terrain" and terrain is None:
        raise ScanError("terrain model requires a terrain grid")

    _, grid = resolve_scan_grid(cfg, towers)
    index = build_channel_index(towers, cfg.plan, cfg.channels)
    reserved = reserved_filter(cfg.channels, cfg.reserved)

    needed = sorted(
        {pos for n in cfg.channels for pos in index.co(n)}
        | {pos for n in cfg.channels for pos in index.adj(n)}
    )
    contours: dict[int, ProtectedContour] = {}
    if workers > 1 and len(needed) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pos: pool.submit(protected_contour, towers[pos], cfg, terrain, pos)
                for pos in needed
            }
            contours = {pos: fut.result() for pos, fut in futures.items()}
    else:
        for pos in needed:
            contours[pos] = protected_contour(towers[pos], cfg, terrain, pos)

    pixels = [center for _, _, center in grid.unmasked_centers()]
    total = len(pixels)
    if total == 0:
        progress.emit(1.0)
        return []

    def evaluate(center: GeoCoordinate) -> PixelResult:
        availability: dict[int, int] = {}
        noise: dict[int, float] | None = {} if cfg.compute_noise else None
        for n in cfg.channels:
            ok = n not in reserved
            if ok:
                for pos in index.co(n):
                    if in_protected_region(contours[pos], cfg.sep_co_km, center, towers[pos].location):
                        ok = False
                        break
            if ok:
                for pos in index.adj(n):
                    if in_protected_region(contours[pos], cfg.sep_adj_km, center, towers[pos].location):
                        ok = False
                        break
            availability[n] = 1 if ok else 0
            if noise is not None:
                noise[n] = channel_noise(center, [towers[i] for i in index.co(n)], cfg, terrain)
        return PixelResult(center=center, availability=availability, noise_dbm=noise)

    done = 0
    done_lock = threading.Lock()

    def evaluate_chunk(chunk: list[GeoCoordinate]) -> list[PixelResult]:
        nonlocal done
        out = [evaluate(c) for c in chunk]
        with done_lock:
            done += len(chunk)
            completed = done
        progress.emit(completed / total)
        return out

    if workers <= 1:
        results = evaluate_chunk(pixels)
    else:
        chunk_size = max(1, math.ceil(total / (workers * 4)))
        chunks = [pixels[i : i + chunk_size] for i in range(0, total, chunk_size)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(evaluate_chunk, chunks) for r in part]

    progress.emit(1.0)
    return results


def classify_usability(
    results: Sequence[PixelResult], max_noise_dbm: float
) -> list[dict[int, ChannelStatus]]:
    """Per pixel, per channel (available, usable) flags.

    A channel is usable iff its noise is the no-noise sentinel or does not
    exceed max_noise (inclusive). Usability is independent of availability.
    Requires that the scan computed noise.
    """
    out: list[dict[int, ChannelStatus]] = []
    for pixel in results:
        if pixel.noise_dbm is None:
            raise ValueError("usability classification requires a scan with compute_noise")
        statuses: dict[int, ChannelStatus] = {}
        for n, available in pixel.availability.items():
            noise = pixel.noise_dbm[n]
            usable = noise == NO_SIGNAL_DBM or noise <= max_noise_dbm
            statuses[n] = ChannelStatus(available=bool(available), usable=usable)
        out.append(statuses)
    return out


@dataclass
class ScanDataset:
    """A scan result set as written to / read from the output CSV."""

    channels: tuple[int, ...]
    has_noise: bool
    pixels: list[PixelResult]


def export_csv(results: Sequence[PixelResult], cfg: ScanConfig, sink: str | Path | IO[str]) -> None:
    """Write results as CSV: lat,lon,ch_<n>...,noise_<n>...,total.

    Availability cells are 0/1; noise is dBm with two decimals and the -1000
    sentinel; coordinates carry six decimals. When the scan skipped noise the
    noise columns are omitted entirely. Line endings are '\\n'.
    """
    own = not hasattr(sink, "write")
    fh: IO[str] = open(sink, "w", encoding="utf-8", newline="") if own else sink  # type: ignore[arg-type]
    try:
        header = ["lat", "lon"] + [f"ch_{n}" for n in cfg.channels]
        if cfg.compute_noise:
            header += [f"noise_{n}" for n in cfg.channels]
        header.append("total")
        fh.write(",".join(header) + "\n")
        for pixel in results:
            cells = [f"{pixel.center.lat:.6f}", f"{pixel.center.lon:.6f}"]
            cells += [str(pixel.availability[n]) for n in cfg.channels]
            if cfg.compute_noise:
                assert pixel.noise_dbm is not None
                cells += [f"{pixel.noise_dbm[n]:.2f}" for n in cfg.channels]
            cells.append(str(pixel.total_available))
            fh.write(",".join(cells) + "\n")
    finally:
        if own:
            fh.close()


_CH_COL = re.compile(r"^ch_(\d+)$")
_NOISE_COL = re.compile(r"^noise_(\d+)$")


def import_csv(source: str | Path | IO[str]) -> ScanDataset:
    """Read a result CSV back into a ScanDataset; exact inverse of export_csv."""
    own = not hasattr(source, "read")
    fh: IO[str] = open(source, "r", encoding="utf-8") if own else source  # type: ignore[arg-type]
    try:
        text = fh.read()
    finally:
        if own:
            fh.close()

    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise ValueError("result CSV is empty")
    header = lines[0].split(",")
    if len(header) < 4 or header[0] != "lat" or header[1] != "lon" or header[-1] != "total":
        raise ValueError("line 1: malformed result header")
    channels: list[int] = []
    i = 2
    while i < len(header) and (m := _CH_COL.match(header[i])):
        channels.append(int(m.group(1)))
        i += 1
    noise_channels: list[int] = []
    while i < len(header) - 1 and (m := _NOISE_COL.match(header[i])):
        noise_channels.append(int(m.group(1)))
        i += 1
    if i != len(header) - 1 or not channels:
        raise ValueError("line 1: malformed result header")
    has_noise = bool(noise_channels)
    if has_noise and noise_channels != channels:
        raise ValueError("line 1: noise columns do not match channel columns")

    pixels: list[PixelResult] = []
    for line_no, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise ValueError(f"line {line_no}: expected {len(header)} cells, found {len(cells)}")
        try:
            center = GeoCoordinate(float(cells[0]), float(cells[1]))
            avail = {}
            for k, n in enumerate(channels):
                bit = int(cells[2 + k])
                if bit not in (0, 1):
                    raise ValueError(f"availability cell must be 0 or 1, got {bit}")
                avail[n] = bit
            noise: dict[int, float] | None = None
            if has_noise:
                base = 2 + len(channels)
                noise = {n: float(cells[base + k]) for k, n in enumerate(channels)}
            total = int(cells[-1])
            pixels.append(
                PixelResult(center=center, availability=avail, noise_dbm=noise, total_available=total)
            )
        except ValueError as exc:
            raise ValueError(f"line {line_no}: {exc}") from exc
    return ScanDataset(channels=tuple(channels), has_noise=has_noise, pixels=pixels)
