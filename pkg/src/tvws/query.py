"""Location search over a scan result dataset.

Maps a queried coordinate to the pixel whose cell contains it and reports a
three-state status per channel: available_usable, unavailable_or_unusable,
or unknown (channel unscanned or point outside the scanned region).
"""

from __future__ import annotations

from dataclasses import dataclass

from .geodata import GeoCoordinate
from .propagation import NO_SIGNAL_DBM
from .scanner import PixelResult, ScanDataset

STATUS_AVAILABLE_USABLE = "available_usable"
STATUS_UNAVAILABLE_OR_UNUSABLE = "unavailable_or_unusable"
STATUS_UNKNOWN = "unknown"

#: Matching slack on cell-bound comparisons; coordinates in the CSV carry
#: six decimals, so half of that quantum is ample.
_EDGE_EPS_DEG = 5e-7


@dataclass
class LocationQueryResult:
    queried: GeoCoordinate
    pixel: PixelResult | None
    statuses: dict[int, str]
    noise_dbm: dict[int, float] | None
    totals: dict[str, int]


def infer_cell_size_deg(dataset: ScanDataset) -> tuple[float, float] | None:
    """Estimate (dlat, dlon) pixel spacing from the result coordinates.

    Returns None when the dataset has too few distinct rows/columns to tell.
    """
    lats = sorted({p.center.lat for p in dataset.pixels})
    lons = sorted({p.center.lon for p in dataset.pixels})
    dlat = min((b - a for a, b in zip(lats, lats[1:])), default=None)
    dlon = min((b - a for a, b in zip(lons, lons[1:])), default=None)
    if dlat is None and dlon is None:
        return None
    # A single row (or column) grid still has spacing in the other axis.
    if dlat is None:
        dlat = dlon
    if dlon is None:
        dlon = dlat
    assert dlat is not None and dlon is not None
    return dlat, dlon


def search_location(
    dataset: ScanDataset,
    lat: float,
    lon: float,
    max_noise_dbm: float,
    cell_size_deg: tuple[float, float] | None = None,
) -> LocationQueryResult:
    """Channel status at a coordinate, against a loaded scan dataset.

    The query matches the nearest pixel center only if it falls within that
    pixel's cell bounds (inclusive); otherwise every channel is unknown.
    Datasets scanned without noise cannot prove a channel unusable, so their
    available channels count as usable.
    """
    queried = GeoCoordinate(lat, lon)
    if cell_size_deg is None:
        cell_size_deg = infer_cell_size_deg(dataset)

    pixel: PixelResult | None = None
    if dataset.pixels:
        nearest = min(
            dataset.pixels,
            key=lambda p: (p.center.lat - queried.lat) ** 2 + (p.center.lon - queried.lon) ** 2,
        )
        if cell_size_deg is None:
            # Degenerate single-pixel dataset: accept only (near-)exact hits.
            half_lat = half_lon = _EDGE_EPS_DEG
        else:
            half_lat = cell_size_deg[0] / 2.0 + _EDGE_EPS_DEG
            half_lon = cell_size_deg[1] / 2.0 + _EDGE_EPS_DEG
        if (
            abs(nearest.center.lat - queried.lat) <= half_lat
            and abs(nearest.center.lon - queried.lon) <= half_lon
        ):
            pixel = nearest

    statuses: dict[int, str] = {}
    noise: dict[int, float] | None = None
    available = usable_and_available = 0
    if pixel is None:
        statuses = {n: STATUS_UNKNOWN for n in dataset.channels}
    else:
        noise = dict(pixel.noise_dbm) if pixel.noise_dbm is not None else None
        for n in dataset.channels:
            avail = pixel.availability[n] == 1
            if pixel.noise_dbm is None:
                usable = True
            else:
                level = pixel.noise_dbm[n]
                usable = level == NO_SIGNAL_DBM or level <= max_noise_dbm
            available += int(avail)
            if avail and usable:
                usable_and_available += 1
                statuses[n] = STATUS_AVAILABLE_USABLE
            else:
                statuses[n] = STATUS_UNAVAILABLE_OR_UNUSABLE

    return LocationQueryResult(
        queried=queried,
        pixel=pixel,
        statuses=statuses,
        noise_dbm=noise,
        totals={
            "scanned": len(dataset.channels),
            "available": available,
            "available_usable": usable_and_available,
        },
    )
