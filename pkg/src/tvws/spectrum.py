"""TV-tower dataset ingestion/validation and the channel plan.

Tower CSVs use the canonical header (case-insensitive):

    index,name,lat,lon,erp_kw,channel,frequency_mhz,class,height_agl_m,country

Rows violating field invariants are skipped with row-numbered diagnostics;
a missing required column is fatal. The channel plan is the single source of
truth for center frequencies: the CSV frequency column is cross-checked
against it and mismatches warn, but the plan wins.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

from .geodata import GeoCoordinate

BANDS = ("low_vhf", "high_vhf", "uhf")
EMISSION_CLASSES = ("a", "d")
ALLOWED_BANDWIDTHS_MHZ = (6, 7, 8)
MAX_RESERVED_CHANNELS = 12

#: Gain of a half-wave dipole over isotropic; added when ERP data is dipole-referenced.
DIPOLE_GAIN_DB = 2.15

REQUIRED_COLUMNS = (
    "index",
    "name",
    "lat",
    "lon",
    "erp_kw",
    "channel",
    "frequency_mhz",
    "class",
    "height_agl_m",
    "country",
)


class TowersFormatError(ValueError):
    """Raised when the tower CSV is structurally unusable (bad/missing header)."""


@dataclass(frozen=True)
class Diagnostic:
    """One per-row validation finding. `row` is the 1-based line in the file."""

    row: int
    field: str
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"row {self.row}: [{self.severity}] {self.field}: {self.message}"


@dataclass(frozen=True)
class TvTower:
    """One broadcast transmitter row from the dataset."""

    index: int
    name: str
    location: GeoCoordinate
    erp_kw: float
    channel: int
    frequency_mhz: float
    emission_class: str
    height_agl_m: float
    country: str

    def __post_init__(self) -> None:
        if self.erp_kw <= 0.0:
            raise ValueError(f"erp_kw {self.erp_kw!r} must be > 0")
        if self.emission_class not in EMISSION_CLASSES:
            raise ValueError(f"emission class {self.emission_class!r} must be 'a' or 'd'")
        if self.height_agl_m < 0.0:
            raise ValueError(f"height_agl_m {self.height_agl_m!r} must be >= 0")


@dataclass(frozen=True)
class ChannelSegment:
    """A contiguous run of channels in one band with linearly spaced centers."""

    band: str
    first_channel: int
    last_channel: int
    first_center_mhz: float

    def __post_init__(self) -> None:
        if self.band not in BANDS:
            raise ValueError(f"band {self.band!r} must be one of {BANDS}")
        if self.first_channel > self.last_channel:
            raise ValueError("segment first_channel must be <= last_channel")
        if self.first_center_mhz <= 0.0:
            raise ValueError("segment first_center_mhz must be > 0")

    def contains(self, channel: int) -> bool:
        return self.first_channel <= channel <= self.last_channel


@dataclass(frozen=True)
class ChannelPlan:
    """Band segments mapping channel numbers to center frequencies."""

    segments: tuple[ChannelSegment, ...]
    bandwidth_mhz: int

    def __post_init__(self) -> None:
        if self.bandwidth_mhz not in ALLOWED_BANDWIDTHS_MHZ:
            raise ValueError(f"bandwidth {self.bandwidth_mhz!r} must be one of {ALLOWED_BANDWIDTHS_MHZ}")
        if not self.segments:
            raise ValueError("channel plan requires at least one segment")
        seen: set[int] = set()
        for seg in self.segments:
            span = set(range(seg.first_channel, seg.last_channel + 1))
            if span & seen:
                raise ValueError("channel plan segments overlap in channel numbers")
            seen |= span

    def segment_of(self, channel: int) -> ChannelSegment | None:
        for seg in self.segments:
            if seg.contains(channel):
                return seg
        return None

    def contains(self, channel: int) -> bool:
        return self.segment_of(channel) is not None

    def band_of(self, channel: int) -> str:
        seg = self.segment_of(channel)
        if seg is None:
            raise ValueError(f"channel {channel} not in plan")
        return seg.band

    def channels(self) -> list[int]:
        out: list[int] = []
        for seg in self.segments:
            out.extend(range(seg.first_channel, seg.last_channel + 1))
        return sorted(out)


def channel_center_frequency(plan: ChannelPlan, channel: int) -> float:
    """Center frequency in MHz of a channel, per its segment's linear spacing."""
    seg = plan.segment_of(channel)
    if seg is None:
        raise ValueError(f"channel {channel} not in plan")
    return seg.first_center_mhz + (channel - seg.first_channel) * plan.bandwidth_mhz


def same_segment(plan: ChannelPlan, a: int, b: int) -> bool:
    seg_a = plan.segment_of(a)
    return seg_a is not None and seg_a.contains(b)


def default_us_plan() -> ChannelPlan:
    """US-style 6 MHz plan (convenience default; split where the band gaps break
    linear spacing)."""
    return ChannelPlan(
        segments=(
            ChannelSegment("low_vhf", 2, 4, 57.0),
            ChannelSegment("low_vhf", 5, 6, 79.0),
            ChannelSegment("high_vhf", 7, 13, 177.0),
            ChannelSegment("uhf", 14, 36, 473.0),
        ),
        bandwidth_mhz=6,
    )


def erp_kw_to_dbm(erp_kw: float) -> float:
    """Radiated power in kilowatts to dBm."""
    if erp_kw <= 0.0:
        raise ValueError(f"erp_kw {erp_kw!r} must be > 0")
    return 10.0 * math.log10(erp_kw * 1e6)


def tower_eirp_dbm(tower: TvTower, erp_dipole: bool = False) -> float:
    """Tower EIRP in dBm. The dataset power column is treated as EIRP by
    default; pass erp_dipole=True for dipole-referenced ERP data (+2.15 dB)."""
    eirp = erp_kw_to_dbm(tower.erp_kw)
    if erp_dipole:
        eirp += DIPOLE_GAIN_DB
    return eirp


def _parse_row(row: Mapping[str, str], line_no: int) -> tuple[TvTower | None, list[Diagnostic]]:
    diags: list[Diagnostic] = []

    def fail(field: str, message: str) -> None:
        diags.append(Diagnostic(row=line_no, field=field, message=message))

    def number(field: str) -> float | None:
        raw = (row.get(field) or "").strip()
        if not raw:
            fail(field, "missing value")
            return None
        try:
            return float(raw)
        except ValueError:
            fail(field, f"not a number: {raw!r}")
            return None

    def integer(field: str) -> int | None:
        v = number(field)
        if v is None:
            return None
        if v != int(v):
            fail(field, f"not an integer: {row[field]!r}")
            return None
        return int(v)

    idx = integer("index")
    lat = number("lat")
    lon = number("lon")
    erp = number("erp_kw")
    channel = integer("channel")
    freq = number("frequency_mhz")
    height = number("height_agl_m")
    clazz = (row.get("class") or "").strip().lower()
    name = (row.get("name") or "").strip()
    country = (row.get("country") or "").strip()

    location: GeoCoordinate | None = None
    if lat is not None and lon is not None:
        try:
            location = GeoCoordinate(lat, lon)
        except ValueError as exc:
            fail("lat" if not -90.0 <= lat <= 90.0 else "lon", str(exc))
    if erp is not None and erp <= 0.0:
        fail("erp_kw", f"must be > 0, got {erp}")
        erp = None
    if clazz not in EMISSION_CLASSES:
        fail("class", f"emission class must be 'a' or 'd', got {row.get('class')!r}")
    if freq is not None and freq <= 0.0:
        fail("frequency_mhz", f"must be > 0, got {freq}")
        freq = None
    if height is not None and height < 0.0:
        fail("height_agl_m", f"must be >= 0, got {height}")
        height = None

    if diags or idx is None or location is None or erp is None or channel is None or freq is None or height is None:
        return None, diags
    return (
        TvTower(
            index=idx,
            name=name,
            location=location,
            erp_kw=erp,
            channel=channel,
            frequency_mhz=freq,
            emission_class=clazz,
            height_agl_m=height,
            country=country,
        ),
        [],
    )


def load_towers(source: str | Path | IO[str]) -> tuple[list[TvTower], list[Diagnostic]]:
    """Parse a tower CSV. Returns valid towers in file order plus diagnostics
    for every rejected row. Raises TowersFormatError for a missing column."""
    if hasattr(source, "read"):
        stream: IO[str] = source  # type: ignore[assignment]
    else:
        stream = io.StringIO(Path(source).read_text(encoding="utf-8"))

    reader = csv.reader(stream)
    try:
        raw_header = next(reader)
    except StopIteration:
        raise TowersFormatError("tower CSV is empty") from None
    header = [h.strip().lower() for h in raw_header]
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise TowersFormatError(f"tower CSV missing required column(s): {', '.join(missing)}")

    towers: list[TvTower] = []
    diagnostics: list[Diagnostic] = []
    for line_no, record in enumerate(reader, start=2):
        if not record or all(not cell.strip() for cell in record):
            continue
        row = {header[i]: record[i] if i < len(record) else "" for i in range(len(header))}
        tower, diags = _parse_row(row, line_no)
        if tower is not None:
            towers.append(tower)
        diagnostics.extend(diags)
    return towers, diagnostics


def plan_conformance(
    towers: Sequence[TvTower], plan: ChannelPlan
) -> tuple[list[TvTower], list[Diagnostic]]:
    """Check towers against a channel plan.

    Towers on channels outside the plan are dropped (error diagnostic). A
    frequency column deviating from the plan center by more than half a
    bandwidth warns; the tower is kept and the plan's frequency governs.
    """
    kept: list[TvTower] = []
    diags: list[Diagnostic] = []
    for pos, tower in enumerate(towers):
        if not plan.contains(tower.channel):
            diags.append(
                Diagnostic(
                    row=pos,
                    field="channel",
                    message=f"tower {tower.index}: channel {tower.channel} not in plan",
                )
            )
            continue
        center = channel_center_frequency(plan, tower.channel)
        if abs(tower.frequency_mhz - center) > plan.bandwidth_mhz / 2.0:
            diags.append(
                Diagnostic(
                    row=pos,
                    field="frequency_mhz",
                    message=(
                        f"tower {tower.index}: frequency {tower.frequency_mhz} MHz deviates from "
                        f"plan center {center} MHz; plan wins"
                    ),
                    severity="warning",
                )
            )
        kept.append(tower)
    return kept, diags


@dataclass(frozen=True)
class ChannelTowerIndex:
    """Per scanned channel: tower list positions broadcasting co-channel and
    on spectrally adjacent channels (n±1 within the same plan segment)."""

    co_channel: Mapping[int, tuple[int, ...]]
    adjacent: Mapping[int, tuple[int, ...]]

    def co(self, channel: int) -> tuple[int, ...]:
        return self.co_channel.get(channel, ())

    def adj(self, channel: int) -> tuple[int, ...]:
        return self.adjacent.get(channel, ())


def build_channel_index(
    towers: Sequence[TvTower], plan: ChannelPlan, scan_channels: Iterable[int]
) -> ChannelTowerIndex:
    """Index tower positions by scanned channel (Eq.-style co/adjacent search).

    Adjacency never crosses a gap between plan segments: a tower on the last
    channel of one band segment is not adjacent to the first channel of the
    next.
    """
    co: dict[int, tuple[int, ...]] = {}
    adj: dict[int, tuple[int, ...]] = {}
    for n in scan_channels:
        if not plan.contains(n):
            raise ValueError(f"scan channel {n} not in plan")
        co[n] = tuple(i for i, t in enumerate(towers) if t.channel == n)
        adj[n] = tuple(
            i
            for i, t in enumerate(towers)
            if abs(t.channel - n) == 1 and same_segment(plan, n, t.channel)
        )
    return ChannelTowerIndex(co_channel=co, adjacent=adj)


def reserved_filter(channels: Sequence[int], reserved: Iterable[int]) -> frozenset[int]:
    """Validate the reserved-channel list against the scan list.

    Returns the set of scanned channels that are flagged reserved. Reserved
    channels stay in the scan — they are forced unavailable downstream but
    still contribute noise and adjacency. Reserved entries not in the scan
    list are ignored with a warning; more than 12 distinct entries is an error.
    """
    reserved_set = set(reserved)
    if len(reserved_set) > MAX_RESERVED_CHANNELS:
        raise ValueError(
            f"at most {MAX_RESERVED_CHANNELS} reserved channels allowed, got {len(reserved_set)}"
        )
    scanned = set(channels)
    ignored = reserved_set - scanned
    if ignored:
        warnings.warn(
            f"reserved channel(s) not in scan list ignored: {sorted(ignored)}",
            UserWarning,
            stacklevel=2,
        )
    return frozenset(reserved_set & scanned)
