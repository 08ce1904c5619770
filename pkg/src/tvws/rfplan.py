"""Link-budget evaluation, LOS checks, coverage rasters, synthetic URA
patterns, and the antenna-orientation grid search.

The URA radiation pattern is a parametric construction: a quadratic element
pattern clamped at the side-lobe attenuation, multiplied by the uniform-
excitation array factor. It is smooth, peaks exactly at the boresight set by
tilt/azimuth, and carries the 10*log10(rows*cols) array gain there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .geodata import GeoCoordinate, PixelGrid, haversine_distance, initial_bearing
from .propagation import (
    NO_SIGNAL_DBM,
    PropagationParams,
    model_rss,
    profile_is_los,
    resolve_resolution_m,
)
from .terrain import TerrainGrid, elevation_at, extract_profile

COVERAGE_METRICS = ("rss", "snr", "pathloss", "fade_margin", "capacity")

DIRECTIONS = ("downlink", "uplink")


@dataclass(frozen=True)
class UraAntenna:
    """Uniform rectangular array. Boresight points along `azimuth_deg`
    (compass) at elevation `tilt_deg` above the horizon."""

    tilt_deg: float = 0.0
    azimuth_deg: float = 0.0
    h_bw_deg: float = 65.0
    v_bw_deg: float = 65.0
    sla_db: float = 30.0
    spacing_wavelengths: float = 0.5
    rows: int = 1
    cols: int = 1

    def __post_init__(self) -> None:
        if not -90.0 <= self.tilt_deg <= 90.0:
            raise ValueError(f"tilt {self.tilt_deg!r} outside [-90, 90]")
        if not -180.0 <= self.azimuth_deg <= 180.0:
            raise ValueError(f"azimuth {self.azimuth_deg!r} outside [-180, 180]")
        if self.h_bw_deg <= 0.0 or self.v_bw_deg <= 0.0:
            raise ValueError("beamwidths must be > 0")
        if self.sla_db <= 0.0:
            raise ValueError("side-lobe attenuation must be > 0")
        if self.spacing_wavelengths <= 0.0:
            raise ValueError("element spacing must be > 0")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("array size must be >= 1x1")


@dataclass(frozen=True)
class RadioEndpoint:
    """One side of a link. `antenna=None` means isotropic (0 dBi)."""

    location: GeoCoordinate
    height_agl_m: float = 10.0
    tx_power_dbm: float = 30.0
    cable_loss_db: float = 0.0
    sensitivity_dbm: float = -90.0
    noise_figure_db: float = 6.0
    antenna: UraAntenna | None = None

    def __post_init__(self) -> None:
        if self.height_agl_m < 0.0:
            raise ValueError("height must be >= 0")
        if self.cable_loss_db < 0.0:
            raise ValueError("cable loss must be >= 0")
        if self.noise_figure_db < 0.0:
            raise ValueError("noise figure must be >= 0")


@dataclass(frozen=True)
class LinkMetrics:
    """Link-budget outputs. The budget identities hold exactly among fields."""

    rss_dbm: float
    pathloss_db: float
    snr_db: float
    noise_power_dbm: float
    capacity_mbps: float
    fade_margin_db: float
    los: bool
    tx_dir_gain_dbi: float
    rx_dir_gain_dbi: float

    def to_dict(self) -> dict:
        return {
            "rss_dbm": self.rss_dbm,
            "pathloss_db": self.pathloss_db,
            "snr_db": self.snr_db,
            "noise_power_dbm": self.noise_power_dbm,
            "capacity_mbps": self.capacity_mbps,
            "fade_margin_db": self.fade_margin_db,
            "los": self.los,
            "tx_dir_gain_dbi": self.tx_dir_gain_dbi,
            "rx_dir_gain_dbi": self.rx_dir_gain_dbi,
        }


def wrap_angle_deg(angle: float) -> float:
    """Wrap an angle difference into (-180, 180]."""
    wrapped = math.fmod(angle + 180.0, 360.0)
    if wrapped <= 0.0:
        wrapped += 360.0
    return wrapped - 180.0


def _array_factor(n: int, spacing_wavelengths: float, u: float) -> float:
    """|AF| of n uniformly excited elements, normalized to 1 at boresight.

    u is sin(angle off boresight). Grating-lobe peaks (where both numerator
    and denominator vanish) evaluate to 1.
    """
    if n == 1:
        return 1.0
    x = spacing_wavelengths * u
    den = float(np.sinc(x))
    if abs(den) < 1e-12:
        return 1.0
    return abs(float(np.sinc(n * x)) / den)


def ura_gain(
    antenna: UraAntenna | None,
    azimuth_deg: float,
    elevation_deg: float,
    frequency_mhz: float = 0.0,
) -> float:
    """Directional gain in dBi toward (azimuth, elevation) relative to site
    north and the horizon.

    Isotropic antennas (None) return 0 everywhere. Element spacing is given
    in wavelengths, so the synthesized pattern is frequency-independent; the
    frequency argument is accepted for interface uniformity.
    """
    if antenna is None:
        return 0.0
    dphi = wrap_angle_deg(azimuth_deg - antenna.azimuth_deg)
    dtheta = elevation_deg - antenna.tilt_deg
    element_db = -min(
        12.0 * (dphi / antenna.h_bw_deg) ** 2 + 12.0 * (dtheta / antenna.v_bw_deg) ** 2,
        antenna.sla_db,
    )
    af = _array_factor(
        antenna.cols, antenna.spacing_wavelengths, math.sin(math.radians(dphi))
    ) * _array_factor(antenna.rows, antenna.spacing_wavelengths, math.sin(math.radians(dtheta)))
    array_db = 10.0 * math.log10(antenna.rows * antenna.cols) + 20.0 * math.log10(max(af, 1e-20))
    return element_db + array_db


def pathloss_from_budget(
    p_tx_dbm: float,
    g_tx_dbi: float,
    l_tx_db: float,
    g_rx_dbi: float,
    l_rx_db: float,
    rss_dbm: float,
) -> float:
    """The link-budget pathloss identity: PL = P_tx + G_tx - L_tx + G_rx - L_rx - RSS."""
    return p_tx_dbm + g_tx_dbi - l_tx_db + g_rx_dbi - l_rx_db - rss_dbm


def noise_power_dbm(noise_figure_db: float, bandwidth_hz: float) -> float:
    """Thermal noise power: -174 dBm/Hz + NF + 10 log10(BW)."""
    if bandwidth_hz <= 0.0:
        raise ValueError(f"bandwidth {bandwidth_hz!r} must be > 0")
    return -174.0 + noise_figure_db + 10.0 * math.log10(bandwidth_hz)


def shannon_capacity_mbps(snr_db: float, bandwidth_hz: float) -> float:
    """Shannon throughput in Mbps for the given SNR and bandwidth."""
    if bandwidth_hz <= 0.0:
        raise ValueError(f"bandwidth {bandwidth_hz!r} must be > 0")
    return bandwidth_hz * math.log2(1.0 + 10.0 ** (snr_db / 10.0)) * 1e-6


def _endpoint_amsl(endpoint: RadioEndpoint, terrain: TerrainGrid | None) -> float:
    ground = elevation_at(terrain, endpoint.location) if terrain is not None else 0.0
    return ground + endpoint.height_agl_m


def _link_direction(
    tx: RadioEndpoint, rx: RadioEndpoint, terrain: TerrainGrid | None
) -> tuple[float, float, float, float]:
    """(az tx->rx, el tx->rx, az rx->tx, el rx->tx) along the straight line."""
    d_m = haversine_distance(tx.location, rx.location) * 1000.0
    h_tx = _endpoint_amsl(tx, terrain)
    h_rx = _endpoint_amsl(rx, terrain)
    az_fwd = initial_bearing(tx.location, rx.location)
    az_rev = initial_bearing(rx.location, tx.location)
    el_fwd = math.degrees(math.atan2(h_rx - h_tx, d_m))
    el_rev = math.degrees(math.atan2(h_tx - h_rx, d_m))
    return az_fwd, el_fwd, az_rev, el_rev


def los_available(
    terrain: TerrainGrid | None,
    a: RadioEndpoint,
    b: RadioEndpoint,
    params: PropagationParams | None = None,
) -> bool:
    """True iff no curvature-corrected terrain sample rises above the direct
    ray between the antenna tops. Flat (None) terrain is always LOS."""
    if terrain is None:
        return True
    params = params or PropagationParams()
    spacing = resolve_resolution_m(params, haversine_distance(a.location, b.location) * 1000.0)
    profile = extract_profile(terrain, a.location, b.location, spacing)
    return profile_is_los(profile, a.height_agl_m, b.height_agl_m, params)


def evaluate_link(
    tx: RadioEndpoint,
    rx: RadioEndpoint,
    frequency_mhz: float,
    bandwidth_hz: float,
    model: str = "free_space",
    terrain: TerrainGrid | None = None,
    params: PropagationParams | None = None,
) -> LinkMetrics:
    """Full link budget from tx to rx.

    Directional gains are evaluated along the straight tx<->rx direction;
    EIRP folds in the transmit gain and cable loss, receive gain folds in
    the receive cable loss. RSS comes from the selected propagation model
    and the remaining metrics follow from the budget identities.
    """
    if bandwidth_hz <= 0.0:
        raise ValueError(f"bandwidth {bandwidth_hz!r} must be > 0")
    if tx.location == rx.location:
        raise ValueError("link endpoints are coincident")
    params = params or PropagationParams()

    az_fwd, el_fwd, az_rev, el_rev = _link_direction(tx, rx, terrain)
    g_tx = ura_gain(tx.antenna, az_fwd, el_fwd, frequency_mhz)
    g_rx = ura_gain(rx.antenna, az_rev, el_rev, frequency_mhz)

    rss = model_rss(
        model,
        tx.location,
        tx.height_agl_m,
        rx.location,
        rx.height_agl_m,
        tx.tx_power_dbm + g_tx - tx.cable_loss_db,
        g_rx - rx.cable_loss_db,
        frequency_mhz,
        terrain,
        params,
    )
    pl = pathloss_from_budget(tx.tx_power_dbm, g_tx, tx.cable_loss_db, g_rx, rx.cable_loss_db, rss)
    p_n = noise_power_dbm(rx.noise_figure_db, bandwidth_hz)
    snr = rss - p_n
    return LinkMetrics(
        rss_dbm=rss,
        pathloss_db=pl,
        snr_db=snr,
        noise_power_dbm=p_n,
        capacity_mbps=shannon_capacity_mbps(snr, bandwidth_hz),
        fade_margin_db=rss - rx.sensitivity_dbm,
        los=los_available(terrain, tx, rx, params),
        tx_dir_gain_dbi=g_tx,
        rx_dir_gain_dbi=g_rx,
    )


def evaluate_ptmp(
    bs: RadioEndpoint,
    ues: Sequence[RadioEndpoint],
    direction: str,
    frequency_mhz: float,
    bandwidth_hz: float,
    model: str = "free_space",
    terrain: TerrainGrid | None = None,
    params: PropagationParams | None = None,
) -> list[LinkMetrics]:
    """Evaluate the BS against every UE; downlink transmits from the BS,
    uplink from each UE. Order is preserved."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    if not ues:
        raise ValueError("point-to-multipoint requires at least one UE")
    out = []
    for ue in ues:
        tx, rx = (bs, ue) if direction == "downlink" else (ue, bs)
        out.append(evaluate_link(tx, rx, frequency_mhz, bandwidth_hz, model, terrain, params))
    return out


def coverage_map(
    bs: RadioEndpoint,
    grid: PixelGrid,
    metric: str,
    ue_template: RadioEndpoint,
    frequency_mhz: float,
    bandwidth_hz: float,
    direction: str = "downlink",
    model: str = "free_space",
    terrain: TerrainGrid | None = None,
    params: PropagationParams | None = None,
) -> np.ndarray:
    """Raster of one link metric with a template UE at every unmasked pixel.

    Masked pixels (and a pixel coincident with the BS) carry NaN.
    """
    if metric not in COVERAGE_METRICS:
        raise ValueError(f"metric must be one of {COVERAGE_METRICS}")
    attr = {
        "rss": "rss_dbm",
        "snr": "snr_db",
        "pathloss": "pathloss_db",
        "fade_margin": "fade_margin_db",
        "capacity": "capacity_mbps",
    }[metric]
    raster = np.full((grid.rows, grid.cols), np.nan, dtype=np.float64)
    for r, c, center in grid.unmasked_centers():
        if center == bs.location:
            continue
        ue = replace(ue_template, location=center)
        metrics = evaluate_ptmp(
            bs, [ue], direction, frequency_mhz, bandwidth_hz, model, terrain, params
        )[0]
        raster[r, c] = getattr(metrics, attr)
    return raster


def export_coverage_csv(grid: PixelGrid, raster: np.ndarray, sink: str | Path | IO[str]) -> None:
    """Write a coverage raster as lat,lon,value rows (unmasked pixels only)."""
    own = not hasattr(sink, "write")
    fh: IO[str] = open(sink, "w", encoding="utf-8", newline="") if own else sink  # type: ignore[arg-type]
    try:
        fh.write("lat,lon,value\n")
        for r, c, center in grid.unmasked_centers():
            value = raster[r, c]
            if math.isnan(value):
                continue
            fh.write(f"{center.lat:.6f},{center.lon:.6f},{value:.6f}\n")
    finally:
        if own:
            fh.close()


@dataclass(frozen=True)
class OrientationScan:
    """Grid-search specification for the orientation optimizer.

    Degenerate single-point ranges (lo == hi) are allowed; a non-degenerate
    range must contain at least two samples at the given step.
    """

    target: str = "bs"
    az_range: tuple[float, float] = (-180.0, 180.0)
    el_range: tuple[float, float] = (-90.0, 90.0)
    az_step: float = 5.0
    el_step: float = 5.0

    def __post_init__(self) -> None:
        if self.target not in ("bs", "ue", "both"):
            raise ValueError("target must be bs, ue, or both")
        if self.az_step <= 0.0 or self.el_step <= 0.0:
            raise ValueError("steps must be > 0")
        for (lo, hi), bound, name in (
            (self.az_range, 180.0, "az_range"),
            (self.el_range, 90.0, "el_range"),
        ):
            if lo > hi or lo < -bound or hi > bound:
                raise ValueError(f"{name} [{lo}, {hi}] invalid")
        if self.az_range[0] < self.az_range[1] and self.az_step > self.az_range[1] - self.az_range[0]:
            raise ValueError("az_step too large for az_range")
        if self.el_range[0] < self.el_range[1] and self.el_step > self.el_range[1] - self.el_range[0]:
            raise ValueError("el_step too large for el_range")

    def azimuths(self) -> np.ndarray:
        return _samples(self.az_range, self.az_step)

    def elevations(self) -> np.ndarray:
        return _samples(self.el_range, self.el_step)


def _samples(rng: tuple[float, float], step: float) -> np.ndarray:
    lo, hi = rng
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + np.arange(count, dtype=np.float64) * step


@dataclass(frozen=True)
class OrientationResult:
    """Optimizer output: best boresight per targeted antenna and achieved RSS."""

    target: str
    bs_orientation: tuple[float, float] | None
    ue_orientation: tuple[float, float] | None
    rss_dbm: float


def _gain_grid(
    antenna: UraAntenna,
    toward_az: float,
    toward_el: float,
    elevations: np.ndarray,
    azimuths: np.ndarray,
) -> np.ndarray:
    """Gains toward a fixed link direction for every candidate boresight,
    shaped (n_el, n_az): elevation outer, azimuth inner."""
    gains = np.empty((len(elevations), len(azimuths)), dtype=np.float64)
    for i, el in enumerate(elevations):
        for j, az in enumerate(azimuths):
            candidate = replace(antenna, azimuth_deg=float(az), tilt_deg=float(el))
            gains[i, j] = ura_gain(candidate, toward_az, toward_el)
    return gains


def optimize_orientation(
    scan: OrientationScan,
    bs: RadioEndpoint,
    ue: RadioEndpoint,
    frequency_mhz: float,
    bandwidth_hz: float,
    model: str = "free_space",
    terrain: TerrainGrid | None = None,
    params: PropagationParams | None = None,
    direction: str = "downlink",
) -> OrientationResult:
    """Exhaustive grid search for the boresight(s) maximizing receiver RSS.

    Scan order is deterministic — elevation outer ascending, azimuth inner
    ascending, with the BS grid outer when both antennas are targeted — and
    the first maximum encountered wins ties. Pathloss is independent of
    antenna orientation, so RSS decomposes into a fixed term plus the
    targeted antennas' gains toward the link direction; the product search
    runs on that decomposition, which leaves the argmax and tie-breaking of
    the literal product scan unchanged.
    """
    targets_bs = scan.target in ("bs", "both")
    targets_ue = scan.target in ("ue", "both")
    if targets_bs and bs.antenna is None:
        raise ValueError("orientation undefined for isotropic antenna (bs)")
    if targets_ue and ue.antenna is None:
        raise ValueError("orientation undefined for isotropic antenna (ue)")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")

    tx, rx = (bs, ue) if direction == "downlink" else (ue, bs)
    az_fwd, el_fwd, az_rev, el_rev = _link_direction(tx, rx, terrain)
    bs_dir = (az_fwd, el_fwd) if direction == "downlink" else (az_rev, el_rev)
    ue_dir = (az_rev, el_rev) if direction == "downlink" else (az_fwd, el_fwd)

    base = evaluate_link(tx, rx, frequency_mhz, bandwidth_hz, model, terrain, params)
    elevations = scan.elevations()
    azimuths = scan.azimuths()

    if base.rss_dbm == NO_SIGNAL_DBM:
        first = (float(azimuths[0]), float(elevations[0]))
        return OrientationResult(
            target=scan.target,
            bs_orientation=first if targets_bs else None,
            ue_orientation=first if targets_ue else None,
            rss_dbm=NO_SIGNAL_DBM,
        )

    g_bs_now = base.tx_dir_gain_dbi if direction == "downlink" else base.rx_dir_gain_dbi
    g_ue_now = base.rx_dir_gain_dbi if direction == "downlink" else base.tx_dir_gain_dbi
    fixed = base.rss_dbm
    if targets_bs:
        fixed -= g_bs_now
    if targets_ue:
        fixed -= g_ue_now

    bs_orientation = ue_orientation = None
    if scan.target == "both":
        g_bs = _gain_grid(bs.antenna, *bs_dir, elevations, azimuths)
        g_ue = _gain_grid(ue.antenna, *ue_dir, elevations, azimuths)
        joint = g_bs.reshape(-1)[:, None] + g_ue.reshape(-1)[None, :]
        flat = int(np.argmax(joint))
        bi, ui = divmod(flat, joint.shape[1])
        bs_orientation = (float(azimuths[bi % len(azimuths)]), float(elevations[bi // len(azimuths)]))
        ue_orientation = (float(azimuths[ui % len(azimuths)]), float(elevations[ui // len(azimuths)]))
        best_rss = fixed + float(joint.reshape(-1)[flat])
    else:
        endpoint = bs if targets_bs else ue
        toward = bs_dir if targets_bs else ue_dir
        gains = _gain_grid(endpoint.antenna, *toward, elevations, azimuths)
        i, j = divmod(int(np.argmax(gains)), gains.shape[1])
        orientation = (float(azimuths[j]), float(elevations[i]))
        if targets_bs:
            bs_orientation = orientation
        else:
            ue_orientation = orientation
        best_rss = fixed + float(gains[i, j])

    return OrientationResult(
        target=scan.target,
        bs_orientation=bs_orientation,
        ue_orientation=ue_orientation,
        rss_dbm=best_rss,
    )
