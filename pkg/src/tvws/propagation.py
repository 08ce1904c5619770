"""Pathloss and received-signal-strength models behind a pluggable interface.

Two models ship: `free_space`, and `terrain` — free-space loss over the 3-D
path length plus an earth-curvature-corrected Bullington knife edge. The
terrain model fills the interface slot normally occupied by licensed or
heavier irregular-terrain models; PropagationParams keeps their full
parameter surface so one can be added without API changes. Polarization,
variability, conductivity, permittivity, humidity, and climate zone are
validated and stored but do not alter the baseline models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .geodata import GeoCoordinate, haversine_distance
from .terrain import TerrainGrid, TerrainProfile, extract_profile

SPEED_OF_LIGHT = 299_792_458.0

#: RSS reported when there is no signal at all (also used for "no noise").
NO_SIGNAL_DBM = -1000.0

MODEL_IDS = ("free_space", "terrain")

CLIMATE_ZONES = (
    "continental_temperate",
    "equatorial",
    "continental_subtropical",
    "maritime_subtropical",
    "desert",
    "maritime_over_land",
    "maritime_over_sea",
)

POLARIZATIONS = ("horizontal", "vertical")


@dataclass(frozen=True)
class PropagationParams:
    """Propagation model controls. The baseline models consume only
    effective_earth_factor, max_range_km, and resolution_m; the remaining
    fields are validated and carried for model plug-ins."""

    polarization: str = "horizontal"
    time_variability: float = 0.5
    situation_variability: float = 0.5
    ground_conductivity: float = 0.005
    ground_permittivity: float = 15.0
    refractivity: float = 301.0
    humidity: float = 9.0
    climate_zone: str = "continental_temperate"
    effective_earth_factor: float = 4.0 / 3.0
    max_range_km: float = 100.0
    resolution_m: float | str = "auto"

    def __post_init__(self) -> None:
        if self.polarization not in POLARIZATIONS:
            raise ValueError(f"polarization must be one of {POLARIZATIONS}")
        for name in ("time_variability", "situation_variability"):
            v = getattr(self, name)
            if not 0.001 < v < 0.999:
                raise ValueError(f"{name} {v!r} outside (0.001, 0.999)")
        if self.ground_conductivity <= 0.0:
            raise ValueError("ground_conductivity must be > 0")
        if self.ground_permittivity < 1.0:
            raise ValueError("ground_permittivity must be >= 1")
        if not 250.0 <= self.refractivity <= 400.0:
            raise ValueError(f"refractivity {self.refractivity!r} outside [250, 400]")
        if not 0.0 <= self.humidity <= 110.0:
            raise ValueError(f"humidity {self.humidity!r} outside [0, 110]")
        if self.climate_zone not in CLIMATE_ZONES:
            raise ValueError(f"climate_zone must be one of {CLIMATE_ZONES}")
        if self.effective_earth_factor <= 0.0:
            raise ValueError("effective_earth_factor must be > 0")
        if self.max_range_km <= 0.0:
            raise ValueError("max_range_km must be > 0")
        if isinstance(self.resolution_m, str):
            if self.resolution_m != "auto":
                raise ValueError("resolution_m must be 'auto' or a positive number of meters")
        elif self.resolution_m <= 0.0:
            raise ValueError("resolution_m must be > 0")


def resolve_resolution_m(params: PropagationParams, path_length_m: float) -> float:
    """Profile sample spacing in meters; 'auto' is max(90 m, length / 2000)."""
    if params.resolution_m == "auto":
        return max(90.0, path_length_m / 2000.0)
    return float(params.resolution_m)


@dataclass(frozen=True)
class PathlossResult:
    """Decomposed pathloss: total = free-space component + diffraction component."""

    pathloss_db: float
    fspl_db: float
    diffraction_db: float
    los: bool


def free_space_pathloss(distance_km: float, frequency_mhz: float) -> float:
    """Free-space loss in dB: 32.45 + 20 log10(d_km) + 20 log10(f_MHz)."""
    if distance_km <= 0.0:
        raise ValueError(f"distance {distance_km!r} must be > 0")
    if frequency_mhz <= 0.0:
        raise ValueError(f"frequency {frequency_mhz!r} must be > 0")
    return 32.45 + 20.0 * math.log10(distance_km) + 20.0 * math.log10(frequency_mhz)


def fresnel_parameter(h_m: float, d1_km: float, d2_km: float, frequency_mhz: float) -> float:
    """Knife-edge diffraction parameter v for an obstacle h_m above the direct ray."""
    if d1_km <= 0.0 or d2_km <= 0.0:
        raise ValueError("both path segments must have positive length")
    wavelength_m = SPEED_OF_LIGHT / (frequency_mhz * 1e6)
    d1 = d1_km * 1000.0
    d2 = d2_km * 1000.0
    return h_m * math.sqrt(2.0 * (d1 + d2) / (wavelength_m * d1 * d2))


def knife_edge_loss(v):
    """Single knife-edge loss J(v) in dB; 0 for v <= -0.78, never negative.

    Accepts scalars or numpy arrays.
    """
    v_arr = np.asarray(v, dtype=np.float64)
    arg = np.sqrt((v_arr - 0.1) ** 2 + 1.0) + v_arr - 0.1
    j = 6.9 + 20.0 * np.log10(np.maximum(arg, 1e-300))
    out = np.where(v_arr > -0.78, np.maximum(j, 0.0), 0.0)
    if np.isscalar(v) or getattr(v, "ndim", 1) == 0:
        return float(out)
    return out


def terrain_pathloss(
    profile: TerrainProfile,
    tx_height_agl_m: float,
    rx_height_agl_m: float,
    frequency_mhz: float,
    params: PropagationParams,
) -> PathlossResult:
    """Composite terrain loss over a profile: FSPL(3-D length) + Bullington J(v).

    Antennas sit at terrain + AGL height at the profile endpoints. The LOS
    flag is true iff no curvature-corrected sample rises above the direct ray.
    """
    if tx_height_agl_m < 0.0 or rx_height_agl_m < 0.0:
        raise ValueError("antenna heights must be >= 0")
    if frequency_mhz <= 0.0:
        raise ValueError(f"frequency {frequency_mhz!r} must be > 0")
    dist = np.ascontiguousarray(profile.distances_km, dtype=np.float64)
    elev = np.ascontiguousarray(profile.elevations_m, dtype=np.float64)
    h_ts = float(elev[0]) + tx_height_agl_m
    h_rs = float(elev[-1]) + rx_height_agl_m
    loss_db, los = kernels.bullington_loss(
        dist, elev, h_ts, h_rs, frequency_mhz, params.effective_earth_factor
    )
    d3_km = math.hypot(profile.length_km, (h_rs - h_ts) / 1000.0)
    fspl = free_space_pathloss(d3_km, frequency_mhz)
    return PathlossResult(
        pathloss_db=fspl + loss_db,
        fspl_db=fspl,
        diffraction_db=loss_db,
        los=los,
    )


def profile_is_los(
    profile: TerrainProfile,
    tx_height_agl_m: float,
    rx_height_agl_m: float,
    params: PropagationParams,
) -> bool:
    """True iff no curvature-corrected profile sample rises above the direct
    ray between the antenna tops. Matches the LOS flag of terrain_pathloss."""
    dist = np.asarray(profile.distances_km, dtype=np.float64)
    elev = np.asarray(profile.elevations_m, dtype=np.float64)
    if len(dist) < 3:
        return True
    total = float(dist[-1])
    h_ts = float(elev[0]) + tx_height_agl_m
    h_rs = float(elev[-1]) + rx_height_agl_m
    coeff = 1000.0 / (2.0 * params.effective_earth_factor * 6371.0)
    di = dist[1:-1]
    g = elev[1:-1] + coeff * di * (total - di)
    ray = h_ts + (h_rs - h_ts) * di / total
    return not bool(np.any(g > ray))


def received_signal_strength(eirp_dbm: float, rx_gain_dbi: float, pathloss_db: float) -> float:
    """RSS = EIRP + receive gain - pathloss, all in dB terms."""
    return eirp_dbm + rx_gain_dbi - pathloss_db


def model_rss(
    model: str,
    tx: GeoCoordinate,
    tx_height_agl_m: float,
    rx: GeoCoordinate,
    rx_height_agl_m: float,
    eirp_dbm: float,
    rx_gain_dbi: float,
    frequency_mhz: float,
    terrain: TerrainGrid | None,
    params: PropagationParams,
) -> float:
    """RSS at rx from a transmitter at tx under the selected model.

    Receivers beyond params.max_range_km get the no-signal sentinel. The
    free_space model uses the great-circle ground distance; the terrain model
    extracts a profile at the configured resolution.
    """
    if model not in MODEL_IDS:
        raise ValueError(f"unknown propagation model {model!r}")
    distance_km = haversine_distance(tx, rx)
    if distance_km == 0.0:
        raise ValueError("transmitter and receiver are coincident")
    if distance_km > params.max_range_km:
        return NO_SIGNAL_DBM
    if model == "free_space":
        pl = free_space_pathloss(distance_km, frequency_mhz)
    else:
        spacing = resolve_resolution_m(params, distance_km * 1000.0)
        profile = extract_profile(terrain, tx, rx, spacing)
        pl = terrain_pathloss(
            profile, tx_height_agl_m, rx_height_agl_m, frequency_mhz, params
        ).pathloss_db
    return received_signal_strength(eirp_dbm, rx_gain_dbi, pl)
