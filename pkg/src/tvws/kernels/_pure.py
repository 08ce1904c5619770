"""Pure-numpy diffraction kernels; fallback when the compiled extension is absent.

The hot loop of a terrain scan is the per-path Bullington construction: a
single equivalent knife edge built from the maximum upward slopes seen from
each end of an earth-curvature-corrected profile, scored with the ITU-R P.526
approximation J(v). Both backends implement the same two entry points:

    bullington_loss(...)  -> (diffraction_db, los) for one full path
    rss_prefix_sweep(...) -> RSS at every interior sample of a radial profile
"""

from __future__ import annotations

import math

import numpy as np

EARTH_RADIUS_KM = 6371.0
SPEED_OF_LIGHT = 299_792_458.0

BACKEND = "pure"


def knife_edge_loss_v(v: float) -> float:
    """J(v): single knife-edge diffraction loss in dB, 0 for v <= -0.78."""
    if v <= -0.78:
        return 0.0
    j = 6.9 + 20.0 * math.log10(math.sqrt((v - 0.1) ** 2 + 1.0) + v - 0.1)
    return j if j > 0.0 else 0.0


def bullington_loss(
    dist_km: np.ndarray,
    elev_m: np.ndarray,
    h_ts_m: float,
    h_rs_m: float,
    freq_mhz: float,
    effective_earth_factor: float,
) -> tuple[float, bool]:
    """Bullington equivalent knife-edge loss over one profile.

    dist_km/elev_m describe the terrain between the endpoints; h_ts_m/h_rs_m
    are the antenna tops in meters AMSL. Effective-earth curvature raises the
    plotted terrain by d1*d2/(2*k*R) relative to the straight ray (equivalently
    the ray sags by that amount), so clearance shrinks mid-path. Returns the
    loss in dB and whether the corrected path is line-of-sight.
    """
    n = dist_km.shape[0]
    if n < 2:
        raise ValueError("profile requires >= 2 samples")
    total = float(dist_km[-1] - dist_km[0])
    if total <= 0.0:
        raise ValueError("profile has no extent")
    if n < 3:
        return 0.0, True

    wavelength_m = SPEED_OF_LIGHT / (freq_mhz * 1e6)
    curve_coeff = 1000.0 / (2.0 * effective_earth_factor * EARTH_RADIUS_KM)

    di = np.asarray(dist_km[1:-1], dtype=np.float64)
    rem = total - di
    g = np.asarray(elev_m[1:-1], dtype=np.float64) + curve_coeff * di * rem
    ray = h_ts_m + (h_rs_m - h_ts_m) * di / total
    los = not bool(np.any(g > ray))

    s_tim = float(np.max((g - h_ts_m) / di))
    s_tr = (h_rs_m - h_ts_m) / total

    v_max = None
    if s_tim >= s_tr:
        # Trans-horizon: intersect the steepest tangents from each end.
        s_rim = float(np.max((g - h_rs_m) / rem))
        denom = s_tim + s_rim
        if denom > 0.0:
            d_b = (h_rs_m - h_ts_m + s_rim * total) / denom
            if 0.0 < d_b < total:
                h_b = h_ts_m + s_tim * d_b
                ray_b = h_ts_m + (h_rs_m - h_ts_m) * d_b / total
                v_max = (h_b - ray_b) * math.sqrt(
                    0.002 * total / (wavelength_m * d_b * (total - d_b))
                )
    if v_max is None:
        # Line-of-sight (or degenerate grazing): worst obstruction parameter.
        v = (g - ray) * np.sqrt(0.002 * total / (wavelength_m * di * rem))
        v_max = float(np.max(v))
    return knife_edge_loss_v(v_max), los


def rss_prefix_sweep(
    dist_km: np.ndarray,
    elev_m: np.ndarray,
    tx_height_agl_m: float,
    rx_height_agl_m: float,
    freq_mhz: float,
    effective_earth_factor: float,
    eirp_plus_gain_dbm: float,
) -> np.ndarray:
    """RSS at every interior sample of a radial profile, receiver on the terrain.

    For each sample i >= 1 the receiver sits at elev[i] + rx_height and the
    pathloss is FSPL over the 3-D prefix length plus the Bullington loss of
    the prefix. Index 0 (the transmitter itself) is returned as NaN.
    """
    n = dist_km.shape[0]
    rss = np.full(n, np.nan, dtype=np.float64)
    h_ts = float(elev_m[0]) + tx_height_agl_m
    f_term = 32.45 + 20.0 * math.log10(freq_mhz)
    for i in range(1, n):
        h_rs = float(elev_m[i]) + rx_height_agl_m
        d = float(dist_km[i])
        loss, _ = bullington_loss(
            dist_km[: i + 1], elev_m[: i + 1], h_ts, h_rs, freq_mhz, effective_earth_factor
        )
        d3 = math.hypot(d, (h_rs - h_ts) / 1000.0)
        fspl = f_term + 20.0 * math.log10(d3)
        rss[i] = eirp_plus_gain_dbm - (fspl + loss)
    return rss
