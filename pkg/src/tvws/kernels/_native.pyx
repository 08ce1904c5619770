# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled diffraction kernels: Bullington knife-edge loss and radial RSS sweeps.

Mirrors tvws.kernels._pure exactly; see that module for the math notes.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport isnan, log10, sqrt

cnp.import_array()

cdef double EARTH_RADIUS_KM = 6371.0
cdef double SPEED_OF_LIGHT = 299792458.0

BACKEND = "native"


cdef inline double _j_knife(double v) noexcept nogil:
    cdef double j
    if v <= -0.78:
        return 0.0
    j = 6.9 + 20.0 * log10(sqrt((v - 0.1) * (v - 0.1) + 1.0) + v - 0.1)
    return j if j > 0.0 else 0.0


cdef int _bullington(
    const double* dist,
    const double* elev,
    Py_ssize_t n,
    double h_ts,
    double h_rs,
    double wavelength_m,
    double curve_coeff,
    double* loss_out,
) noexcept nogil:
    """Fill loss_out with J(v_bullington); return 1 if the path is LOS else 0."""
    cdef Py_ssize_t i
    cdef double total = dist[n - 1] - dist[0]
    cdef double di, rem, g, ray
    cdef double s_tim = -1e300
    cdef double s_rim = -1e300
    cdef double v, v_max, s_tr, denom, d_b, h_b, ray_b
    cdef int los = 1
    cdef int have_v = 0

    if n < 3:
        loss_out[0] = 0.0
        return 1

    s_tr = (h_rs - h_ts) / total
    for i in range(1, n - 1):
        di = dist[i] - dist[0]
        rem = total - di
        g = elev[i] + curve_coeff * di * rem
        ray = h_ts + (h_rs - h_ts) * di / total
        if g > ray:
            los = 0
        if (g - h_ts) / di > s_tim:
            s_tim = (g - h_ts) / di
        if (g - h_rs) / rem > s_rim:
            s_rim = (g - h_rs) / rem

    v_max = -1e300
    if s_tim >= s_tr:
        denom = s_tim + s_rim
        if denom > 0.0:
            d_b = (h_rs - h_ts + s_rim * total) / denom
            if 0.0 < d_b < total:
                h_b = h_ts + s_tim * d_b
                ray_b = h_ts + (h_rs - h_ts) * d_b / total
                v_max = (h_b - ray_b) * sqrt(
                    0.002 * total / (wavelength_m * d_b * (total - d_b))
                )
                have_v = 1
    if not have_v:
        for i in range(1, n - 1):
            di = dist[i] - dist[0]
            rem = total - di
            g = elev[i] + curve_coeff * di * rem
            ray = h_ts + (h_rs - h_ts) * di / total
            v = (g - ray) * sqrt(0.002 * total / (wavelength_m * di * rem))
            if v > v_max:
                v_max = v
    loss_out[0] = _j_knife(v_max)
    return los


def bullington_loss(
    cnp.ndarray[cnp.float64_t, ndim=1] dist_km,
    cnp.ndarray[cnp.float64_t, ndim=1] elev_m,
    double h_ts_m,
    double h_rs_m,
    double freq_mhz,
    double effective_earth_factor,
):
    cdef Py_ssize_t n = dist_km.shape[0]
    if n < 2:
        raise ValueError("profile requires >= 2 samples")
    if dist_km[n - 1] - dist_km[0] <= 0.0:
        raise ValueError("profile has no extent")
    cdef double wavelength_m = SPEED_OF_LIGHT / (freq_mhz * 1e6)
    cdef double curve_coeff = 1000.0 / (2.0 * effective_earth_factor * EARTH_RADIUS_KM)
    cdef double loss = 0.0
    cdef const double[::1] d = np.ascontiguousarray(dist_km)
    cdef const double[::1] e = np.ascontiguousarray(elev_m)
    cdef int los
    with nogil:
        los = _bullington(&d[0], &e[0], n, h_ts_m, h_rs_m, wavelength_m, curve_coeff, &loss)
    return loss, bool(los)


def rss_prefix_sweep(
    cnp.ndarray[cnp.float64_t, ndim=1] dist_km,
    cnp.ndarray[cnp.float64_t, ndim=1] elev_m,
    double tx_height_agl_m,
    double rx_height_agl_m,
    double freq_mhz,
    double effective_earth_factor,
    double eirp_plus_gain_dbm,
):
    cdef Py_ssize_t n = dist_km.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rss = np.full(n, np.nan, dtype=np.float64)
    cdef const double[::1] d = np.ascontiguousarray(dist_km)
    cdef const double[::1] e = np.ascontiguousarray(elev_m)
    cdef double[::1] out = rss
    cdef double wavelength_m = SPEED_OF_LIGHT / (freq_mhz * 1e6)
    cdef double curve_coeff = 1000.0 / (2.0 * effective_earth_factor * EARTH_RADIUS_KM)
    cdef double f_term = 32.45 + 20.0 * log10(freq_mhz)
    cdef double h_ts = e[0] + tx_height_agl_m
    cdef double h_rs, dk, dh_km, d3, loss
    cdef Py_ssize_t i
    with nogil:
        for i in range(1, n):
            h_rs = e[i] + rx_height_agl_m
            dk = d[i] - d[0]
            _bullington(&d[0], &e[0], i + 1, h_ts, h_rs, wavelength_m, curve_coeff, &loss)
            dh_km = (h_rs - h_ts) / 1000.0
            d3 = sqrt(dk * dk + dh_km * dh_km)
            out[i] = eirp_plus_gain_dbm - (f_term + 20.0 * log10(d3) + loss)
    return rss
