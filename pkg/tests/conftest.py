"""Shared fixtures: tiny channel plans, flat terrain rasters, and scan configs
small enough to brute-force."""

from __future__ import annotations

import numpy as np
import pytest

from tvws.geodata import GeoCoordinate, RegionBoundary
from tvws.propagation import PropagationParams
from tvws.scanner import ScanConfig
from tvws.spectrum import ChannelPlan, ChannelSegment, TvTower
from tvws.terrain import TerrainGrid

ALL_THRESHOLDS = {
    "low_vhf": {"a": -84.0, "d": -84.0},
    "high_vhf": {"a": -84.0, "d": -84.0},
    "uhf": {"a": -84.0, "d": -84.0},
}


@pytest.fixture
def uhf_plan() -> ChannelPlan:
    # Channels 13..20 in one contiguous segment: 14 -> 473 MHz at 6 MHz spacing.
    return ChannelPlan(
        segments=(ChannelSegment("uhf", 13, 20, 467.0),),
        bandwidth_mhz=6,
    )


@pytest.fixture
def split_plan() -> ChannelPlan:
    # A band gap between high VHF and UHF to exercise the adjacency rule.
    return ChannelPlan(
        segments=(
            ChannelSegment("high_vhf", 7, 13, 177.0),
            ChannelSegment("uhf", 14, 20, 473.0),
        ),
        bandwidth_mhz=6,
    )


def make_flat_grid(
    elevation: float = 0.0,
    lat0: float = -2.0,
    lon0: float = -2.0,
    cellsize: float = 0.05,
    n: int = 80,
) -> TerrainGrid:
    return TerrainGrid(
        ncols=n,
        nrows=n,
        xllcorner=lon0,
        yllcorner=lat0,
        cellsize=cellsize,
        nodata_value=-9999.0,
        elevations=np.full((n, n), elevation, dtype=np.float64),
    )


@pytest.fixture
def flat_grid() -> TerrainGrid:
    return make_flat_grid()


def make_tower(
    index: int,
    lat: float,
    lon: float,
    channel: int,
    erp_kw: float = 10.0,
    frequency_mhz: float | None = None,
    emission_class: str = "d",
    height_agl_m: float = 150.0,
) -> TvTower:
    if frequency_mhz is None:
        frequency_mhz = 467.0 + (channel - 13) * 6.0
    return TvTower(
        index=index,
        name=f"T{index}",
        location=GeoCoordinate(lat, lon),
        erp_kw=erp_kw,
        channel=channel,
        frequency_mhz=frequency_mhz,
        emission_class=emission_class,
        height_agl_m=height_agl_m,
        country="XX",
    )


def make_scan_config(plan: ChannelPlan, **overrides) -> ScanConfig:
    defaults = dict(
        boundary=RegionBoundary.circle(GeoCoordinate(0.0, 0.0), 10.0),
        pixel_size_km=2.0,
        plan=plan,
        channels=tuple(range(14, 21)),
        thresholds_dbm=ALL_THRESHOLDS,
        sep_co_km=6.0,
        sep_adj_km=2.0,
        params=PropagationParams(max_range_km=60.0, resolution_m=500.0),
        radials=8,
        compute_noise=True,
    )
    defaults.update(overrides)
    return ScanConfig(**defaults)
