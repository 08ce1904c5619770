import io

import pytest

from tvws.geodata import GeoCoordinate
from tvws.propagation import NO_SIGNAL_DBM
from tvws.query import (
    STATUS_AVAILABLE_USABLE,
    STATUS_UNAVAILABLE_OR_UNUSABLE,
    STATUS_UNKNOWN,
    infer_cell_size_deg,
    search_location,
)
from tvws.scanner import export_csv, import_csv, scan

from conftest import make_scan_config, make_tower


@pytest.fixture
def dataset(uhf_plan):
    cfg = make_scan_config(uhf_plan, channels=(14, 15, 16), reserved=(15,))
    towers = [make_tower(1, 0.02, 0.01, 14, erp_kw=0.5)]
    results = scan(cfg, towers)
    buf = io.StringIO()
    export_csv(results, cfg, buf)
    return cfg, import_csv(io.StringIO(buf.getvalue()))


class TestSearchLocation:
    def test_agrees_with_csv_at_every_pixel(self, dataset):
        cfg, ds = dataset
        for pixel in ds.pixels:
            result = search_location(ds, pixel.center.lat, pixel.center.lon, cfg.max_noise_dbm)
            assert result.pixel is pixel
            for n in ds.channels:
                avail = pixel.availability[n] == 1
                noise = pixel.noise_dbm[n]
                usable = noise == NO_SIGNAL_DBM or noise <= cfg.max_noise_dbm
                expected = (
                    STATUS_AVAILABLE_USABLE
                    if avail and usable
                    else STATUS_UNAVAILABLE_OR_UNUSABLE
                )
                assert result.statuses[n] == expected
            assert result.totals["available"] == pixel.total_available

    def test_reserved_channel_never_green(self, dataset):
        cfg, ds = dataset
        for pixel in ds.pixels:
            result = search_location(ds, pixel.center.lat, pixel.center.lon, cfg.max_noise_dbm)
            assert result.statuses[15] == STATUS_UNAVAILABLE_OR_UNUSABLE

    def test_outside_region_all_unknown(self, dataset):
        cfg, ds = dataset
        result = search_location(ds, 45.0, 45.0, cfg.max_noise_dbm)
        assert result.pixel is None
        assert set(result.statuses.values()) == {STATUS_UNKNOWN}

    def test_point_within_cell_bounds_matches(self, dataset):
        cfg, ds = dataset
        cell = infer_cell_size_deg(ds)
        assert cell is not None
        dlat, dlon = cell
        target = ds.pixels[0]
        inside = search_location(
            ds, target.center.lat + 0.4 * dlat, target.center.lon - 0.4 * dlon, cfg.max_noise_dbm
        )
        assert inside.pixel is target

    def test_point_just_past_region_edge_unknown(self, dataset):
        cfg, ds = dataset
        cell = infer_cell_size_deg(ds)
        dlat, _ = cell
        north = max(p.center.lat for p in ds.pixels)
        result = search_location(ds, north + dlat, 0.0, cfg.max_noise_dbm)
        assert result.pixel is None

    def test_max_noise_monotone(self, dataset):
        # Raising the usability threshold can only turn red cells green.
        cfg, ds = dataset
        for pixel in ds.pixels:
            strict = search_location(ds, pixel.center.lat, pixel.center.lon, -120.0)
            loose = search_location(ds, pixel.center.lat, pixel.center.lon, -10.0)
            for n in ds.channels:
                if strict.statuses[n] == STATUS_AVAILABLE_USABLE:
                    assert loose.statuses[n] == STATUS_AVAILABLE_USABLE

    def test_no_noise_dataset_green_when_available(self, uhf_plan):
        cfg = make_scan_config(uhf_plan, channels=(14,), compute_noise=False)
        results = scan(cfg, [])
        buf = io.StringIO()
        export_csv(results, cfg, buf)
        ds = import_csv(io.StringIO(buf.getvalue()))
        assert not ds.has_noise
        pixel = ds.pixels[0]
        result = search_location(ds, pixel.center.lat, pixel.center.lon, cfg.max_noise_dbm)
        assert result.statuses[14] == STATUS_AVAILABLE_USABLE
        assert result.noise_dbm is None
