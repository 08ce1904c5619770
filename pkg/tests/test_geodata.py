import math

import numpy as np
import pytest

from tvws.geodata import (
    EARTH_RADIUS_KM,
    GeoCoordinate,
    KM_PER_DEGREE,
    RegionBoundary,
    auto_boundary,
    boundary_contains,
    build_pixel_grid,
    destination_point,
    haversine_distance,
    initial_bearing,
    intermediate_points,
)


class TestGeoCoordinate:
    def test_latitude_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            GeoCoordinate(95.0, 0.0)
        with pytest.raises(ValueError):
            GeoCoordinate(-90.001, 0.0)

    def test_longitude_normalized(self):
        assert GeoCoordinate(0.0, 180.0).lon == -180.0
        assert GeoCoordinate(0.0, 270.0).lon == -90.0
        assert GeoCoordinate(0.0, -180.0).lon == -180.0
        assert GeoCoordinate(0.0, 540.0).lon == -180.0


class TestHaversine:
    def test_identity(self):
        p = GeoCoordinate(10.0, 20.0)
        assert haversine_distance(p, p) == 0.0

    def test_one_degree_meridian(self):
        # 2*pi*R/360, evaluated by hand.
        d = haversine_distance(GeoCoordinate(0, 0), GeoCoordinate(1, 0))
        assert d == pytest.approx(2.0 * math.pi * EARTH_RADIUS_KM / 360.0, abs=1e-9)
        assert d == pytest.approx(111.195, abs=1e-3)

    def test_antipodal_on_equator(self):
        d = haversine_distance(GeoCoordinate(0, 0), GeoCoordinate(0, 180))
        assert d == pytest.approx(math.pi * EARTH_RADIUS_KM, abs=1e-6)
        assert d == pytest.approx(20015.1, abs=0.1)

    def test_symmetry_and_triangle_inequality_random(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            pts = [
                GeoCoordinate(float(rng.uniform(-89, 89)), float(rng.uniform(-179, 179)))
                for _ in range(3)
            ]
            ab = haversine_distance(pts[0], pts[1])
            ba = haversine_distance(pts[1], pts[0])
            assert ab == pytest.approx(ba, abs=1e-9)
            ac = haversine_distance(pts[0], pts[2])
            cb = haversine_distance(pts[2], pts[1])
            assert ab <= ac + cb + 1e-9


class TestBearing:
    def test_cardinal_directions(self):
        origin = GeoCoordinate(0, 0)
        assert initial_bearing(origin, GeoCoordinate(1, 0)) == pytest.approx(0.0, abs=1e-12)
        assert initial_bearing(origin, GeoCoordinate(0, 1)) == pytest.approx(90.0, abs=1e-12)
        assert initial_bearing(origin, GeoCoordinate(-1, 0)) == pytest.approx(180.0, abs=1e-12)
        assert initial_bearing(origin, GeoCoordinate(0, -1)) == pytest.approx(270.0, abs=1e-12)

    def test_coincident_points_rejected(self):
        p = GeoCoordinate(5, 5)
        with pytest.raises(ValueError):
            initial_bearing(p, p)


class TestDestination:
    def test_zero_distance_returns_origin(self):
        origin = GeoCoordinate(5, 5)
        assert destination_point(origin, 123.0, 0.0) == origin

    def test_one_degree_north(self):
        d = haversine_distance(GeoCoordinate(0, 0), GeoCoordinate(1, 0))
        p = destination_point(GeoCoordinate(0, 0), 0.0, d)
        assert p.lat == pytest.approx(1.0, abs=1e-6)
        assert p.lon == pytest.approx(0.0, abs=1e-6)

    def test_one_degree_east_on_equator(self):
        d = haversine_distance(GeoCoordinate(0, 0), GeoCoordinate(0, 1))
        p = destination_point(GeoCoordinate(0, 0), 90.0, d)
        assert p.lat == pytest.approx(0.0, abs=1e-6)
        assert p.lon == pytest.approx(1.0, abs=1e-6)

    def test_roundtrip_bearing_distance_random(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            a = GeoCoordinate(float(rng.uniform(-80, 80)), float(rng.uniform(-179, 179)))
            b = GeoCoordinate(float(rng.uniform(-80, 80)), float(rng.uniform(-179, 179)))
            if haversine_distance(a, b) < 1e-6 or haversine_distance(a, b) > 19000:
                continue
            back = destination_point(a, initial_bearing(a, b), haversine_distance(a, b))
            assert back.lat == pytest.approx(b.lat, abs=1e-6)
            assert abs(back.lon - b.lon) % 360.0 == pytest.approx(0.0, abs=1e-6)

    def test_negative_distance_rejected(self):
        with pytest.raises(ValueError):
            destination_point(GeoCoordinate(0, 0), 0.0, -1.0)


class TestIntermediatePoints:
    def test_endpoints_exact(self):
        a = GeoCoordinate(10, 20)
        b = GeoCoordinate(12, 25)
        lats, lons = intermediate_points(a, b, np.array([0.0, 1.0]))
        assert lats[0] == pytest.approx(a.lat, abs=1e-12)
        assert lons[0] == pytest.approx(a.lon, abs=1e-12)
        assert lats[1] == pytest.approx(b.lat, abs=1e-12)
        assert lons[1] == pytest.approx(b.lon, abs=1e-12)

    def test_reversal_bit_identical(self):
        a = GeoCoordinate(3.1, -7.2)
        b = GeoCoordinate(4.9, -5.8)
        f = np.linspace(0.0, 1.0, 17)
        lat_fwd, lon_fwd = intermediate_points(a, b, f)
        lat_rev, lon_rev = intermediate_points(b, a, 1.0 - f)
        assert np.array_equal(lat_fwd, lat_rev)
        assert np.array_equal(lon_fwd, lon_rev)


class TestBoundary:
    def test_circle_membership(self):
        b = RegionBoundary.circle(GeoCoordinate(0, 0), 10.0)
        assert b.contains(GeoCoordinate(0, 0))
        # One degree of latitude is ~111 km, far outside a 10 km circle.
        assert not b.contains(GeoCoordinate(1, 0))

    def test_circle_radius_positive(self):
        with pytest.raises(ValueError):
            RegionBoundary.circle(GeoCoordinate(0, 0), 0.0)

    def test_polygon_unit_square(self):
        square = RegionBoundary.polygon(
            [GeoCoordinate(0, 0), GeoCoordinate(0, 1), GeoCoordinate(1, 1), GeoCoordinate(1, 0)]
        )
        assert square.contains(GeoCoordinate(0.5, 0.5))
        assert not square.contains(GeoCoordinate(1.5, 0.5))
        # Edges and vertices are inclusive.
        assert square.contains(GeoCoordinate(0.0, 0.5))
        assert square.contains(GeoCoordinate(0.0, 0.0))
        assert boundary_contains(square, GeoCoordinate(1.0, 1.0))

    def test_polygon_accepts_closed_ring(self):
        ring = [GeoCoordinate(0, 0), GeoCoordinate(0, 1), GeoCoordinate(1, 1), GeoCoordinate(0, 0)]
        b = RegionBoundary.polygon(ring)
        assert len(b.ring) == 3

    def test_polygon_requires_three_distinct(self):
        with pytest.raises(ValueError):
            RegionBoundary.polygon([GeoCoordinate(0, 0), GeoCoordinate(0, 1), GeoCoordinate(0, 0)])

    def test_auto_contains_everything(self):
        assert RegionBoundary.auto().contains(GeoCoordinate(89, 179))

    def test_geojson_polygon(self, tmp_path):
        path = tmp_path / "region.geojson"
        path.write_text(
            '{"type": "Polygon", "coordinates": [[[0,0],[1,0],[1,1],[0,1],[0,0]]]}',
            encoding="utf-8",
        )
        b = RegionBoundary.from_geojson_file(path)
        assert b.contains(GeoCoordinate(0.5, 0.5))

    def test_geojson_holes_rejected(self):
        geom = {
            "type": "Polygon",
            "coordinates": [
                [[0, 0], [4, 0], [4, 4], [0, 4], [0, 0]],
                [[1, 1], [2, 1], [2, 2], [1, 2], [1, 1]],
            ],
        }
        with pytest.raises(ValueError, match="holes"):
            RegionBoundary.from_geojson(geom)

    def test_geojson_non_polygon_rejected(self):
        with pytest.raises(ValueError, match="Polygon"):
            RegionBoundary.from_geojson({"type": "Point", "coordinates": [0, 0]})


class _Sited:
    def __init__(self, lat, lon):
        self.location = GeoCoordinate(lat, lon)


class TestAutoBoundary:
    def test_single_tower_expansion(self):
        b = auto_boundary([_Sited(0, 0)], 111.195)
        lat_min, lat_max, lon_min, lon_max = b.bounding_box()
        assert lat_min == pytest.approx(-1.0, abs=1e-3)
        assert lat_max == pytest.approx(1.0, abs=1e-3)
        assert lon_min == pytest.approx(-1.0, abs=1e-3)
        assert lon_max == pytest.approx(1.0, abs=1e-3)

    def test_two_towers_no_expansion(self):
        b = auto_boundary([_Sited(0, 0), _Sited(2, 2)], 0.0)
        assert b.bounding_box() == (0.0, 2.0, 0.0, 2.0)

    def test_degenerate_point_box_contains_tower(self):
        b = auto_boundary([_Sited(5, 5)], 0.0)
        assert b.contains(GeoCoordinate(5, 5))

    def test_empty_towers_rejected(self):
        with pytest.raises(ValueError):
            auto_boundary([], 10.0)


class TestPixelGrid:
    def test_tiny_circle_single_pixel(self):
        b = RegionBoundary.circle(GeoCoordinate(0, 0), 0.5)
        grid = build_pixel_grid(b, 2.0)
        assert grid.unmasked_count == 1
        _, _, center = next(grid.unmasked_centers())
        assert center.lat == pytest.approx(0.0, abs=1e-9)
        assert center.lon == pytest.approx(0.0, abs=1e-9)

    def test_square_tiling_2x2(self):
        half_deg = 2.0 / KM_PER_DEGREE  # 4 km x 4 km square centered at origin
        b = RegionBoundary.polygon(
            [
                GeoCoordinate(-half_deg, -half_deg),
                GeoCoordinate(-half_deg, half_deg),
                GeoCoordinate(half_deg, half_deg),
                GeoCoordinate(half_deg, -half_deg),
            ]
        )
        grid = build_pixel_grid(b, 2.0)
        assert (grid.rows, grid.cols) == (2, 2)
        assert grid.unmasked_count == 4

    def test_every_unmasked_center_inside_boundary(self):
        b = RegionBoundary.circle(GeoCoordinate(10, 10), 7.0)
        grid = build_pixel_grid(b, 1.5)
        assert grid.unmasked_count > 0
        for _, _, center in grid.unmasked_centers():
            assert b.contains(center)

    def test_deterministic_construction(self):
        b = RegionBoundary.circle(GeoCoordinate(3, 4), 9.0)
        g1 = build_pixel_grid(b, 2.0)
        g2 = build_pixel_grid(b, 2.0)
        assert g1 == g2
        c1 = [(c.lat, c.lon) for _, _, c in g1.unmasked_centers()]
        c2 = [(c.lat, c.lon) for _, _, c in g2.unmasked_centers()]
        assert c1 == c2  # bit-identical centers

    def test_row_major_from_northwest(self):
        b = RegionBoundary.circle(GeoCoordinate(0, 0), 5.0)
        grid = build_pixel_grid(b, 2.0)
        centers = [c for _, _, c in grid.unmasked_centers()]
        lats = [c.lat for c in centers]
        assert lats == sorted(lats, reverse=True) or grid.cols > 1
        first, last = centers[0], centers[-1]
        assert first.lat >= last.lat

    def test_pixel_size_positive(self):
        with pytest.raises(ValueError):
            build_pixel_grid(RegionBoundary.circle(GeoCoordinate(0, 0), 1.0), 0.0)

    def test_auto_boundary_rejected_without_resolution(self):
        with pytest.raises(ValueError):
            build_pixel_grid(RegionBoundary.auto(), 1.0)
