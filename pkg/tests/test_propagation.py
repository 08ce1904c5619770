import math

import numpy as np
import pytest

from tvws.geodata import GeoCoordinate, haversine_distance
from tvws.propagation import (
    NO_SIGNAL_DBM,
    PropagationParams,
    SPEED_OF_LIGHT,
    free_space_pathloss,
    fresnel_parameter,
    knife_edge_loss,
    model_rss,
    profile_is_los,
    received_signal_strength,
    resolve_resolution_m,
    terrain_pathloss,
)
from tvws.terrain import TerrainProfile

from conftest import make_flat_grid


def make_profile(distances_km, elevations_m):
    return TerrainProfile(
        distances_km=np.asarray(distances_km, dtype=np.float64),
        elevations_m=np.asarray(elevations_m, dtype=np.float64),
        start=GeoCoordinate(0, 0),
        end=GeoCoordinate(0, 1),
    )


class TestFreeSpace:
    def test_reference_values(self):
        assert free_space_pathloss(1.0, 600.0) == pytest.approx(88.01, abs=0.01)
        assert free_space_pathloss(2.0, 600.0) == pytest.approx(94.03, abs=0.01)
        assert free_space_pathloss(1.0, 150.0) == pytest.approx(75.97, abs=0.01)

    def test_distance_doubling_adds_6db(self):
        delta = free_space_pathloss(2.0, 600.0) - free_space_pathloss(1.0, 600.0)
        assert delta == pytest.approx(20.0 * math.log10(2.0), abs=1e-12)

    def test_strictly_increasing(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            d = float(rng.uniform(0.01, 500))
            f = float(rng.uniform(50, 1000))
            assert free_space_pathloss(d * 1.01, f) > free_space_pathloss(d, f)
            assert free_space_pathloss(d, f * 1.01) > free_space_pathloss(d, f)

    def test_non_positive_inputs_rejected(self):
        with pytest.raises(ValueError):
            free_space_pathloss(0.0, 600.0)
        with pytest.raises(ValueError):
            free_space_pathloss(1.0, 0.0)


class TestFresnelParameter:
    def test_grazing_is_zero(self):
        assert fresnel_parameter(0.0, 1.0, 1.0, 600.0) == 0.0

    def test_sign_convention(self):
        above = fresnel_parameter(10.0, 1.0, 1.0, 600.0)
        below = fresnel_parameter(-10.0, 1.0, 1.0, 600.0)
        assert below == -above

    def test_hand_value(self):
        # lambda = c / 600 MHz = 0.49965 m; v = 10 * sqrt(2*2000 / (lambda * 1e6)).
        lam = SPEED_OF_LIGHT / 600e6
        expected = 10.0 * math.sqrt(2.0 * 2000.0 / (lam * 1000.0 * 1000.0))
        v = fresnel_parameter(10.0, 1.0, 1.0, 600.0)
        assert v == pytest.approx(expected, abs=1e-12)
        assert v == pytest.approx(0.894, abs=1e-3)

    def test_zero_segment_rejected(self):
        with pytest.raises(ValueError):
            fresnel_parameter(1.0, 0.0, 1.0, 600.0)


class TestKnifeEdge:
    def test_reference_values(self):
        assert knife_edge_loss(0.0) == pytest.approx(6.03, abs=0.01)
        assert knife_edge_loss(-0.78) == pytest.approx(0.0, abs=0.1)
        assert knife_edge_loss(2.4) == pytest.approx(20.54, abs=0.01)

    def test_zero_below_threshold(self):
        assert knife_edge_loss(-0.79) == 0.0
        assert knife_edge_loss(-5.0) == 0.0

    def test_monotone_and_continuous(self):
        v = np.arange(-1.0, 3.0, 0.01)
        j = knife_edge_loss(v)
        assert np.all(np.diff(j) >= 0.0)
        assert abs(knife_edge_loss(-0.78 + 1e-9) - knife_edge_loss(-0.78)) < 0.1

    def test_never_negative(self):
        v = np.linspace(-5, 10, 2001)
        assert np.all(knife_edge_loss(v) >= 0.0)


class TestTerrainPathloss:
    def test_flat_profile_equals_fspl(self):
        profile = make_profile(np.linspace(0, 1, 12), np.zeros(12))
        result = terrain_pathloss(profile, 10.0, 10.0, 600.0, PropagationParams())
        assert result.pathloss_db == pytest.approx(free_space_pathloss(1.0, 600.0), abs=0.02)
        assert result.los is True
        assert result.diffraction_db == 0.0

    def test_midpath_ridge_at_ray_height(self):
        # Ridge tuned so the curvature-corrected sample sits exactly on the ray:
        # v = 0 composes with J(0) = 6.03.
        params = PropagationParams()
        bulge = 0.5 * 0.5 * 1000.0 / (2.0 * params.effective_earth_factor * 6371.0)
        elev = np.zeros(3)
        elev[1] = 10.0 - bulge
        profile = make_profile([0.0, 0.5, 1.0], elev)
        result = terrain_pathloss(profile, 10.0, 10.0, 600.0, params)
        assert result.diffraction_db == pytest.approx(6.03, abs=0.05)
        assert result.pathloss_db == pytest.approx(free_space_pathloss(1.0, 600.0) + 6.03, abs=0.05)
        assert result.los is True  # grazing does not rise above the ray

    def test_ridge_far_below_ray(self):
        profile = make_profile(np.linspace(0, 1, 5), [0.0, 0.0, 1.0, 0.0, 0.0])
        result = terrain_pathloss(profile, 30.0, 30.0, 600.0, PropagationParams())
        assert result.diffraction_db == 0.0
        assert result.los is True

    def test_blocking_ridge_adds_loss_and_clears_los(self):
        profile = make_profile(np.linspace(0, 2, 9), [0, 0, 0, 0, 60, 0, 0, 0, 0])
        result = terrain_pathloss(profile, 10.0, 10.0, 600.0, PropagationParams())
        assert result.los is False
        assert result.diffraction_db > 6.0
        assert result.pathloss_db == result.fspl_db + result.diffraction_db

    def test_diffraction_never_negative_random_profiles(self):
        rng = np.random.default_rng(17)
        params = PropagationParams()
        for _ in range(100):
            n = int(rng.integers(3, 40))
            d = np.linspace(0, float(rng.uniform(0.5, 30)), n)
            e = rng.uniform(0, 200, n)
            profile = make_profile(d, e)
            result = terrain_pathloss(profile, 20.0, 10.0, 600.0, params)
            assert result.diffraction_db >= 0.0
            assert result.pathloss_db >= result.fspl_db

    def test_monotone_clearance_on_single_ridge(self):
        # Raising either antenna over a fixed obstructed profile never adds loss.
        params = PropagationParams()
        profile = make_profile(np.linspace(0, 4, 17), [0] * 8 + [80] + [0] * 8)
        losses = []
        for h in (5.0, 20.0, 40.0, 80.0, 120.0):
            losses.append(terrain_pathloss(profile, h, 10.0, 600.0, params).pathloss_db)
        assert all(b <= a + 1e-9 for a, b in zip(losses, losses[1:]))
        losses = []
        for h in (5.0, 20.0, 40.0, 80.0, 120.0):
            losses.append(terrain_pathloss(profile, 10.0, h, 600.0, params).pathloss_db)
        assert all(b <= a + 1e-9 for a, b in zip(losses, losses[1:]))

    def test_two_sample_profile_is_los_fspl(self):
        profile = make_profile([0.0, 1.0], [0.0, 0.0])
        result = terrain_pathloss(profile, 10.0, 10.0, 600.0, PropagationParams())
        assert result.diffraction_db == 0.0
        assert result.los is True

    def test_long_flat_path_loses_los_to_curvature(self):
        # 50 km between 10 m antennas is far beyond the combined 4/3-earth horizon.
        n = 101
        profile = make_profile(np.linspace(0, 50, n), np.zeros(n))
        result = terrain_pathloss(profile, 10.0, 10.0, 600.0, PropagationParams())
        assert result.los is False
        assert result.diffraction_db > 0.0


class TestRss:
    def test_arithmetic(self):
        assert received_signal_strength(60.0, 0.0, 120.0) == -60.0
        assert received_signal_strength(60.0, 10.0, 120.0) == -50.0
        assert received_signal_strength(80.0, 0.0, 88.01) == pytest.approx(-8.01, abs=1e-9)


class TestModelRss:
    def test_free_space_composition(self):
        tx = GeoCoordinate(0, 0)
        rx = GeoCoordinate(0, 0.01)
        params = PropagationParams()
        rss = model_rss("free_space", tx, 30.0, rx, 10.0, 60.0, 0.0, 600.0, None, params)
        d = haversine_distance(tx, rx)
        assert rss == received_signal_strength(60.0, 0.0, free_space_pathloss(d, 600.0))

    def test_terrain_on_flat_grid_matches_free_space(self):
        grid = make_flat_grid()
        tx = GeoCoordinate(0, 0)
        rx = GeoCoordinate(0, 0.02)
        params = PropagationParams()
        rss_fs = model_rss("free_space", tx, 10.0, rx, 10.0, 60.0, 0.0, 600.0, None, params)
        rss_tr = model_rss("terrain", tx, 10.0, rx, 10.0, 60.0, 0.0, 600.0, grid, params)
        assert rss_tr == pytest.approx(rss_fs, abs=0.02)

    def test_beyond_max_range_sentinel(self):
        params = PropagationParams(max_range_km=10.0)
        rss = model_rss(
            "free_space", GeoCoordinate(0, 0), 10.0, GeoCoordinate(1, 0), 10.0, 60.0, 0.0, 600.0, None, params
        )
        assert rss == NO_SIGNAL_DBM

    def test_unknown_model_rejected(self):
        with pytest.raises(ValueError, match="unknown propagation model"):
            model_rss(
                "tirem", GeoCoordinate(0, 0), 10.0, GeoCoordinate(0, 1), 10.0, 60.0, 0.0, 600.0, None, PropagationParams()
            )

    def test_deterministic(self):
        grid = make_flat_grid()
        args = ("terrain", GeoCoordinate(0, 0), 10.0, GeoCoordinate(0.3, 0.4), 10.0, 60.0, 0.0, 600.0, grid, PropagationParams())
        assert model_rss(*args) == model_rss(*args)


class TestParams:
    def test_defaults_valid(self):
        PropagationParams()

    def test_variability_bounds(self):
        with pytest.raises(ValueError):
            PropagationParams(time_variability=0.001)
        with pytest.raises(ValueError):
            PropagationParams(situation_variability=1.0)

    def test_refractivity_bounds(self):
        with pytest.raises(ValueError):
            PropagationParams(refractivity=249.0)

    def test_climate_zone_enum(self):
        with pytest.raises(ValueError):
            PropagationParams(climate_zone="lunar")

    def test_resolution_rules(self):
        assert resolve_resolution_m(PropagationParams(), 1000.0) == 90.0
        assert resolve_resolution_m(PropagationParams(), 1_000_000.0) == 500.0
        assert resolve_resolution_m(PropagationParams(resolution_m=30.0), 1_000_000.0) == 30.0
        with pytest.raises(ValueError):
            PropagationParams(resolution_m=0.0)
        with pytest.raises(ValueError):
            PropagationParams(resolution_m="fine")


class TestProfileLos:
    def test_matches_terrain_pathloss_flag(self):
        rng = np.random.default_rng(23)
        params = PropagationParams()
        for _ in range(50):
            n = int(rng.integers(3, 30))
            d = np.linspace(0, float(rng.uniform(1, 40)), n)
            e = rng.uniform(0, 150, n)
            profile = make_profile(d, e)
            flag = profile_is_los(profile, 15.0, 12.0, params)
            assert flag == terrain_pathloss(profile, 15.0, 12.0, 600.0, params).los
