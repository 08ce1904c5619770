"""Acceptance suite: every release criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion. Each test prints `ACCEPTANCE <name>: PASS|FAIL`.
"""

import io
import json
import math
import os
import threading
import time
from contextlib import contextmanager
from dataclasses import replace

import numpy as np
import pytest

from tvws.cli import main
from tvws.geodata import GeoCoordinate, KM_PER_DEGREE, RegionBoundary
from tvws.propagation import PropagationParams, free_space_pathloss, knife_edge_loss
from tvws.rfplan import (
    OrientationScan,
    RadioEndpoint,
    UraAntenna,
    evaluate_link,
    noise_power_dbm,
    optimize_orientation,
    pathloss_from_budget,
    shannon_capacity_mbps,
)
from tvws.scanner import export_csv, import_csv, protected_contour, scan
from tvws.service import make_server
from tvws.spectrum import ChannelPlan, ChannelSegment

from conftest import make_scan_config, make_tower
from test_interface import TOWERS_CSV, http, scan_config_doc, wait_for_job
from test_scanner import PLAN_600, contour_config, oracle_scan, tower_600


@contextmanager
def criterion(name):
    try:
        yield
    except Exception:
        print(f"\nACCEPTANCE {name}: FAIL")
        raise
    print(f"\nACCEPTANCE {name}: PASS")


UHF_PLAN = ChannelPlan((ChannelSegment("uhf", 13, 21, 467.0),), 6)


def test_fspl_reference():
    with criterion("free-space pathloss"):
        assert free_space_pathloss(1.0, 600.0) == pytest.approx(88.01, abs=0.01)
        doubling = free_space_pathloss(2.0, 600.0) - free_space_pathloss(1.0, 600.0)
        assert doubling == pytest.approx(6.02, abs=0.001)


def test_knife_edge_reference():
    with criterion("knife-edge diffraction"):
        assert knife_edge_loss(0.0) == pytest.approx(6.03, abs=0.01)
        assert knife_edge_loss(-0.78) == pytest.approx(0.0, abs=0.1)
        v = np.arange(-1.0, 3.0 + 1e-12, 0.01)
        j = knife_edge_loss(v)
        assert np.all(np.diff(j) >= 0.0)


def test_link_identities():
    with criterion("link-budget identities"):
        assert noise_power_dbm(6.0, 6e6) == pytest.approx(-100.22, abs=0.01)
        assert shannon_capacity_mbps(0.0, 6e6) == pytest.approx(6.0, abs=1e-6)

        rng = np.random.default_rng(2024)
        for _ in range(1000):
            tx = RadioEndpoint(
                location=GeoCoordinate(float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1))),
                height_agl_m=float(rng.uniform(1, 80)),
                tx_power_dbm=float(rng.uniform(0, 46)),
                cable_loss_db=float(rng.uniform(0, 6)),
                noise_figure_db=float(rng.uniform(0, 12)),
                antenna=None
                if rng.random() < 0.5
                else UraAntenna(
                    rows=int(rng.integers(1, 5)),
                    cols=int(rng.integers(1, 5)),
                    azimuth_deg=float(rng.uniform(-180, 180)),
                    tilt_deg=float(rng.uniform(-60, 60)),
                ),
            )
            rx = RadioEndpoint(
                location=GeoCoordinate(float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1))),
                height_agl_m=float(rng.uniform(1, 40)),
                cable_loss_db=float(rng.uniform(0, 4)),
                sensitivity_dbm=float(rng.uniform(-105, -60)),
                noise_figure_db=float(rng.uniform(0, 10)),
            )
            if tx.location == rx.location:
                continue
            bw = float(rng.uniform(1e6, 2e7))
            freq = float(rng.uniform(470, 700))
            m = evaluate_link(tx, rx, freq, bw, params=PropagationParams(max_range_km=40000.0))
            assert m.pathloss_db == pytest.approx(
                pathloss_from_budget(
                    tx.tx_power_dbm,
                    m.tx_dir_gain_dbi,
                    tx.cable_loss_db,
                    m.rx_dir_gain_dbi,
                    rx.cable_loss_db,
                    m.rss_dbm,
                ),
                abs=1e-9,
            )
            assert m.noise_power_dbm == pytest.approx(
                -174.0 + rx.noise_figure_db + 10.0 * math.log10(bw), abs=1e-9
            )
            assert m.snr_db == pytest.approx(m.rss_dbm - m.noise_power_dbm, abs=1e-9)
            assert m.capacity_mbps == pytest.approx(
                bw * math.log2(1.0 + 10.0 ** (m.snr_db / 10.0)) * 1e-6, abs=1e-9
            )
            assert m.fade_margin_db == pytest.approx(m.rss_dbm - rx.sensitivity_dbm, abs=1e-9)


def test_analytic_contour():
    with criterion("analytic protected contour"):
        started = time.monotonic()
        cfg = contour_config()  # EIRP 60 dBm, RSS threshold -60 dBm, 600 MHz, 90 m steps
        contour = protected_contour(tower_600(), cfg, tower_pos=0)
        elapsed = time.monotonic() - started
        step = 50.0 / math.ceil(50.0 * 1000.0 / 90.0)
        assert np.all(np.abs(contour.radii_km - 39.76) <= step)
        assert elapsed < 5.0


def _oracle_cfg_and_towers():
    half_deg = 12.0 / KM_PER_DEGREE  # 24 km x 24 km box -> 12x12 pixels at 2 km
    boundary = RegionBoundary.polygon(
        [
            GeoCoordinate(-half_deg, -half_deg),
            GeoCoordinate(-half_deg, half_deg),
            GeoCoordinate(half_deg, half_deg),
            GeoCoordinate(half_deg, -half_deg),
        ]
    )
    cfg = make_scan_config(
        UHF_PLAN,
        boundary=boundary,
        pixel_size_km=2.0,
        channels=tuple(range(14, 21)),
        reserved=(17,),
        sep_co_km=4.0,
        sep_adj_km=1.5,
        thresholds_dbm={"uhf": {"a": -60.0, "d": -60.0}},
        params=PropagationParams(max_range_km=40.0, resolution_m=1000.0),
        radials=8,
    )
    towers = [
        make_tower(1, 0.021, 0.034, 14, erp_kw=0.3),
        make_tower(2, -0.055, 0.012, 15, erp_kw=1.2),
        make_tower(3, 0.073, -0.066, 17, erp_kw=0.08),
        make_tower(4, -0.018, -0.092, 19, erp_kw=0.6),
        make_tower(5, 0.102, 0.088, 20, erp_kw=2.5),
    ]
    return cfg, towers


def test_oracle_scan_equivalence():
    with criterion("oracle scan equivalence (12x12, 5 towers)"):
        started = time.monotonic()
        cfg, towers = _oracle_cfg_and_towers()
        results = scan(cfg, towers)
        assert len(results) == 144
        expected = oracle_scan(cfg, towers, [p.center for p in results])
        for pixel, (avail, noise) in zip(results, expected):
            assert pixel.availability == avail
            for n in cfg.channels:
                assert pixel.noise_dbm[n] == pytest.approx(noise[n], abs=1e-9)
        assert time.monotonic() - started < 60.0


def test_structural_invariants():
    with criterion("structural invariants (randomized instances)"):
        rng = np.random.default_rng(77)
        for _ in range(110):
            channels = (14, 15, 16)
            reserved = (15,) if rng.random() < 0.5 else ()
            sep_co = float(rng.uniform(0.0, 8.0))
            sep_adj = float(rng.uniform(0.0, 4.0))
            cfg = make_scan_config(
                UHF_PLAN,
                boundary=RegionBoundary.circle(GeoCoordinate(0, 0), float(rng.uniform(3.5, 6.0))),
                pixel_size_km=2.0,
                channels=channels,
                reserved=reserved,
                sep_co_km=sep_co,
                sep_adj_km=sep_adj,
                thresholds_dbm={"uhf": {"a": -55.0, "d": -55.0}},
                params=PropagationParams(max_range_km=30.0, resolution_m=2000.0),
                radials=int(rng.integers(4, 17)),
            )
            n_towers = int(rng.integers(0, 4))
            towers = [
                make_tower(
                    i + 1,
                    float(rng.uniform(-0.08, 0.08)),
                    float(rng.uniform(-0.08, 0.08)),
                    int(rng.choice(channels)),
                    erp_kw=float(rng.uniform(0.02, 5.0)),
                )
                for i in range(n_towers)
            ]
            results = scan(cfg, towers)

            for pixel in results:
                for n in reserved:
                    assert pixel.availability[n] == 0
                assert pixel.total_available == sum(pixel.availability.values())

            if towers:
                reduced = scan(cfg, towers[:-1])
                for a, b in zip(results, reduced):
                    for n in channels:
                        assert b.availability[n] >= a.availability[n]
                        assert b.noise_dbm[n] <= a.noise_dbm[n] + 1e-12

            wider = replace(cfg)
            wider.sep_co_km = sep_co + 3.0
            wider.sep_adj_km = sep_adj + 3.0
            tightened = scan(wider, towers)
            for a, b in zip(results, tightened):
                for n in channels:
                    assert b.availability[n] <= a.availability[n]


def test_csv_round_trip_bytes():
    with criterion("CSV round trip"):
        cfg, towers = _oracle_cfg_and_towers()
        results = scan(cfg, towers)
        first = io.StringIO()
        export_csv(results, cfg, first)
        dataset = import_csv(io.StringIO(first.getvalue()))
        second = io.StringIO()
        export_csv(dataset.pixels, cfg, second)
        assert second.getvalue() == first.getvalue()


def test_parallel_determinism():
    with criterion("parallel determinism"):
        cfg, towers = _oracle_cfg_and_towers()
        serial = io.StringIO()
        export_csv(scan(cfg, towers, workers=1), cfg, serial)
        parallel = io.StringIO()
        export_csv(scan(cfg, towers, workers=max(os.cpu_count() or 4, 4)), cfg, parallel)
        assert parallel.getvalue() == serial.getvalue()


def test_orientation_optimizer():
    with criterion("orientation optimizer"):
        bs = RadioEndpoint(
            location=GeoCoordinate(0, 0), height_agl_m=20.0, antenna=UraAntenna(rows=2, cols=2)
        )
        ue = RadioEndpoint(location=GeoCoordinate(0, 0.2), height_agl_m=20.0)
        spec = OrientationScan(target="bs", az_step=5.0, el_step=5.0)
        result = optimize_orientation(spec, bs, ue, 600.0, 6e6)
        az, el = result.bs_orientation
        assert abs(az - 90.0) <= 5.0
        assert abs(el) <= 5.0

        boosted = optimize_orientation(
            spec, replace(bs, tx_power_dbm=bs.tx_power_dbm + 10.0), ue, 600.0, 6e6
        )
        assert boosted.bs_orientation == result.bs_orientation

        coarse = OrientationScan(target="bs", az_step=15.0, el_step=15.0)
        got = optimize_orientation(coarse, bs, ue, 600.0, 6e6)
        best = None
        for el_c in coarse.elevations():
            for az_c in coarse.azimuths():
                candidate = replace(
                    bs, antenna=replace(bs.antenna, azimuth_deg=float(az_c), tilt_deg=float(el_c))
                )
                rss = evaluate_link(candidate, ue, 600.0, 6e6).rss_dbm
                if best is None or rss > best[0]:
                    best = (rss, (float(az_c), float(el_c)))
        assert got.bs_orientation == best[1]
        assert got.rss_dbm == pytest.approx(best[0], abs=1e-9)


def test_cli_service_parity(tmp_path):
    with criterion("CLI/service CSV parity"):
        config_doc = scan_config_doc()
        config_path = tmp_path / "scan.json"
        config_path.write_text(json.dumps(config_doc), encoding="utf-8")
        towers_path = tmp_path / "towers.csv"
        towers_path.write_text(TOWERS_CSV, encoding="utf-8")
        cli_out = tmp_path / "cli.csv"
        code = main(
            [
                "scan",
                "--config",
                str(config_path),
                "--towers",
                str(towers_path),
                "--out",
                str(cli_out),
                "--quiet",
            ]
        )
        assert code == 0

        server, service = make_server(tmp_path / "data", port=0)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            base = f"http://127.0.0.1:{server.server_address[1]}"
            status, _ = http("POST", f"{base}/api/towers", TOWERS_CSV, content_type="text/csv")
            assert status == 200
            status, body = http("POST", f"{base}/api/scan", config_doc)
            assert status == 202
            job, progress = wait_for_job(base, json.loads(body)["id"])
            assert job["state"] == "done"
            assert progress == sorted(progress) and progress[-1] == 1.0
            status, service_bytes = http("GET", f"{base}/api/results/{job['id']}")
            assert status == 200
        finally:
            server.shutdown()
            service.shutdown()
            server.server_close()

        assert service_bytes == cli_out.read_bytes()
