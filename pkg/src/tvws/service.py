"""HTTP/JSON service exposing scans as trackable jobs, location search, tower
upload, RF planning, and coverage rasters.

The only mutable shared state is the job registry plus the loaded datasets,
both guarded by one lock. Scan jobs run on a single worker thread in FIFO
order (scans are CPU-saturating, so single-flight keeps resource use
deterministic); results persist in the data directory as the canonical CSV
plus a JSON sidecar echoing the config for reproducibility.
"""

from __future__ import annotations

import io
import json
import re
import secrets
import threading
import time
import urllib.parse
from dataclasses import dataclass, field
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from queue import Queue

from . import __version__
from .config import (
    ConfigError,
    RfPlanConfig,
    rfplan_config_from_dict,
    scan_config_from_dict,
    scan_config_to_dict,
)
from .geodata import build_pixel_grid
from .query import search_location
from .rfplan import coverage_map, evaluate_ptmp, export_coverage_csv, optimize_orientation
from .scanner import ScanConfig, ScanDataset, export_csv, import_csv, resolve_scan_grid, scan
from .spectrum import Diagnostic, TowersFormatError, TvTower, load_towers, plan_conformance
from .terrain import TerrainGrid, load_terrain

JOB_PENDING = "pending"
JOB_RUNNING = "running"
JOB_DONE = "done"
JOB_FAILED = "failed"


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class ScanJob:
    """One submitted scan. Progress is monotone; states move pending ->
    running -> done|failed only."""

    id: str
    state: str = JOB_PENDING
    progress: float = 0.0
    submitted_at: str = field(default_factory=_utcnow)
    finished_at: str | None = None
    result_path: str | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "state": self.state,
            "progress": self.progress,
            "submitted_at": self.submitted_at,
            "finished_at": self.finished_at,
            "result_path": self.result_path,
            "error": self.error,
        }


class HttpError(Exception):
    """Maps directly onto the uniform error envelope."""

    def __init__(self, status: int, code: str, message: str, field_name: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.field = field_name


@dataclass
class _PlannerContext:
    cfg: RfPlanConfig
    terrain: TerrainGrid | None


class SpectrumService:
    """Application state + request handlers, independent of the HTTP plumbing."""

    def __init__(self, data_dir: str | Path, queue_scans: bool = True, workers: int = 1):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.queue_scans = queue_scans
        self.workers = workers
        self._lock = threading.Lock()
        self._jobs: dict[str, ScanJob] = {}
        self._queue: Queue[tuple[ScanJob, ScanConfig, list[TvTower], TerrainGrid | None] | None] = Queue()
        self._towers: list[TvTower] = []
        self._tower_diagnostics: list[Diagnostic] = []
        self._dataset: ScanDataset | None = None
        self._dataset_cell: tuple[float, float] | None = None
        self._dataset_max_noise: float = -85.0
        self._planner: _PlannerContext | None = None
        self._worker = threading.Thread(target=self._run_jobs, name="scan-worker", daemon=True)
        self._worker.start()
        self._restore_latest_dataset()

    # -- state ---------------------------------------------------------------

    def _restore_latest_dataset(self) -> None:
        sidecars = sorted(self.data_dir.glob("*.json"), key=lambda p: p.stat().st_mtime)
        for sidecar in reversed(sidecars):
            try:
                meta = json.loads(sidecar.read_text(encoding="utf-8"))
                csv_path = self.data_dir / f"{meta['id']}.csv"
                dataset = import_csv(csv_path)
            except (OSError, KeyError, ValueError):
                continue
            with self._lock:
                self._dataset = dataset
                grid_meta = meta.get("grid", {})
                if "dlat_deg" in grid_meta and "dlon_deg" in grid_meta:
                    self._dataset_cell = (grid_meta["dlat_deg"], grid_meta["dlon_deg"])
                self._dataset_max_noise = meta.get("config", {}).get("max_noise_dbm", -85.0)
            return

    def load_towers_csv(self, text: str) -> tuple[int, list[Diagnostic]]:
        towers, diagnostics = load_towers(io.StringIO(text))
        with self._lock:
            self._towers = towers
            self._tower_diagnostics = diagnostics
        (self.data_dir / "towers.csv").write_text(text, encoding="utf-8")
        return len(towers), diagnostics

    # -- scan jobs -----------------------------------------------------------

    def submit_scan(self, doc: dict) -> ScanJob:
        try:
            cfg = scan_config_from_dict(doc, base_dir=self.data_dir)
        except ConfigError as exc:
            raise HttpError(400, "invalid_config", exc.message, exc.field) from exc
        with self._lock:
            towers = list(self._towers)
        if not towers and cfg.boundary.variant == "auto":
            raise HttpError(400, "invalid_config", "auto boundary requires uploaded towers", "boundary")
        towers, _ = plan_conformance(towers, cfg.plan)

        terrain = None
        terrain_path = doc.get("terrain")
        if terrain_path:
            path = Path(terrain_path)
            if not path.is_absolute():
                path = self.data_dir / path
            try:
                terrain = load_terrain(path)
            except (OSError, ValueError) as exc:
                raise HttpError(400, "invalid_config", str(exc), "terrain") from exc
        if cfg.model == "terrain" and terrain is None:
            raise HttpError(400, "invalid_config", "terrain model requires a terrain file", "terrain")

        job = ScanJob(id=secrets.token_hex(8))
        with self._lock:
            if not self.queue_scans and any(
                j.state in (JOB_PENDING, JOB_RUNNING) for j in self._jobs.values()
            ):
                raise HttpError(409, "scan_running", "a scan is already running")
            self._jobs[job.id] = job
        self._queue.put((job, cfg, towers, terrain))
        return job

    def job_status(self, job_id: str) -> ScanJob:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise HttpError(404, "not_found", f"unknown job {job_id!r}")
        return job

    def _run_jobs(self) -> None:
        while True:
            item = self._queue.get()
            if item is None:
                return
            job, cfg, towers, terrain = item
            with self._lock:
                job.state = JOB_RUNNING
            started = time.monotonic()

            def on_progress(fraction: float) -> None:
                with self._lock:
                    job.progress = max(job.progress, fraction)

            try:
                results = scan(cfg, towers, terrain, progress_sink=on_progress, workers=self.workers)
                csv_path = self.data_dir / f"{job.id}.csv"
                with open(csv_path, "w", encoding="utf-8", newline="") as fh:
                    export_csv(results, cfg, fh)
                _, grid = resolve_scan_grid(cfg, towers)
                sidecar = {
                    "id": job.id,
                    "submitted_at": job.submitted_at,
                    "finished_at": _utcnow(),
                    "duration_s": round(time.monotonic() - started, 3),
                    "config": scan_config_to_dict(cfg),
                    "grid": {
                        "rows": grid.rows,
                        "cols": grid.cols,
                        "dlat_deg": grid.dlat_deg,
                        "dlon_deg": grid.dlon_deg,
                    },
                }
                (self.data_dir / f"{job.id}.json").write_text(
                    json.dumps(sidecar, indent=2), encoding="utf-8"
                )
                dataset = ScanDataset(
                    channels=cfg.channels,
                    has_noise=cfg.compute_noise,
                    pixels=results,
                )
                with self._lock:
                    job.progress = 1.0
                    job.state = JOB_DONE
                    job.finished_at = sidecar["finished_at"]
                    job.result_path = str(csv_path)
                    self._dataset = dataset
                    self._dataset_cell = (grid.dlat_deg, grid.dlon_deg)
                    self._dataset_max_noise = cfg.max_noise_dbm
            except Exception as exc:  # noqa: BLE001 - job isolation boundary
                with self._lock:
                    job.state = JOB_FAILED
                    job.finished_at = _utcnow()
                    job.error = str(exc)

    def shutdown(self) -> None:
        self._queue.put(None)

    # -- queries -------------------------------------------------------------

    def availability(self, lat: float, lon: float, max_noise: float | None) -> dict:
        with self._lock:
            dataset = self._dataset
            cell = self._dataset_cell
            default_max_noise = self._dataset_max_noise
        if dataset is None:
            raise HttpError(409, "no_dataset", "no dataset loaded")
        result = search_location(
            dataset,
            lat,
            lon,
            default_max_noise if max_noise is None else max_noise,
            cell_size_deg=cell,
        )
        return {
            "queried": {"lat": result.queried.lat, "lon": result.queried.lon},
            "matched": result.pixel is not None,
            "pixel": None
            if result.pixel is None
            else {"lat": result.pixel.center.lat, "lon": result.pixel.center.lon},
            "statuses": {str(n): s for n, s in result.statuses.items()},
            "noise_dbm": None
            if result.noise_dbm is None
            else {str(n): v for n, v in result.noise_dbm.items()},
            "totals": result.totals,
        }

    def towers_json(self) -> dict:
        with self._lock:
            towers = list(self._towers)
            diags = list(self._tower_diagnostics)
        return {
            "towers": [
                {
                    "index": t.index,
                    "name": t.name,
                    "lat": t.location.lat,
                    "lon": t.location.lon,
                    "erp_kw": t.erp_kw,
                    "channel": t.channel,
                    "frequency_mhz": t.frequency_mhz,
                    "class": t.emission_class,
                    "height_agl_m": t.height_agl_m,
                    "country": t.country,
                }
                for t in towers
            ],
            "diagnostics": [
                {"row": d.row, "field": d.field, "message": d.message, "severity": d.severity}
                for d in diags
            ],
        }

    def _load_plan_terrain(self, cfg: RfPlanConfig) -> TerrainGrid | None:
        if not cfg.terrain_path:
            return None
        path = Path(cfg.terrain_path)
        if not path.is_absolute():
            path = self.data_dir / path
        try:
            return load_terrain(path)
        except (OSError, ValueError) as exc:
            raise HttpError(400, "invalid_config", str(exc), "terrain") from exc

    def rfplan(self, doc: dict) -> dict:
        try:
            cfg = rfplan_config_from_dict(doc, base_dir=self.data_dir)
        except ConfigError as exc:
            raise HttpError(400, "invalid_config", exc.message, exc.field) from exc
        terrain = self._load_plan_terrain(cfg)
        if cfg.model == "terrain" and terrain is None:
            raise HttpError(400, "invalid_config", "terrain model requires a terrain file", "terrain")
        try:
            links = evaluate_ptmp(
                cfg.bs,
                cfg.ues,
                cfg.direction,
                cfg.frequency_mhz,
                cfg.bandwidth_hz,
                cfg.model,
                terrain,
                cfg.params,
            )
        except ValueError as exc:
            raise HttpError(400, "invalid_config", str(exc)) from exc
        with self._lock:
            self._planner = _PlannerContext(cfg=cfg, terrain=terrain)
        return {"scenario": cfg.scenario, "direction": cfg.direction, "links": [m.to_dict() for m in links]}

    def optimize(self, doc: dict) -> dict:
        try:
            cfg = rfplan_config_from_dict(doc, base_dir=self.data_dir)
        except ConfigError as exc:
            raise HttpError(400, "invalid_config", exc.message, exc.field) from exc
        if cfg.orientation is None:
            raise HttpError(400, "invalid_config", "orientation_scan is required", "orientation_scan")
        terrain = self._load_plan_terrain(cfg)
        try:
            result = optimize_orientation(
                cfg.orientation,
                cfg.bs,
                cfg.ues[0],
                cfg.frequency_mhz,
                cfg.bandwidth_hz,
                cfg.model,
                terrain,
                cfg.params,
                direction=cfg.direction,
            )
        except ValueError as exc:
            raise HttpError(400, "invalid_orientation", str(exc)) from exc
        return {
            "target": result.target,
            "bs": None
            if result.bs_orientation is None
            else {"azimuth_deg": result.bs_orientation[0], "elevation_deg": result.bs_orientation[1]},
            "ue": None
            if result.ue_orientation is None
            else {"azimuth_deg": result.ue_orientation[0], "elevation_deg": result.ue_orientation[1]},
            "rss_dbm": result.rss_dbm,
        }

    def coverage_csv(self, metric: str) -> str:
        with self._lock:
            planner = self._planner
        if planner is None:
            raise HttpError(409, "no_plan", "no RF plan submitted")
        cfg = planner.cfg
        if cfg.coverage_boundary is None or cfg.coverage_pixel_size_km is None:
            raise HttpError(409, "no_coverage_region", "the last RF plan carried no coverage region")
        grid = build_pixel_grid(cfg.coverage_boundary, cfg.coverage_pixel_size_km)
        raster = coverage_map(
            cfg.bs,
            grid,
            metric,
            cfg.ues[0],
            cfg.frequency_mhz,
            cfg.bandwidth_hz,
            direction=cfg.direction,
            model=cfg.model,
            terrain=planner.terrain,
            params=cfg.params,
        )
        buf = io.StringIO()
        export_coverage_csv(grid, raster, buf)
        return buf.getvalue()

    def result_csv(self, job_id: str) -> bytes:
        job = self.job_status(job_id)
        if job.state != JOB_DONE or job.result_path is None:
            raise HttpError(404, "not_found", f"job {job_id!r} has no result")
        return Path(job.result_path).read_bytes()


def _query_float(params: dict[str, list[str]], name: str, required: bool = True) -> float | None:
    values = params.get(name)
    if not values:
        if required:
            raise HttpError(400, "invalid_query", f"missing query parameter {name!r}", name)
        return None
    try:
        return float(values[0])
    except ValueError as exc:
        raise HttpError(400, "invalid_query", f"{name} must be a number", name) from exc


class _Handler(BaseHTTPRequestHandler):
    service: SpectrumService  # injected by make_server
    protocol_version = "HTTP/1.1"

    # Quiet by default; tests and the CLI enable logging explicitly if needed.
    def log_message(self, fmt: str, *args) -> None:  # noqa: A002
        pass

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, obj) -> None:
        self._send(status, json.dumps(obj).encode("utf-8"), "application/json")

    def _send_error_envelope(self, exc: HttpError) -> None:
        error: dict = {"code": exc.code, "message": str(exc)}
        if exc.field:
            error["field"] = exc.field
        self._send_json(exc.status, {"error": error})

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def _read_json(self) -> dict:
        raw = self._read_body()
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise HttpError(400, "invalid_json", f"request body is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise HttpError(400, "invalid_json", "request body must be a JSON object")
        return doc

    def do_OPTIONS(self) -> None:  # CORS preflight for the browser client
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self) -> None:
        try:
            parsed = urllib.parse.urlparse(self.path)
            params = urllib.parse.parse_qs(parsed.query)
            path = parsed.path
            if m := re.fullmatch(r"/api/jobs/([0-9a-f]+)", path):
                self._send_json(200, self.service.job_status(m.group(1)).to_dict())
            elif m := re.fullmatch(r"/api/results/([0-9a-f]+)", path):
                self._send(200, self.service.result_csv(m.group(1)), "text/csv; charset=utf-8")
            elif path == "/api/availability":
                lat = _query_float(params, "lat")
                lon = _query_float(params, "lon")
                max_noise = _query_float(params, "max_noise", required=False)
                assert lat is not None and lon is not None
                self._send_json(200, self.service.availability(lat, lon, max_noise))
            elif path == "/api/towers":
                self._send_json(200, self.service.towers_json())
            elif path == "/api/coverage":
                metric = (params.get("metric") or ["rss"])[0]
                try:
                    body = self.service.coverage_csv(metric)
                except ValueError as exc:
                    raise HttpError(400, "invalid_query", str(exc), "metric") from exc
                self._send(200, body.encode("utf-8"), "text/csv; charset=utf-8")
            elif path == "/api/health":
                self._send_json(200, {"status": "ok", "version": __version__})
            else:
                raise HttpError(404, "not_found", f"no such endpoint {path!r}")
        except HttpError as exc:
            self._send_error_envelope(exc)

    def do_POST(self) -> None:
        try:
            path = urllib.parse.urlparse(self.path).path
            if path == "/api/scan":
                job = self.service.submit_scan(self._read_json())
                self._send_json(202, job.to_dict())
            elif path == "/api/towers":
                raw = self._read_body()
                try:
                    count, diags = self.service.load_towers_csv(raw.decode("utf-8"))
                except (UnicodeDecodeError, TowersFormatError) as exc:
                    raise HttpError(400, "invalid_towers", str(exc)) from exc
                self._send_json(
                    200,
                    {
                        "loaded": count,
                        "diagnostics": [
                            {"row": d.row, "field": d.field, "message": d.message, "severity": d.severity}
                            for d in diags
                        ],
                    },
                )
            elif path == "/api/rfplan":
                self._send_json(200, self.service.rfplan(self._read_json()))
            elif path == "/api/optimize":
                self._send_json(200, self.service.optimize(self._read_json()))
            else:
                raise HttpError(404, "not_found", f"no such endpoint {path!r}")
        except HttpError as exc:
            self._send_error_envelope(exc)


def make_server(
    data_dir: str | Path,
    port: int = 0,
    host: str = "127.0.0.1",
    queue_scans: bool = True,
    workers: int = 1,
) -> tuple[ThreadingHTTPServer, SpectrumService]:
    """Create (but do not start) the HTTP server and its service state."""
    service = SpectrumService(data_dir, queue_scans=queue_scans, workers=workers)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer((host, port), handler)
    return server, service


def serve_forever(data_dir: str | Path, port: int, host: str = "0.0.0.0", workers: int = 1) -> None:
    server, service = make_server(data_dir, port=port, host=host, workers=workers)
    try:
        server.serve_forever()
    finally:
        service.shutdown()
        server.server_close()
