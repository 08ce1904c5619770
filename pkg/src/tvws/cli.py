"""Command-line interface.

Subcommands: scan, search, rfplan, optimize, validate-towers, serve.
Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import (
    ConfigError,
    load_json,
    rfplan_config_from_dict,
    scan_config_from_dict,
)
from .query import search_location
from .rfplan import evaluate_ptmp, optimize_orientation
from .scanner import ScanError, export_csv, import_csv, scan
from .spectrum import TowersFormatError, load_towers, plan_conformance
from .terrain import load_terrain

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

DEFAULT_DATA_DIR = os.environ.get("WSA_DATA_DIR", "wsa-data")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract wants 1.
    def error(self, message: str):  # noqa: A002
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tvws", description="TV white space scanner and RF link planner")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("scan", parents=[], help="run an availability/noise scan", add_help=True)
    p.add_argument("--config", required=True, help="scan config JSON file")
    p.add_argument("--towers", required=True, help="tower dataset CSV file")
    p.add_argument("--terrain", help="ESRI ASCII terrain grid (.asc)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--workers", type=int, default=1, help="parallel workers (default 1)")
    p.add_argument("--quiet", action="store_true", help="suppress the progress line")

    p = sub.add_parser("search", help="look up channel status at a coordinate")
    p.add_argument("--data", required=True, help="scan result CSV")
    p.add_argument("--lat", type=float, required=True)
    p.add_argument("--lon", type=float, required=True)
    p.add_argument("--max-noise", type=float, default=-85.0, help="usability threshold in dBm")

    p = sub.add_parser("rfplan", help="evaluate PtP/PtMP link metrics")
    p.add_argument("--config", required=True, help="RF plan config JSON file")

    p = sub.add_parser("optimize", help="grid-search the best antenna orientation")
    p.add_argument("--config", required=True, help="RF plan config JSON file")
    p.add_argument("--target", choices=("bs", "ue", "both"), help="override the scan target")

    p = sub.add_parser("validate-towers", help="validate a tower dataset CSV")
    p.add_argument("towers", help="tower dataset CSV file")
    p.add_argument("--config", help="scan config JSON; also checks plan conformance")
    p.add_argument("--strict", action="store_true", help="exit 1 when any diagnostic is reported")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8738)
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--data-dir", default=DEFAULT_DATA_DIR, help="result storage (env WSA_DATA_DIR)")
    p.add_argument("--workers", type=int, default=1, help="scan worker threads")
    p.add_argument("--no-queue", action="store_true", help="reject scans while one is running")

    return parser


def _cmd_scan(args: argparse.Namespace) -> int:
    cfg = scan_config_from_dict(load_json(args.config), base_dir=Path(args.config).resolve().parent)
    towers, diagnostics = load_towers(args.towers)
    towers, plan_diags = plan_conformance(towers, cfg.plan)
    for diag in diagnostics + plan_diags:
        print(f"towers: {diag}", file=sys.stderr)
    terrain = load_terrain(args.terrain) if args.terrain else None

    def progress(fraction: float) -> None:
        if not args.quiet:
            print(f"\rscanning... {fraction * 100.0:6.2f}%", end="", file=sys.stderr, flush=True)

    results = scan(cfg, towers, terrain, progress_sink=progress, workers=max(1, args.workers))
    if not args.quiet:
        print(file=sys.stderr)
    export_csv(results, cfg, args.out)
    print(f"wrote {len(results)} pixels to {args.out}")
    return EXIT_OK


def _cmd_search(args: argparse.Namespace) -> int:
    dataset = import_csv(args.data)
    result = search_location(dataset, args.lat, args.lon, args.max_noise)
    print(
        json.dumps(
            {
                "queried": {"lat": result.queried.lat, "lon": result.queried.lon},
                "matched": result.pixel is not None,
                "statuses": {str(n): s for n, s in result.statuses.items()},
                "noise_dbm": None
                if result.noise_dbm is None
                else {str(n): v for n, v in result.noise_dbm.items()},
                "totals": result.totals,
            },
            indent=2,
        )
    )
    return EXIT_OK


def _cmd_rfplan(args: argparse.Namespace) -> int:
    cfg = rfplan_config_from_dict(load_json(args.config), base_dir=Path(args.config).resolve().parent)
    terrain = load_terrain(cfg.terrain_path) if cfg.terrain_path else None
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
    print(
        json.dumps(
            {"scenario": cfg.scenario, "direction": cfg.direction, "links": [m.to_dict() for m in links]},
            indent=2,
        )
    )
    return EXIT_OK


def _cmd_optimize(args: argparse.Namespace) -> int:
    cfg = rfplan_config_from_dict(load_json(args.config), base_dir=Path(args.config).resolve().parent)
    if cfg.orientation is None:
        raise ConfigError("orientation_scan", "missing required field")
    orientation = cfg.orientation
    if args.target:
        from dataclasses import replace

        orientation = replace(orientation, target=args.target)
    terrain = load_terrain(cfg.terrain_path) if cfg.terrain_path else None
    result = optimize_orientation(
        orientation,
        cfg.bs,
        cfg.ues[0],
        cfg.frequency_mhz,
        cfg.bandwidth_hz,
        cfg.model,
        terrain,
        cfg.params,
        direction=cfg.direction,
    )
    print(
        json.dumps(
            {
                "target": result.target,
                "bs": None
                if result.bs_orientation is None
                else {"azimuth_deg": result.bs_orientation[0], "elevation_deg": result.bs_orientation[1]},
                "ue": None
                if result.ue_orientation is None
                else {"azimuth_deg": result.ue_orientation[0], "elevation_deg": result.ue_orientation[1]},
                "rss_dbm": result.rss_dbm,
            },
            indent=2,
        )
    )
    return EXIT_OK


def _cmd_validate_towers(args: argparse.Namespace) -> int:
    towers, diagnostics = load_towers(args.towers)
    if args.config:
        cfg = scan_config_from_dict(load_json(args.config), base_dir=Path(args.config).resolve().parent)
        towers, plan_diags = plan_conformance(towers, cfg.plan)
        diagnostics = diagnostics + plan_diags
    for diag in diagnostics:
        print(str(diag))
    print(f"{len(towers)} towers, {len(diagnostics)} diagnostics")
    if args.strict and diagnostics:
        return EXIT_VALIDATION
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import make_server

    server, service = make_server(
        args.data_dir,
        port=args.port,
        host=args.host,
        queue_scans=not args.no_queue,
        workers=max(1, args.workers),
    )
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port} (data dir: {args.data_dir})", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        service.shutdown()
        server.server_close()
    return EXIT_OK


_COMMANDS = {
    "scan": _cmd_scan,
    "search": _cmd_search,
    "rfplan": _cmd_rfplan,
    "optimize": _cmd_optimize,
    "validate-towers": _cmd_validate_towers,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)

    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_VALIDATION

    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ScanError, TowersFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"unexpected failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entry() -> None:
    sys.exit(main())
