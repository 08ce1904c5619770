"""JSON configuration parsing for scans and RF plans.

Config documents mirror the domain types field-for-field in snake_case.
Validation failures raise ConfigError carrying the offending field path so
callers (CLI, HTTP service) can report it precisely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .geodata import GeoCoordinate, RegionBoundary
from .propagation import PropagationParams
from .rfplan import OrientationScan, RadioEndpoint, UraAntenna
from .scanner import ScanConfig
from .spectrum import ChannelPlan, ChannelSegment


class ConfigError(ValueError):
    """A configuration document failed validation at `field`."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")

    @property
    def message(self) -> str:
        return str(self).split(": ", 1)[1]


def _require(doc: Mapping[str, Any], field: str, prefix: str = "") -> Any:
    if field not in doc:
        raise ConfigError(prefix + field, "missing required field")
    return doc[field]


def _number(doc: Mapping[str, Any], field: str, prefix: str = "", default: float | None = None) -> float:
    if field not in doc:
        if default is None:
            raise ConfigError(prefix + field, "missing required field")
        return default
    value = doc[field]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(prefix + field, f"expected a number, got {value!r}")
    return float(value)


def coordinate_from_dict(doc: Mapping[str, Any], prefix: str) -> GeoCoordinate:
    try:
        return GeoCoordinate(_number(doc, "lat", prefix), _number(doc, "lon", prefix))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(prefix.rstrip("."), str(exc)) from exc


def boundary_from_dict(doc: Mapping[str, Any], base_dir: Path | None = None) -> RegionBoundary:
    variant = _require(doc, "variant", "boundary.")
    if variant == "auto":
        return RegionBoundary.auto()
    if variant == "circle":
        center = coordinate_from_dict(_require(doc, "center", "boundary."), "boundary.center.")
        try:
            return RegionBoundary.circle(center, _number(doc, "radius_km", "boundary."))
        except ValueError as exc:
            raise ConfigError("boundary.radius_km", str(exc)) from exc
    if variant == "polygon":
        if "geojson" in doc:
            path = Path(doc["geojson"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            try:
                return RegionBoundary.from_geojson_file(path)
            except (OSError, ValueError) as exc:
                raise ConfigError("boundary.geojson", str(exc)) from exc
        vertices = _require(doc, "vertices", "boundary.")
        if not isinstance(vertices, list):
            raise ConfigError("boundary.vertices", "expected a list of {lat, lon} points")
        try:
            return RegionBoundary.polygon(
                [coordinate_from_dict(v, f"boundary.vertices[{i}].") for i, v in enumerate(vertices)]
            )
        except ValueError as exc:
            raise ConfigError("boundary.vertices", str(exc)) from exc
    raise ConfigError("boundary.variant", f"unknown variant {variant!r}")


def plan_from_dict(doc: Mapping[str, Any]) -> ChannelPlan:
    segments = _require(doc, "segments", "channel_plan.")
    if not isinstance(segments, list) or not segments:
        raise ConfigError("channel_plan.segments", "expected a non-empty list")
    parsed = []
    for i, seg in enumerate(segments):
        prefix = f"channel_plan.segments[{i}]."
        try:
            parsed.append(
                ChannelSegment(
                    band=_require(seg, "band", prefix),
                    first_channel=int(_number(seg, "first_channel", prefix)),
                    last_channel=int(_number(seg, "last_channel", prefix)),
                    first_center_mhz=_number(seg, "first_center_mhz", prefix),
                )
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(prefix.rstrip("."), str(exc)) from exc
    try:
        return ChannelPlan(segments=tuple(parsed), bandwidth_mhz=int(_number(doc, "bandwidth_mhz", "channel_plan.")))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("channel_plan", str(exc)) from exc


def params_from_dict(doc: Mapping[str, Any] | None) -> PropagationParams:
    doc = doc or {}
    kwargs: dict[str, Any] = {}
    for field in (
        "polarization",
        "climate_zone",
    ):
        if field in doc:
            kwargs[field] = doc[field]
    for field in (
        "time_variability",
        "situation_variability",
        "ground_conductivity",
        "ground_permittivity",
        "refractivity",
        "humidity",
        "effective_earth_factor",
        "max_range_km",
    ):
        if field in doc:
            kwargs[field] = _number(doc, field, "params.")
    if "resolution_m" in doc:
        value = doc["resolution_m"]
        kwargs["resolution_m"] = value if value == "auto" else _number(doc, "resolution_m", "params.")
    try:
        return PropagationParams(**kwargs)
    except ValueError as exc:
        raise ConfigError("params", str(exc)) from exc


def scan_config_from_dict(doc: Mapping[str, Any], base_dir: Path | None = None) -> ScanConfig:
    """Build a ScanConfig from its JSON document form."""
    if not isinstance(doc, Mapping):
        raise ConfigError("config", "expected a JSON object")
    boundary = boundary_from_dict(_require(doc, "boundary"), base_dir)
    plan = plan_from_dict(_require(doc, "channel_plan"))
    channels = _require(doc, "channels")
    if not isinstance(channels, list) or not all(isinstance(c, int) for c in channels):
        raise ConfigError("channels", "expected a list of channel numbers")
    reserved = doc.get("reserved", [])
    if not isinstance(reserved, list) or not all(isinstance(c, int) for c in reserved):
        raise ConfigError("reserved", "expected a list of channel numbers")
    thresholds = _require(doc, "thresholds_dbm")
    if not isinstance(thresholds, Mapping):
        raise ConfigError("thresholds_dbm", "expected {band: {class: dBm}}")
    try:
        return ScanConfig(
            boundary=boundary,
            pixel_size_km=_number(doc, "pixel_size_km"),
            plan=plan,
            channels=tuple(channels),
            reserved=tuple(reserved),
            thresholds_dbm={b: dict(c) for b, c in thresholds.items()},
            sep_co_km=_number(doc, "sep_co_km"),
            sep_adj_km=_number(doc, "sep_adj_km"),
            wsd_height_m=_number(doc, "wsd_height_m", default=10.0),
            wsd_gain_dbi=_number(doc, "wsd_gain_dbi", default=0.0),
            tv_rx_height_m=_number(doc, "tv_rx_height_m", default=10.0),
            tv_rx_gain_dbi=_number(doc, "tv_rx_gain_dbi", default=0.0),
            model=doc.get("model", "free_space"),
            params=params_from_dict(doc.get("params")),
            radials=int(_number(doc, "radials", default=72.0)),
            compute_noise=bool(doc.get("compute_noise", True)),
            max_noise_dbm=_number(doc, "max_noise_dbm", default=-85.0),
            erp_dipole=bool(doc.get("erp_dipole", False)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        message = str(exc)
        field = message.split(" ", 1)[0] if " " in message else "config"
        raise ConfigError(field, message) from exc


def scan_config_to_dict(cfg: ScanConfig) -> dict:
    """Round-trip companion of scan_config_from_dict (used for job sidecars)."""
    boundary: dict[str, Any]
    if cfg.boundary.variant == "auto":
        boundary = {"variant": "auto"}
    elif cfg.boundary.variant == "circle":
        assert cfg.boundary.center is not None
        boundary = {
            "variant": "circle",
            "center": {"lat": cfg.boundary.center.lat, "lon": cfg.boundary.center.lon},
            "radius_km": cfg.boundary.radius_km,
        }
    else:
        boundary = {
            "variant": "polygon",
            "vertices": [{"lat": v.lat, "lon": v.lon} for v in cfg.boundary.ring],
        }
    return {
        "boundary": boundary,
        "pixel_size_km": cfg.pixel_size_km,
        "channel_plan": {
            "bandwidth_mhz": cfg.plan.bandwidth_mhz,
            "segments": [
                {
                    "band": s.band,
                    "first_channel": s.first_channel,
                    "last_channel": s.last_channel,
                    "first_center_mhz": s.first_center_mhz,
                }
                for s in cfg.plan.segments
            ],
        },
        "channels": list(cfg.channels),
        "reserved": list(cfg.reserved),
        "thresholds_dbm": {b: dict(c) for b, c in cfg.thresholds_dbm.items()},
        "sep_co_km": cfg.sep_co_km,
        "sep_adj_km": cfg.sep_adj_km,
        "wsd_height_m": cfg.wsd_height_m,
        "wsd_gain_dbi": cfg.wsd_gain_dbi,
        "tv_rx_height_m": cfg.tv_rx_height_m,
        "tv_rx_gain_dbi": cfg.tv_rx_gain_dbi,
        "model": cfg.model,
        "params": {
            "polarization": cfg.params.polarization,
            "time_variability": cfg.params.time_variability,
            "situation_variability": cfg.params.situation_variability,
            "ground_conductivity": cfg.params.ground_conductivity,
            "ground_permittivity": cfg.params.ground_permittivity,
            "refractivity": cfg.params.refractivity,
            "humidity": cfg.params.humidity,
            "climate_zone": cfg.params.climate_zone,
            "effective_earth_factor": cfg.params.effective_earth_factor,
            "max_range_km": cfg.params.max_range_km,
            "resolution_m": cfg.params.resolution_m,
        },
        "radials": cfg.radials,
        "compute_noise": cfg.compute_noise,
        "max_noise_dbm": cfg.max_noise_dbm,
        "erp_dipole": cfg.erp_dipole,
    }


def antenna_from_dict(doc: Mapping[str, Any] | None, prefix: str) -> UraAntenna | None:
    if doc is None:
        return None
    kind = doc.get("type", "ura")
    if kind == "isotropic":
        return None
    if kind != "ura":
        raise ConfigError(prefix + "type", f"unknown antenna type {kind!r}")
    try:
        return UraAntenna(
            tilt_deg=_number(doc, "tilt_deg", prefix, default=0.0),
            azimuth_deg=_number(doc, "azimuth_deg", prefix, default=0.0),
            h_bw_deg=_number(doc, "h_bw_deg", prefix, default=65.0),
            v_bw_deg=_number(doc, "v_bw_deg", prefix, default=65.0),
            sla_db=_number(doc, "sla_db", prefix, default=30.0),
            spacing_wavelengths=_number(doc, "spacing_wavelengths", prefix, default=0.5),
            rows=int(_number(doc, "rows", prefix, default=1.0)),
            cols=int(_number(doc, "cols", prefix, default=1.0)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(prefix.rstrip("."), str(exc)) from exc


def endpoint_from_dict(doc: Mapping[str, Any], prefix: str) -> RadioEndpoint:
    if not isinstance(doc, Mapping):
        raise ConfigError(prefix.rstrip("."), "expected a JSON object")
    location = coordinate_from_dict(_require(doc, "location", prefix), prefix + "location.")
    try:
        return RadioEndpoint(
            location=location,
            height_agl_m=_number(doc, "height_agl_m", prefix, default=10.0),
            tx_power_dbm=_number(doc, "tx_power_dbm", prefix, default=30.0),
            cable_loss_db=_number(doc, "cable_loss_db", prefix, default=0.0),
            sensitivity_dbm=_number(doc, "sensitivity_dbm", prefix, default=-90.0),
            noise_figure_db=_number(doc, "noise_figure_db", prefix, default=6.0),
            antenna=antenna_from_dict(doc.get("antenna"), prefix + "antenna."),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(prefix.rstrip("."), str(exc)) from exc


@dataclass
class RfPlanConfig:
    """Parsed RF planning request: PtP or PtMP plus optional coverage region."""

    scenario: str
    direction: str
    frequency_mhz: float
    bandwidth_hz: float
    model: str
    params: PropagationParams
    bs: RadioEndpoint
    ues: list[RadioEndpoint]
    terrain_path: str | None = None
    coverage_boundary: RegionBoundary | None = None
    coverage_pixel_size_km: float | None = None
    orientation: OrientationScan | None = None


def rfplan_config_from_dict(doc: Mapping[str, Any], base_dir: Path | None = None) -> RfPlanConfig:
    if not isinstance(doc, Mapping):
        raise ConfigError("config", "expected a JSON object")
    scenario = doc.get("scenario", "ptp")
    if scenario not in ("ptp", "ptmp"):
        raise ConfigError("scenario", f"must be 'ptp' or 'ptmp', got {scenario!r}")
    direction = doc.get("direction", "downlink")
    if direction not in ("downlink", "uplink"):
        raise ConfigError("direction", f"must be 'downlink' or 'uplink', got {direction!r}")
    frequency = _number(doc, "frequency_mhz")
    if frequency <= 0.0:
        raise ConfigError("frequency_mhz", "must be > 0")
    bandwidth = _number(doc, "bandwidth_hz")
    if bandwidth <= 0.0:
        raise ConfigError("bandwidth_hz", "must be > 0")
    model = doc.get("model", "free_space")
    bs = endpoint_from_dict(_require(doc, "bs"), "bs.")
    if scenario == "ptp":
        ues = [endpoint_from_dict(_require(doc, "ue"), "ue.")]
    else:
        raw = _require(doc, "ues")
        if not isinstance(raw, list) or not raw:
            raise ConfigError("ues", "expected a non-empty list of endpoints")
        ues = [endpoint_from_dict(u, f"ues[{i}].") for i, u in enumerate(raw)]

    coverage_boundary = None
    coverage_pixel = None
    if "coverage" in doc and doc["coverage"] is not None:
        cov = doc["coverage"]
        coverage_boundary = boundary_from_dict(_require(cov, "boundary", "coverage."), base_dir)
        coverage_pixel = _number(cov, "pixel_size_km", "coverage.")
        if coverage_pixel <= 0.0:
            raise ConfigError("coverage.pixel_size_km", "must be > 0")

    orientation = None
    if "orientation_scan" in doc and doc["orientation_scan"] is not None:
        osc = doc["orientation_scan"]
        try:
            orientation = OrientationScan(
                target=osc.get("target", "bs"),
                az_range=tuple(osc.get("az_range", (-180.0, 180.0))),  # type: ignore[arg-type]
                el_range=tuple(osc.get("el_range", (-90.0, 90.0))),  # type: ignore[arg-type]
                az_step=_number(osc, "az_step", "orientation_scan.", default=5.0),
                el_step=_number(osc, "el_step", "orientation_scan.", default=5.0),
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError("orientation_scan", str(exc)) from exc

    return RfPlanConfig(
        scenario=scenario,
        direction=direction,
        frequency_mhz=frequency,
        bandwidth_hz=bandwidth,
        model=model,
        params=params_from_dict(doc.get("params")),
        bs=bs,
        ues=ues,
        terrain_path=doc.get("terrain"),
        coverage_boundary=coverage_boundary,
        coverage_pixel_size_km=coverage_pixel,
        orientation=orientation,
    )


def load_json(path: str | Path) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
