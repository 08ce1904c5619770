"""TV white space spectrum engine: terrain-aware channel availability scans
and an RF link planner/optimizer for base-station-to-device links."""

__version__ = "0.1.0"

from .geodata import (  # noqa: F401
    GeoCoordinate,
    PixelGrid,
    RegionBoundary,
    auto_boundary,
    boundary_contains,
    build_pixel_grid,
    destination_point,
    haversine_distance,
    initial_bearing,
)
from .propagation import (  # noqa: F401
    NO_SIGNAL_DBM,
    PathlossResult,
    PropagationParams,
    free_space_pathloss,
    fresnel_parameter,
    knife_edge_loss,
    model_rss,
    received_signal_strength,
    terrain_pathloss,
)
from .rfplan import (  # noqa: F401
    LinkMetrics,
    OrientationScan,
    RadioEndpoint,
    UraAntenna,
    coverage_map,
    evaluate_link,
    evaluate_ptmp,
    los_available,
    optimize_orientation,
    ura_gain,
)
from .scanner import (  # noqa: F401
    PixelResult,
    ProtectedContour,
    ScanConfig,
    ScanDataset,
    channel_noise,
    classify_usability,
    export_csv,
    import_csv,
    in_protected_region,
    protected_contour,
    scan,
)
from .spectrum import (  # noqa: F401
    ChannelPlan,
    ChannelSegment,
    ChannelTowerIndex,
    Diagnostic,
    TvTower,
    build_channel_index,
    channel_center_frequency,
    erp_kw_to_dbm,
    load_towers,
    reserved_filter,
)
from .terrain import (  # noqa: F401
    TerrainGrid,
    TerrainProfile,
    elevation_at,
    extract_profile,
    load_terrain,
    serialize_terrain,
)
