"""Square tilings of the unit cylinder from planar electrical networks.

A planar network with a root and an absorbing boundary induces a harmonic
height function and an electrical flow; together they tile the cylinder
R/Z x [0,1] with one rectangle per edge, each of aspect ratio equal to the
edge conductance.  The package builds these tilings, audits their geometry,
and cross-checks them against Monte-Carlo random walks.
"""

__version__ = "0.1.0"

from .errors import (
    GraphFormatError,
    LevelCollisionError,
    MeridianEndpointError,
    SolverError,
    TilingError,
    TransienceNotEstablished,
)
from .graph import (
    DualGraph,
    LevelCut,
    PlanarGraph,
    build_dual,
    build_graph,
    cut_at_level,
    subdivide_edge,
    trace_faces,
)
from .harmonic import (
    HarmonicProfile,
    compute_flow,
    dirichlet_energy,
    divergence,
    escape_profile,
    killed_profile,
    normalize_flow,
    solve_dirichlet,
)
from .tiling import (
    Tiling,
    assign_dual_widths,
    audit_tiling,
    place_rectangles,
    tile_killed,
)
from .render import render_svg
from .walks import (
    ExitStats,
    WalkConfig,
    exit_distribution,
    interior_subwalk_flux,
    last_visit_distribution,
    meridian_flux,
    sample_step,
    trajectory_limit,
)
from .boundary import (
    LevelSetDrift,
    ZeroOneHarmonic,
    boundary_event_match,
    combine_zero_one,
    harmonic_from_arcs,
    layered_boundary_checklist,
    level_set_drift,
    verify_zero_one,
)

__all__ = [
    "__version__",
    "GraphFormatError",
    "LevelCollisionError",
    "MeridianEndpointError",
    "SolverError",
    "TilingError",
    "TransienceNotEstablished",
    "PlanarGraph",
    "DualGraph",
    "LevelCut",
    "build_graph",
    "trace_faces",
    "build_dual",
    "subdivide_edge",
    "cut_at_level",
    "HarmonicProfile",
    "solve_dirichlet",
    "killed_profile",
    "escape_profile",
    "compute_flow",
    "normalize_flow",
    "divergence",
    "dirichlet_energy",
    "Tiling",
    "assign_dual_widths",
    "place_rectangles",
    "tile_killed",
    "audit_tiling",
    "render_svg",
    "WalkConfig",
    "ExitStats",
    "sample_step",
    "exit_distribution",
    "last_visit_distribution",
    "interior_subwalk_flux",
    "meridian_flux",
    "trajectory_limit",
    "ZeroOneHarmonic",
    "LevelSetDrift",
    "harmonic_from_arcs",
    "verify_zero_one",
    "combine_zero_one",
    "level_set_drift",
    "boundary_event_match",
    "layered_boundary_checklist",
]
