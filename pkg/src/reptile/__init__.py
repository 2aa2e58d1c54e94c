"""Exact-arithmetic toolkit for self-similar lattice rep-tiles.

A rep-tile here is the attractor of 2A = h_1(A) u ... u h_m(A) with the h_k
integer lattice isometries and m = 2^d pieces (d = 2 or 3).  The package
verifies the rep-tile property exactly via neighbor maps, measures boundary
dimension and connectedness, runs seeded random searches with dedup, checks
voxel-level topology (components, holes), and exports drawings and meshes.
"""

from .errors import (
    ConvergenceError,
    DimensionError,
    InconclusiveError,
    ParseError,
    ResourceError,
    ValidationError,
)
from .isometry import (
    LatticeIsometry,
    SignedPermMatrix,
    apply,
    compose,
    enumerate_matrices,
    inverse,
    is_identity,
)
from .neighbors import (
    AnalysisReport,
    NeighborGraph,
    analyze,
    boundary_dimension,
    build_graph,
    children,
    decide_rep_tile,
    hata_connected,
    neighbor_count,
    overlap_oracle,
    root_candidates,
)
from .system import (
    BlockSystem,
    RepTileSystem,
    block_expand,
    bounding_radius,
    data_space_count,
    emit_system,
    load_system,
    parse_system,
    save_system,
    word_map,
)
from .topology import (
    TopologyReport,
    VoxelSet,
    cavities,
    components,
    euler_characteristic,
    hole_report,
    voxel_from_boxes,
    voxelize,
)
from .search import (
    FilterSpec,
    Fingerprint,
    ResultRecord,
    ResultStore,
    SearchConfig,
    SearchSummary,
    random_system,
    run_search,
)
from .export import TilingPatch, mesh_export, supertile_patch, svg_export

__version__ = "0.1.0"
