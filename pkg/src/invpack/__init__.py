"""Inversive distance circle packings in the Euclidean plane and the Poincare disk."""

from .hypgeom import (
    INDETERMINATE,
    DiskMobius,
    EuclideanCircle,
    GeneralizedRadius,
    HyperbolicCircle,
    apply_mobius,
    apply_mobius_circle,
    euc_to_hyp_circle,
    gen_radius_compare,
    gen_radius_ratio,
    generalized_radius,
    hyp_distance,
    hyp_to_euc_circle,
    inversive_distance_euc,
    inversive_distance_hyp,
    mobius_to_origin,
    scale_circle,
)
from .io import DocumentError, PackingDocument, load, save
from .mesh import (
    Triangulation,
    TriangulationError,
    build_triangulation,
    check_regular_weight,
    check_structure_condition,
    hex_disk_triangulation,
    star_polygon,
)
from .metrics import (
    EUCLIDEAN,
    HYPERBOLIC,
    DegenerateFaceError,
    curvature,
    edge_lengths,
    face_angles,
    is_weighted_delaunay_edge,
    is_weighted_delaunay_packing,
    power_center,
)
from .solver import (
    HolonomyError,
    SolveConfig,
    SolveReport,
    SolverError,
    curvature_map,
    layout_in_disk,
    layout_in_plane,
    solve_prescribed_curvature,
)

__version__ = "0.1.0"
