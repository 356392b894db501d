"""Marked-box calculus and Farey patterns of geodesics in the space of ellipsoids.

The library realizes the modular-group action on marked boxes in the
projective plane, transports it to the symmetric space of unit-volume
ellipsoids, and exports the resulting pattern of medial geodesics, its
limit-set flags, and the prism bending data.
"""

from .projective import (
    CoincidentLines,
    CoincidentPoints,
    DegenerateFlags,
    DegenerateQuadruple,
    Flag,
    HomVec,
    NonElliptic,
    NotCollinear,
    Polarity,
    ProjLine,
    ProjMap,
    ProjPoint,
    ProjectiveError,
    SingularMap,
    cross_ratio,
    incident,
    is_elliptic,
    join,
    meet,
    standard_polarity,
    transform_from_correspondence,
    triple_product,
)
from .markedbox import (
    BoxInvariant,
    DegenerateBox,
    DualMarkedBox,
    EnhancedBox,
    MarkedBox,
    OutOfRange,
    apply_word_box,
    bottom_flag,
    box_invariant,
    box_polarity,
    box_triple_product,
    doppelganger,
    enhance,
    enhanced_duality,
    is_convex,
    map_box,
    model_box,
    op_b,
    op_i,
    op_t,
    orbit_enumerate,
    order3_transform,
    polarity_box_to_dual,
    polarity_dual_to_box,
    raw_invariant,
    top_flag,
)
from .fareycomb import (
    INF,
    ConsistencyFailure as WordConsistencyFailure,
    FareyError,
    NotAdjacent,
    OrientedEdge,
    Rational,
    default_base_edge,
    edge_b,
    edge_i,
    edge_t,
    edge_word,
    enumerate_triangles,
    halfplane_contains_edge,
    in_closed_arc,
    intertwine,
    mediant,
    reduce_word,
    triangle_edges,
    triangle_of,
    word_apply,
    word_matrix,
)
from .symmspace import (
    BoundaryData,
    CollinearVertices,
    ConvergenceFailure,
    Flat,
    FlagClass,
    FrameDecomp,
    Generic,
    LineClass,
    NotPositiveDefinite,
    NumericalFailure,
    PointClass,
    PointOffFlat,
    SymmSpaceError,
    XGeodesic,
    XPoint,
    ZeroDirection,
    boundary_ray_class,
    duality_action,
    eigen_frame,
    flat_boundary_data,
    flat_from_triangle,
    flat_geodesic,
    geodesic_between,
    geodesic_point,
    group_action,
    identity_point,
    jacobi_eigh,
    lambda_norm,
    metric_d,
    polarity_fixed_point,
)
from .fareypattern import (
    FareyPattern,
    FixedPointOffFlat,
    LimitFlag,
    PatternError,
    PatternGeodesic,
    base_box,
    build_pattern,
    flat_of_box,
    geodesic_of_box,
    limit_set_flags,
    min_distance_flats,
    min_distance_geodesics,
    one_end_asymptotic,
    pattern_boxes,
)
from .prisms import (
    AdjacencyReport,
    BendingReport,
    CharacterPoint,
    ConeMesh,
    ConsistencyFailure,
    DegenerateTriple,
    DiagonalLocus,
    InflectionData,
    NoFixedPointInFlat,
    Prism,
    PrismError,
    PrismReport,
    UnityTripleProduct,
    bending_report,
    canonical_character,
    cone_fill_sample,
    inflection_line,
    inflection_point,
    level_set_sweep,
    mesh_to_obj,
    order3_axis,
    prism_inflection_data,
    prism_of_triangle,
    square_frame_box,
    stabilizing_polarities,
    translation_T,
    triple_invariant,
)

__version__ = "0.1.0"
