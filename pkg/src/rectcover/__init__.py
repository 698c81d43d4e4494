"""Weighted rectangle covers of rectilinear polygons."""

from .cost import CostParams, rect_cost
from .covers import Cover, greedy_cover, partition_cover, strip_cover, validate_cover
from .decomposition import (
    BaseRectGraph,
    CandidateCapExceeded,
    base_rectangles,
    build_graph,
    concave_vertices,
    enumerate_powerset,
    grid_rectangles,
    maximal_rectangles,
)
from .exact import SolverLimitExceeded, emit_lp, solve_exact, solve_exact_grid
from .geometry import (
    GeometryError,
    Point,
    Polygon,
    PolygonValidationError,
    Rect,
    WktSyntaxError,
    parse_wkt,
    polygons_from_rects,
    serialize_svg,
    to_wkt,
)
from .postprocess import (
    bb_split,
    full_join,
    partition_split,
    prune,
    run_pipeline,
    simple_join,
    trim,
)

__all__ = [
    "BaseRectGraph", "CandidateCapExceeded", "CostParams", "Cover", "GeometryError", "Point",
    "Polygon", "PolygonValidationError", "Rect", "SolverLimitExceeded", "WktSyntaxError",
    "base_rectangles", "bb_split", "build_graph", "concave_vertices", "emit_lp", "enumerate_powerset",
    "full_join", "greedy_cover", "grid_rectangles", "maximal_rectangles", "parse_wkt",
    "partition_cover", "partition_split", "polygons_from_rects", "prune", "rect_cost", "run_pipeline",
    "serialize_svg", "simple_join", "solve_exact", "solve_exact_grid", "strip_cover", "to_wkt",
    "trim", "validate_cover",
]
