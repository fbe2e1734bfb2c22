"""Straight passages of scaled copies through rectangular boxes."""

from .cross_section import (
    FoldedParallelogram,
    PlanarQuad3D,
    Theorem2Witness,
    fold_case,
    fold_cross_section,
    rect_in_parallelogram,
    theorem2_witness,
)
from .errors import *  # noqa: F401,F403
from .geom import (
    ConvexPolygon,
    Orientation,
    RectPlacement,
    Tolerances,
    contains_point,
    contains_rect,
    convex_hull,
    largest_homothet_lp,
    rotation_about_axis,
)
from .nieuwland import (
    OptConfig,
    OptResult,
    best_lambda_for_direction,
    nieuwland_constant,
    passes_through,
)
from .passage import (
    CornerSquare,
    PassageSpec,
    build_passage,
    corner_square,
    face_rectangle_in_shadow,
    harden_to_interior,
    theorem1_construction,
)
from .shadow import (
    UNIT_CUBE,
    BoxDims,
    Shadow,
    ShadowKind,
    normal_sum_check,
    orientation_from_direction,
    project_box,
    project_box_along,
)

__version__ = "0.1.0"
