"""Rectangles inside planar cross-sections of a rectangular tube, and the 3D witness.

A plane tilted by ``alpha`` cuts the vertical tube over a rectangle ``R`` in a
parallelogram. Laid flat around its horizontal line, the cut is the image of
``R`` under ``(x, y) -> (x, y / cos(alpha))``. Such a parallelogram always holds
a copy of ``R``; :func:`rect_in_parallelogram` finds one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DoesNotFit, LiftDegenerate, NotACrossSection, SteepPlane
from .geom import DEFAULT_TOL, RectPlacement, contains_rect, convex_hull
from .nieuwland import best_lambda_for_direction
from .shadow import BoxDims, normalize_direction, orientation_from_direction, project_box

STEEP_LIMIT = math.pi / 2 - 1e-9


def _cross2(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def _angle_between(u: np.ndarray, v: np.ndarray) -> float:
    c = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
    return math.acos(max(-1.0, min(1.0, c)))


@dataclass(frozen=True, eq=False)
class FoldedParallelogram:
    """Folded cross-section with vertices labelled 1..4 (rows 0..3) by preimage height.

    ``preimage`` holds the matching corners of the base rectangle; ``axis_angle``
    is the direction of the base's width side measured from the fold axis.
    """

    vertices: np.ndarray
    preimage: np.ndarray
    alpha: float
    axis_angle: float
    base: tuple[float, float]

    def angle_at(self, label: int) -> float:
        """Interior angle of the parallelogram at vertex ``label`` (1..4)."""
        nbrs = {1: (2, 3), 2: (1, 4), 3: (1, 4), 4: (2, 3)}[label]
        v = self.vertices
        i = label - 1
        return _angle_between(v[nbrs[0] - 1] - v[i], v[nbrs[1] - 1] - v[i])

    def area(self) -> float:
        return abs(_cross2(self.vertices[1] - self.vertices[0], self.vertices[2] - self.vertices[0]))


def fold_map(points, alpha: float) -> np.ndarray:
    p = np.array(points, dtype=float)
    p[..., 1] /= math.cos(alpha)
    return p


def fold_cross_section(base: tuple[float, float], alpha: float, axis_angle: float) -> FoldedParallelogram:
    if not 0.0 <= alpha < STEEP_LIMIT:
        raise SteepPlane(f"tilt {alpha} is outside [0, pi/2)")
    w, h = base
    rect = RectPlacement((0.0, 0.0), axis_angle, w, h)
    corners = rect.corners()
    order = sorted(range(4), key=lambda i: (corners[i, 1], corners[i, 0]))
    pre = corners[order]
    return FoldedParallelogram(
        vertices=fold_map(pre, alpha),
        preimage=pre,
        alpha=float(alpha),
        axis_angle=float(axis_angle),
        base=(float(w), float(h)),
    )


def _line_distance(p0, p1, q) -> float:
    d = p1 - p0
    return abs(_cross2(d, q - p0)) / float(np.linalg.norm(d))


def _sub_angles(pts: np.ndarray) -> tuple[float, float]:
    """(angle 1-2-3, angle 3-2-4) at vertex 2 of a labelled quadrilateral."""
    v1, v2, v3, v4 = pts
    return _angle_between(v1 - v2, v3 - v2), _angle_between(v3 - v2, v4 - v2)


def fold_case(P: FoldedParallelogram, tol: float = 1e-12) -> int:
    """Which embedding applies: 1 if the diagonal 2*3* leaves both sub-angles at 2*
    at least as large as in the base rectangle (ties go to 1), else 2."""
    r1, r2 = _sub_angles(P.preimage)
    p1, p2 = _sub_angles(P.vertices)
    return 1 if (p1 >= r1 - tol and p2 >= r2 - tol) else 2


def rect_in_parallelogram(P: FoldedParallelogram, base: tuple[float, float], tol: float = DEFAULT_TOL.geom) -> RectPlacement:
    """A rectangle congruent to ``base`` inside the folded cross-section ``P``."""
    v = P.vertices
    pre = P.preimage
    s12 = float(np.linalg.norm(pre[1] - pre[0]))
    s24 = float(np.linalg.norm(pre[3] - pre[1]))
    scale = max(base)
    if sorted((s12, s24)) != sorted(base) and not np.allclose(sorted((s12, s24)), sorted(base), atol=tol * scale):
        raise NotACrossSection(f"parallelogram is not a fold of a {base[0]} x {base[1]} rectangle")
    if _line_distance(v[1], v[3], v[0]) < s12 - tol * scale or _line_distance(v[0], v[1], v[3]) < s24 - tol * scale:
        raise NotACrossSection("opposite sides of the parallelogram are too close")

    if P.alpha == 0.0:
        return RectPlacement((0.0, 0.0), P.axis_angle, *P.base)

    center = v.mean(axis=0)
    if fold_case(P) == 1:
        # turn the base about its centre until its diagonal 23 lies along 2*3*
        d_pre = pre[2] - pre[1]
        d_img = v[2] - v[1]
        turn = math.atan2(d_img[1], d_img[0]) - math.atan2(d_pre[1], d_pre[0])
        rect = RectPlacement(center, P.axis_angle + turn, *P.base)
    else:
        r1, r2 = _sub_angles(pre)
        p1, p2 = _sub_angles(v)
        # lay one side along the side of P next to the squeezed sub-angle
        if p2 < r2:
            far, along, across = v[3], s24, s12
        else:
            far, along, across = v[0], s12, s24
        u = (far - v[1]) / np.linalg.norm(far - v[1])
        n = np.array([-u[1], u[0]])
        if np.dot(center - v[1], n) < 0:
            n = -n
        c = v[1] + 0.5 * along * u + 0.5 * across * n
        rect = RectPlacement(c, math.atan2(u[1], u[0]), along, across)
    return rect


def rect_in_parallelogram_checked(P: FoldedParallelogram, base, tol: float = DEFAULT_TOL.geom) -> RectPlacement:
    rect = rect_in_parallelogram(P, base, tol=tol)
    if not contains_rect(convex_hull(P.vertices), rect, "closed", tol=tol * max(base)):
        raise NotACrossSection("embedded rectangle leaves the parallelogram")
    return rect


@dataclass(frozen=True, eq=False)
class PlanarQuad3D:
    points: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.points, dtype=float).reshape(4, 3)
        object.__setattr__(self, "points", p)

    def is_parallelogram(self, tol: float = DEFAULT_TOL.geom) -> bool:
        p = self.points
        return bool(np.linalg.norm((p[0] + p[2]) - (p[1] + p[3])) <= tol)

    def is_planar(self, tol: float = DEFAULT_TOL.geom) -> bool:
        p = self.points
        n = np.cross(p[1] - p[0], p[3] - p[0])
        return abs(float(np.dot(n, p[2] - p[0]))) <= tol * max(1.0, float(np.linalg.norm(n)))


@dataclass(frozen=True, eq=False)
class Theorem2Witness:
    """A ``lam*a x lam*b`` rectangle inside the box, in world coordinates.

    World coordinates are those of ``orientation_from_direction(direction)``:
    the box is centred at the origin and the projection direction is vertical.
    """

    quad: PlanarQuad3D
    rect3d: np.ndarray
    shadow_rect: RectPlacement
    folded: FoldedParallelogram
    case: int
    dims: BoxDims
    direction: np.ndarray

    def rect_body(self) -> np.ndarray:
        """Rectangle corners in the axis-aligned box frame."""
        return orientation_from_direction(self.direction).inverse_apply(self.rect3d)

    def box_clearance(self) -> float:
        """Smallest distance from a rectangle corner to the box surface (positive means inside)."""
        half = self.dims.as_array() / 2.0
        return float(np.min(half - np.abs(self.rect_body())))


def _fiber_midpoint(dims: BoxDims, orient, xy: np.ndarray) -> float:
    """Height of the midpoint of the vertical segment over ``xy`` inside the box."""
    half = dims.as_array() / 2.0
    base = orient.inverse_apply(np.array([xy[0], xy[1], 0.0]))
    d = orient.matrix[:, 2]
    lo, hi = -math.inf, math.inf
    for i in range(3):
        if abs(d[i]) < 1e-15:
            if abs(base[i]) > half[i]:
                raise LiftDegenerate("point lies outside the box shadow")
            continue
        t1, t2 = (-half[i] - base[i]) / d[i], (half[i] - base[i]) / d[i]
        lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
    if not hi - lo > 0:
        raise LiftDegenerate("vertical fibre through the point has no interior")
    return 0.5 * (lo + hi)


def theorem2_witness(dims: BoxDims, lam: float, direction, angle: float | None = None) -> Theorem2Witness:
    """Lift a centred ``lam*a x lam*b`` rectangle of the shadow into the box.

    The two adjacent corners ``U``, ``V`` are lifted to the midpoints of their
    vertical fibres, the lifts and their reflections through the box centre span a
    parallelogram ``P`` whose shadow is the rectangle, and the rectangle is then
    embedded in ``P``.
    """
    u = normalize_direction(direction)
    orient = orientation_from_direction(u)
    shadow = project_box(dims, orient)
    best, best_angle, _ = best_lambda_for_direction(dims, u)
    theta = best_angle if angle is None else angle
    if lam >= best:
        raise DoesNotFit(f"scale {lam} is not below the largest fit {best:.12g} along this direction")
    # the shadow is symmetric about the origin, so a fitting rectangle may be centred there
    rect = RectPlacement((0.0, 0.0), theta, lam * dims.a, lam * dims.b)
    if not contains_rect(shadow.polygon, rect, "open", eps=0.0):
        raise DoesNotFit("centred rectangle does not fit the open shadow")

    corners = rect.corners()
    U, V = corners[0], corners[1]
    lifts = [np.array([pt[0], pt[1], _fiber_midpoint(dims, orient, pt)]) for pt in (U, V)]
    quad = PlanarQuad3D(np.array([lifts[0], lifts[1], -lifts[0], -lifts[1]]))

    normal = np.cross(lifts[0], lifts[1])
    normal /= np.linalg.norm(normal)
    if normal[2] < 0:
        normal = -normal
    horiz = math.hypot(normal[0], normal[1])
    if horiz < 1e-14:
        axis = np.array([1.0, 0.0, 0.0])
        alpha = 0.0
    else:
        axis = np.array([normal[1], -normal[0], 0.0]) / horiz
        alpha = math.atan2(horiz, normal[2])
    across = np.cross([0.0, 0.0, 1.0], axis)  # horizontal, perpendicular to the fold axis
    # in-plane unit vector perpendicular to the axis, rising out of the horizontal
    slope = -float(np.dot(normal, across)) / normal[2]
    up = (across + slope * np.array([0.0, 0.0, 1.0])) / math.hypot(1.0, slope)

    axis_angle = rect.angle - math.atan2(axis[1], axis[0])
    folded = fold_cross_section((rect.width, rect.height), alpha, axis_angle)
    case = 1 if alpha == 0.0 else fold_case(folded)
    flat = rect_in_parallelogram_checked(folded, (rect.width, rect.height))
    fc = flat.corners()
    rect3d = fc[:, :1] * axis + fc[:, 1:2] * up
    return Theorem2Witness(
        quad=quad,
        rect3d=rect3d,
        shadow_rect=rect,
        folded=folded,
        case=case,
        dims=dims,
        direction=u,
    )
