"""Explicit straight tunnels through a box.

The construction places a square of the box's smallest side at a corner of the
hexagonal shadow, with its two neighbouring corners on a pair of opposite
shadow sides, then stretches it to the smallest face and nudges the result into
the open interior of the shadow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousClassification,
    CannotHarden,
    ConstructionFailed,
    DoesNotFit,
    FaceParallelDirection,
    NotHexagon,
    VertexNotCornerCandidate,
)
from .geom import (
    DEFAULT_TOL,
    ConvexPolygon,
    RectPlacement,
    contains_rect,
    default_margin,
    max_clearance_center,
)
from .shadow import (
    BoxDims,
    Shadow,
    ShadowKind,
    is_face_parallel,
    normalize_direction,
    orientation_from_direction,
    project_box,
)

SHIFT_FACTOR = 10.0
# rotation budgets tried in turn; the clearance gained grows only quadratically
# with the angle when the rectangle spans two parallel sides
ROTATION_BUDGETS = (1e-3, 1e-2, 1e-1)
ROTATION_STEPS = 41


@dataclass(frozen=True, eq=False)
class CornerSquare:
    """Square anchored at a shadow vertex.

    ``axes`` is ``(p_axis, q_axis, r_axis)``: the body axis whose edge points into
    the shadow at the anchor, then the axes whose edges give the sides carrying
    ``B`` and ``C``. ``offsets`` are the distances from the ends of those sides
    to ``B`` and ``C``.
    """

    anchor_vertex: int
    offsets: tuple[float, float]
    placement: RectPlacement
    fits: bool
    pqr: tuple[float, float, float]
    axes: tuple[int, int, int]
    side: float
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @property
    def slack(self) -> float:
        p, q, r = self.pqr
        return (1.0 + p) - (q + r)

    def predicted_offsets(self) -> tuple[float, float]:
        p, q, r = self.pqr
        k = self.side * math.sqrt((1.0 - p) / (1.0 + p))
        return q * k, r * k


def _require_hexagon(shadow: Shadow) -> None:
    if shadow.kind is not ShadowKind.HEXAGON:
        raise NotHexagon(f"shadow is a {shadow.kind.value}, not a hexagon")


def corner_square(
    shadow: Shadow,
    vertex_index: int,
    side: float | None = None,
    allowed_axes=None,
    tol: float = DEFAULT_TOL.geom,
) -> CornerSquare:
    """Square with one corner at shadow vertex ``vertex_index``.

    The square belongs to the cube of edge ``side`` (default: the box's smallest
    side) sharing the box corner above the vertex and its three edge directions.
    ``allowed_axes`` restricts which interior-pointing axis is acceptable.
    """
    _require_hexagon(shadow)
    n = len(shadow.polygon)
    if not 0 <= vertex_index < n:
        raise VertexNotCornerCandidate(f"vertex index {vertex_index} out of range")
    ip = shadow.odd_axis(vertex_index)
    if allowed_axes is not None and ip not in allowed_axes:
        raise VertexNotCornerCandidate(
            f"vertex {vertex_index} is not an end of the required side pair (interior axis {ip})"
        )
    iq, ir = (i for i in range(3) if i != ip)
    s = shadow.dims.a if side is None else float(side)

    m = shadow.orientation.matrix
    signs = np.sign(shadow.body_vertex(vertex_index))
    # projected scaffold-cube edges leaving the anchor corner
    edge = {i: (-signs[i] * s * m[i])[:2] for i in range(3)}
    A = shadow.polygon.vertices[vertex_index].copy()

    e = edge[ip] / np.linalg.norm(edge[ip])
    nrm = np.array([-e[1], e[0]])

    def on_side(i):
        start = A + edge[i]
        t = float(np.dot(edge[i], nrm))
        along = math.sqrt(max(s * s - t * t, 0.0))
        pt = A + along * e + t * nrm
        return pt, float(np.linalg.norm(pt - start))

    B, b_off = on_side(iq)
    C, c_off = on_side(ir)
    D = B + C - A

    pqr = tuple(float(shadow.pqr[i]) for i in (ip, iq, ir))
    p, q, r = pqr
    fits = q + r <= 1.0 + p + tol
    ab = B - A
    placement = RectPlacement((A + D) / 2.0, math.atan2(ab[1], ab[0]), s, s)
    return CornerSquare(
        anchor_vertex=vertex_index,
        offsets=(b_off, c_off),
        placement=placement,
        fits=fits,
        pqr=pqr,
        axes=(ip, iq, ir),
        side=s,
        A=A,
        B=B,
        C=C,
        D=D,
    )


def corner_squares(shadow: Shadow, side: float | None = None) -> list[CornerSquare]:
    """One corner square per hexagon vertex."""
    _require_hexagon(shadow)
    return [corner_square(shadow, j, side=side) for j in range(len(shadow.polygon))]


def harden_to_interior(
    poly: ConvexPolygon,
    rect: RectPlacement,
    eps: float | None = None,
    budgets: tuple[float, ...] = ROTATION_BUDGETS,
    tol: float = DEFAULT_TOL.geom,
) -> RectPlacement:
    """Move a placement from the closed polygon into its interior with clearance ``eps``.

    Tries, in order: the placement as given, a shift of ``10*eps`` toward the
    centroid, and rotations within each of ``budgets`` paired with the
    clearance-maximising translation.
    """
    eps = default_margin(poly) if eps is None else eps
    if poly.clearance(rect.corners()) >= eps:
        return rect
    if not contains_rect(poly, rect, "closed", tol=tol):
        raise CannotHarden("placement is not inside the closed polygon")

    towards = poly.centroid() - rect.center
    dist = float(np.linalg.norm(towards))
    if dist > 0:
        shifted = rect.moved(center=rect.center + towards * (SHIFT_FACTOR * eps / dist))
        if poly.clearance(shifted.corners()) >= eps:
            return shifted

    best = None
    for budget in budgets:
        for phi in sorted(np.linspace(-budget, budget, ROTATION_STEPS), key=abs):
            trial = rect.moved(angle=rect.angle + phi)
            clearance, center = max_clearance_center(poly, trial.corner_offsets())
            if best is None or clearance > best[0]:
                best = (clearance, trial.moved(center=center))
        if best[0] >= eps:
            return best[1]
    raise CannotHarden(f"best clearance {best[0]:.3g} below required {eps:.3g}")


@dataclass(frozen=True, eq=False)
class Theorem1Construction:
    shadow: Shadow
    scaffold: Shadow
    square: CornerSquare
    closed_placement: RectPlacement
    placement: RectPlacement


def _check_direction(dims: BoxDims, direction) -> tuple[np.ndarray, Shadow]:
    u = normalize_direction(direction)
    orient = orientation_from_direction(u)
    if is_face_parallel(np.abs(u)):
        raise FaceParallelDirection(f"direction {u.tolist()} is (nearly) parallel to a box face")
    try:
        shadow = project_box(dims, orient)
    except AmbiguousClassification as exc:
        raise FaceParallelDirection(str(exc)) from exc
    return u, shadow


def theorem1_construction(dims: BoxDims, direction, eps: float | None = None) -> Theorem1Construction:
    """Full record of the smallest-face construction inside the shadow along ``direction``."""
    _, shadow = _check_direction(dims, direction)
    a, b, _ = dims.as_tuple()
    scaffold_dims = BoxDims(a, b, b)
    scaffold = project_box(scaffold_dims, shadow.orientation)
    sides = scaffold_dims.as_tuple()
    b_axes = [i for i in range(3) if sides[i] == b]

    candidates = []
    for j in range(len(scaffold.polygon)):
        try:
            sq = corner_square(scaffold, j, side=a, allowed_axes=b_axes)
        except VertexNotCornerCandidate:
            continue
        if sq.fits:
            candidates.append(sq)
    if not candidates:
        raise ConstructionFailed("no shadow corner admits the corner square")
    square = max(candidates, key=lambda c: (c.slack, -c.anchor_vertex))

    _, iq, ir = square.axes
    # B lies on the side from the short axis; stretch toward the other side
    if sides[iq] <= sides[ir]:
        A, B, C = square.A, square.B, square.C
    else:
        A, B, C = square.A, square.C, square.B
    C_ext = A + (b / a) * (C - A)
    D_ext = B + C_ext - A
    ab = B - A
    closed = RectPlacement((A + D_ext) / 2.0, math.atan2(ab[1], ab[0]), a, b)
    # stretch validity is checked, not assumed
    if not contains_rect(scaffold.polygon, closed, "closed"):
        raise ConstructionFailed("stretched rectangle leaves the scaffold shadow")
    if not contains_rect(shadow.polygon, closed, "closed"):
        raise ConstructionFailed("rectangle leaves the box shadow")
    try:
        hardened = harden_to_interior(shadow.polygon, closed, eps=eps)
    except CannotHarden as exc:
        raise ConstructionFailed(f"could not move the rectangle into the interior: {exc}") from exc
    return Theorem1Construction(shadow, scaffold, square, closed, hardened)


def face_rectangle_in_shadow(dims: BoxDims, direction, eps: float | None = None) -> RectPlacement:
    """An ``a x b`` rectangle strictly inside the shadow of ``dims`` along ``direction``."""
    return theorem1_construction(dims, direction, eps=eps).placement


@dataclass(frozen=True, eq=False)
class PassageSpec:
    """A straight tunnel: the prism over ``cross_section`` along ``direction``.

    ``cross_section`` lives in the shadow plane of ``orientation_from_direction(direction)``,
    whose origin is the box centre.
    """

    direction: np.ndarray
    cross_section: RectPlacement
    clearance: float
    box: BoxDims
    scale: float
    measured_clearance: float

    def orientation(self):
        return orientation_from_direction(self.direction)

    def cross_section_body(self) -> np.ndarray:
        """Cross-section corners in the box frame, in the plane through the box centre."""
        flat = self.cross_section.corners()
        world = np.column_stack([flat, np.zeros(4)])
        return self.orientation().inverse_apply(world)

    def verify(self) -> bool:
        """Independent re-check against a freshly computed shadow."""
        shadow = project_box(self.box, orientation_from_direction(self.direction))
        return contains_rect(shadow.polygon, self.cross_section, "open", eps=self.clearance)


def build_passage(dims: BoxDims, direction, lam: float, eps: float | None = None) -> PassageSpec:
    """Tunnel through ``dims`` along ``direction`` admitting the box scaled by ``lam``."""
    from .nieuwland import best_lambda_for_direction

    if not lam > 0:
        raise ValueError("scale must be positive")
    u, shadow = _check_direction(dims, direction)
    poly = shadow.polygon
    eps = default_margin(poly) if eps is None else eps
    a, b, _ = dims.as_tuple()

    if lam <= 1.0:
        closed = theorem1_construction(dims, u, eps=eps).closed_placement
        # shadow is symmetric about the origin, so scaling about it stays inside
        rect = RectPlacement(closed.center * lam, closed.angle, a * lam, b * lam)
    else:
        best, angle, placement = best_lambda_for_direction(dims, u)
        if lam >= best:
            raise DoesNotFit(f"scale {lam} exceeds the largest fit {best:.12g} along this direction")
        rect = RectPlacement(placement.center, angle, a * lam, b * lam)
    try:
        rect = harden_to_interior(poly, rect, eps=eps)
    except CannotHarden as exc:
        raise DoesNotFit(str(exc)) from exc
    if not contains_rect(poly, rect, "open", eps=eps):
        raise DoesNotFit("cross-section fails open containment")
    return PassageSpec(
        direction=u,
        cross_section=rect,
        clearance=eps,
        box=dims,
        scale=lam,
        measured_clearance=poly.clearance(rect.corners()),
    )
