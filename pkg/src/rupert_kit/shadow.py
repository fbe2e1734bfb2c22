"""Perpendicular projections (shadows) of an oriented rectangular box."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousClassification, InvalidDirection
from .geom import DEFAULT_TOL, ConvexPolygon, Orientation, Tolerances, convex_hull, polygon_area

# a component of (p, q, r) this close to 0 or 1 marks a near-face-parallel direction
FACE_PARALLEL_TOL = 1e-7

_SIGNS = np.array(list(itertools.product((-1.0, 1.0), repeat=3)))


@dataclass(frozen=True)
class BoxDims:
    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"box side {name} must be a positive finite number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not (self.a <= self.b <= self.c):
            raise ValueError(f"box sides must satisfy a <= b <= c, got {self.as_tuple()}")

    @classmethod
    def sorted(cls, sides) -> BoxDims:
        a, b, c = sorted(float(s) for s in sides)
        return cls(a, b, c)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    def scaled(self, k: float) -> BoxDims:
        return BoxDims(self.a * k, self.b * k, self.c * k)

    def body_vertices(self) -> np.ndarray:
        """The 8 corners of the box centred at the origin, shape (8, 3)."""
        return _SIGNS * (self.as_array() / 2.0)


UNIT_CUBE = BoxDims(1.0, 1.0, 1.0)


class ShadowKind(str, enum.Enum):
    HEXAGON = "hexagon"
    RECTANGLE = "rectangle"


@dataclass(frozen=True, eq=False)
class Shadow:
    """Shadow of a centred box on the horizontal plane.

    ``pqr[i]`` is the absolute vertical component of the unit direction of body
    axis ``i``; axis ``i`` carries side length ``dims.as_tuple()[i]``.
    ``vertex_origin[j]`` is the index (into ``dims.body_vertices()``) of the box
    corner projecting onto polygon vertex ``j``.
    """

    polygon: ConvexPolygon
    kind: ShadowKind
    pqr: np.ndarray
    vertical_extent: float
    vertex_origin: tuple[int, ...]
    dims: BoxDims
    orientation: Orientation

    @property
    def area(self) -> float:
        return polygon_area(self.polygon)

    def body_vertex(self, j: int) -> np.ndarray:
        return self.dims.body_vertices()[self.vertex_origin[j]]

    def edge_z_signs(self, j: int) -> np.ndarray:
        """Sign of the vertical component of each box edge leaving the corner over vertex ``j``."""
        s = _SIGNS[self.vertex_origin[j]]
        # the edge along axis i leaves the corner in direction -s_i e_i
        return np.sign(-s * self.orientation.matrix[:, 2])

    def odd_axis(self, j: int) -> int:
        """Axis whose edge at the corner over vertex ``j`` points into the shadow's interior.

        It is the edge whose vertical direction disagrees with the other two.
        """
        z = self.edge_z_signs(j)
        for i in range(3):
            others = [z[k] for k in range(3) if k != i]
            if others[0] == others[1] and z[i] != others[0]:
                return i
        raise AmbiguousClassification("corner has no odd edge (face-parallel direction?)")


def is_face_parallel(pqr, tol: float = FACE_PARALLEL_TOL) -> bool:
    pqr = np.asarray(pqr)
    return bool(np.any(pqr < tol) or np.any(pqr > 1.0 - tol))


def orientation_from_direction(u, tol: float = DEFAULT_TOL.ortho) -> Orientation:
    """Rotation taking the unit direction ``u`` (body frame) to the vertical (0, 0, 1).

    The frame is completed with the standard basis vector least aligned with ``u``
    (lowest index on ties).
    """
    u = np.asarray(u, dtype=float).reshape(3)
    if not np.all(np.isfinite(u)) or abs(np.linalg.norm(u) - 1.0) > tol:
        raise InvalidDirection(f"direction must be a unit vector, got norm {np.linalg.norm(u)!r}")
    e = np.zeros(3)
    e[int(np.argmin(np.abs(u)))] = 1.0
    x = e - np.dot(e, u) * u
    x /= np.linalg.norm(x)
    y = np.cross(u, x)
    # columns (x, y, u): body point v maps to (v.x, v.y, v.u)
    m = np.column_stack([x, y, u])
    # clean up rounding so the matrix passes the strict orthonormality check
    q, r = np.linalg.qr(m)
    q = q * np.sign(np.diag(r))
    return Orientation(q)


def normalize_direction(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0:
        raise InvalidDirection("direction must be a non-zero finite vector")
    return v / n


def normal_sum_check(orient: Orientation) -> np.ndarray:
    """Absolute third coordinates of the three rows; their squares sum to one."""
    return np.abs(orient.matrix[:, 2])


def shadow_polygon(dims: BoxDims, orient: Orientation, tol: float = DEFAULT_TOL.geom) -> ConvexPolygon:
    return convex_hull(orient.apply(dims.body_vertices())[:, :2], tol=tol)


def project_box(dims: BoxDims, orient: Orientation, tol: Tolerances = DEFAULT_TOL) -> Shadow:
    world = orient.apply(dims.body_vertices())
    poly = convex_hull(world[:, :2], tol=tol.geom)
    pqr = normal_sum_check(orient)
    extent = float(world[:, 2].max() - world[:, 2].min())

    flat = world[:, :2]
    origin = []
    for vtx in poly.vertices:
        d = np.hypot(*(flat - vtx).T)
        origin.append(int(np.argmin(d)))

    n = len(poly)
    right = np.all(np.abs(poly.interior_angles() - math.pi / 2) <= 1e-9)
    if is_face_parallel(pqr):
        if n == 4 and right:
            kind = ShadowKind.RECTANGLE
        else:
            raise AmbiguousClassification(
                f"direction is within {FACE_PARALLEL_TOL:g} of face-parallel (pqr={pqr.tolist()})"
            )
    elif n == 6:
        kind = ShadowKind.HEXAGON
    else:
        raise AmbiguousClassification(f"shadow hull has {n} vertices")
    return Shadow(
        polygon=poly,
        kind=kind,
        pqr=pqr,
        vertical_extent=extent,
        vertex_origin=tuple(origin),
        dims=dims,
        orientation=orient,
    )


def project_box_along(dims: BoxDims, direction, tol: Tolerances = DEFAULT_TOL) -> Shadow:
    """Shadow of ``dims`` looking along the (auto-normalised) body-frame ``direction``."""
    return project_box(dims, orientation_from_direction(normalize_direction(direction)), tol=tol)


def box_shadow_area(dims: BoxDims, pqr) -> float:
    """Closed form for the shadow area: sum of face areas times |cos| of their normals."""
    a, b, c = dims.as_tuple()
    p, q, r = pqr
    return b * c * p + c * a * q + a * b * r


def cube_area_extent_identity(orient: Orientation) -> tuple[float, float]:
    """(shadow area, vertical extent) of the unit cube; the two coincide."""
    poly = shadow_polygon(UNIT_CUBE, orient)
    z = orient.apply(UNIT_CUBE.body_vertices())[:, 2]
    return polygon_area(poly), float(z.max() - z.min())
