"""Planar and spatial geometry kernel.

Rotations, convex polygons, containment predicates and the three-variable
linear program used to fit the largest homothetic rectangle into a convex
polygon. All routines are pure and operate on small numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInput, InfeasibleInput, InvalidOrientation


@dataclass(frozen=True)
class Tolerances:
    geom: float = 1e-9
    ortho: float = 1e-12


DEFAULT_TOL = Tolerances()


# ---------------------------------------------------------------------------
# rotations


@dataclass(frozen=True, eq=False)
class Orientation:
    """A proper rotation stored as a 3x3 matrix whose rows are the images of e1, e2, e3.

    A body-frame point ``v`` (row vector) maps to ``v @ matrix`` in the world frame.
    """

    matrix: np.ndarray
    tol: float = DEFAULT_TOL.ortho

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3) or not np.all(np.isfinite(m)):
            raise InvalidOrientation("orientation must be a finite 3x3 matrix")
        if np.max(np.abs(m @ m.T - np.eye(3))) > self.tol:
            raise InvalidOrientation("rows are not orthonormal")
        if abs(np.linalg.det(m) - 1.0) > self.tol:
            raise InvalidOrientation("determinant is not +1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> Orientation:
        return cls(np.eye(3))

    def apply(self, points) -> np.ndarray:
        """Map body-frame points (shape (3,) or (n, 3)) to the world frame."""
        return np.asarray(points, dtype=float) @ self.matrix

    def inverse_apply(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.matrix.T

    def then(self, other: Orientation, tol: float | None = None) -> Orientation:
        """Compose: first ``self``, then ``other``."""
        return Orientation(self.matrix @ other.matrix, tol=self.tol if tol is None else tol)

    def edge_directions(self) -> np.ndarray:
        """World-frame unit vectors of the three body axes (one per row)."""
        return self.matrix.copy()


def rotation_about_axis(axis: Sequence[float], angle: float) -> Orientation:
    """Right-handed rotation by ``angle`` about ``axis`` (world frame)."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    # column-vector rotation matrix; rows-as-images convention is its transpose
    rot = np.eye(3) + math.sin(angle) * kx + (1.0 - math.cos(angle)) * (kx @ kx)
    return Orientation(rot.T)


def random_orientation(rng: np.random.Generator) -> Orientation:
    """Haar-uniform random rotation (QR of a Gaussian matrix with sign fix)."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return Orientation(q)


# ---------------------------------------------------------------------------
# polygons


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Counterclockwise, strictly convex polygon."""

    vertices: np.ndarray
    _normals: np.ndarray = field(init=False, repr=False)
    _offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise DegenerateInput("a polygon needs at least 3 planar vertices")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        if np.any(lengths == 0):
            raise DegenerateInput("repeated polygon vertex")
        normals = np.column_stack([-edges[:, 1], edges[:, 0]]) / lengths[:, None]
        offsets = np.einsum("ij,ij->i", normals, v)
        normals.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, "_normals", normals)
        object.__setattr__(self, "_offsets", offsets)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def inward_normals(self) -> np.ndarray:
        """Unit inward normal of edge i (from vertex i to vertex i+1)."""
        return self._normals

    @property
    def offsets(self) -> np.ndarray:
        """``n_i . x >= offsets[i]`` describes the closed polygon."""
        return self._offsets

    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    def edge_lengths(self) -> np.ndarray:
        e = self.edges()
        return np.hypot(e[:, 0], e[:, 1])

    def interior_angles(self) -> np.ndarray:
        v = self.vertices
        prev = np.roll(v, 1, axis=0) - v
        nxt = np.roll(v, -1, axis=0) - v
        cos = np.einsum("ij,ij->i", prev, nxt) / (
            np.linalg.norm(prev, axis=1) * np.linalg.norm(nxt, axis=1)
        )
        return np.arccos(np.clip(cos, -1.0, 1.0))

    def diameter(self) -> float:
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", d, d))))

    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        area = cross.sum() / 2.0
        return np.array([((v[:, 0] + w[:, 0]) * cross).sum(), ((v[:, 1] + w[:, 1]) * cross).sum()]) / (
            6.0 * area
        )

    def signed_distances(self, points) -> np.ndarray:
        """Signed distance of each point to each edge line, shape (n_points, n_edges).

        Positive values are on the interior side.
        """
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return p @ self._normals.T - self._offsets

    def clearance(self, points) -> float:
        """Smallest signed edge distance over all points (negative means outside)."""
        return float(np.min(self.signed_distances(points)))


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Sequence[float]], tol: float = DEFAULT_TOL.geom) -> ConvexPolygon:
    """Counterclockwise convex hull; duplicates and collinear points are dropped.

    Andrew's monotone chain with exact turn tests, followed by removal of
    vertices closer than ``tol`` to a neighbour or to the chord of their
    neighbours (so the hull shrinks by at most ``tol``).
    """
    pts = sorted({(float(x), float(y)) for x, y in points})
    if len(pts) < 3:
        raise DegenerateInput("need at least 3 distinct points")

    def half(seq):
        chain: list[tuple[float, float]] = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0.0:
                chain.pop()
            chain.append(p)
        return chain

    hull = half(pts)[:-1] + half(reversed(pts))[:-1]
    changed = True
    while changed and len(hull) >= 3:
        changed = False
        for i in range(len(hull)):
            prev, cur, nxt = hull[i - 1], hull[i], hull[(i + 1) % len(hull)]
            chord = math.dist(prev, nxt)
            if math.dist(prev, cur) <= tol or chord == 0.0 or _cross(prev, cur, nxt) <= tol * chord:
                del hull[i]
                changed = True
                break
    if len(hull) < 3:
        raise DegenerateInput("points are collinear")
    return ConvexPolygon(np.array(hull))


def polygon_area(poly: ConvexPolygon) -> float:
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    return float(abs(np.sum(v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1])) / 2.0)


def default_margin(poly: ConvexPolygon) -> float:
    """Default open-mode clearance: 1e-6 times the polygon diameter."""
    return 1e-6 * poly.diameter()


def contains_point(
    poly: ConvexPolygon,
    pt: Sequence[float],
    mode: str = "closed",
    eps: float | None = None,
    tol: float = DEFAULT_TOL.geom,
) -> bool:
    """Point-in-convex-polygon test.

    ``closed`` accepts points within ``tol`` outside the boundary; ``open`` requires
    clearance of at least ``eps`` from every edge line.
    """
    d = poly.signed_distances(pt)
    if mode == "closed":
        return bool(np.all(d >= -tol))
    if mode == "open":
        margin = default_margin(poly) if eps is None else eps
        return bool(np.all(d >= margin))
    raise ValueError(f"unknown containment mode {mode!r}")


# ---------------------------------------------------------------------------
# rectangles


@dataclass(frozen=True, eq=False)
class RectPlacement:
    """A ``width x height`` rectangle; the width side points along ``angle``."""

    center: np.ndarray
    angle: float
    width: float
    height: float

    def __post_init__(self) -> None:
        if not (self.width > 0 and self.height > 0):
            raise ValueError("rectangle sides must be positive")
        c = np.array(self.center, dtype=float).reshape(2)
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "angle", float(self.angle) % math.pi)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        u = np.array([math.cos(self.angle), math.sin(self.angle)])
        return u, np.array([-u[1], u[0]])

    def corner_offsets(self) -> np.ndarray:
        u, v = self.axes()
        hw, hh = self.width / 2.0, self.height / 2.0
        return np.array([-hw * u - hh * v, hw * u - hh * v, hw * u + hh * v, -hw * u + hh * v])

    def corners(self) -> np.ndarray:
        """The four corners in counterclockwise order."""
        return self.center + self.corner_offsets()

    def scaled(self, factor: float) -> RectPlacement:
        return RectPlacement(self.center, self.angle, self.width * factor, self.height * factor)

    def moved(self, center=None, angle: float | None = None) -> RectPlacement:
        return RectPlacement(
            self.center if center is None else center,
            self.angle if angle is None else angle,
            self.width,
            self.height,
        )


def rect_corner_offsets(width: float, height: float, angles) -> np.ndarray:
    """Corner offsets of a centred rectangle for each angle, shape (n_angles, 4, 2)."""
    a = np.atleast_1d(np.asarray(angles, dtype=float))
    c, s = np.cos(a), np.sin(a)
    u = np.stack([c, s], axis=-1)
    v = np.stack([-s, c], axis=-1)
    hw, hh = width / 2.0, height / 2.0
    return np.stack([-hw * u - hh * v, hw * u - hh * v, hw * u + hh * v, -hw * u + hh * v], axis=1)


def contains_rect(
    poly: ConvexPolygon,
    rect: RectPlacement,
    mode: str = "closed",
    eps: float | None = None,
    tol: float = DEFAULT_TOL.geom,
) -> bool:
    return all(contains_point(poly, c, mode=mode, eps=eps, tol=tol) for c in rect.corners())


# ---------------------------------------------------------------------------
# small LP: maximise z subject to n_i . c + k_i z >= e_i, with c in the plane


@lru_cache(maxsize=64)
def _triples(m: int) -> np.ndarray:
    return np.array(list(combinations(range(m), 3)), dtype=int)


class VertexLP:
    """Exact vertex enumeration for ``max z  s.t.  n_i . c + k_i z >= e_i``.

    The normals ``n_i`` and right-hand sides ``e_i`` are fixed; only the ``z``
    coefficients ``k`` vary between solves. Each basis is a triple of constraints,
    and by Cramer's rule every determinant involved is linear in the triple's
    ``k`` values, so the normal-only cofactors are computed once here.
    """

    def __init__(self, normals: np.ndarray, e: np.ndarray, feas_tol: float):
        self.normals = np.asarray(normals, dtype=float)
        self.e = np.asarray(e, dtype=float)
        self.feas_tol = feas_tol
        tri = _triples(len(self.normals))
        self.tri = tri
        nx, ny = self.normals[tri, 0], self.normals[tri, 1]  # (T, 3)
        ee = self.e[tri]
        # cofactors of the k column for each row of the triple
        j1, j2 = [1, 0, 0], [2, 2, 1]
        sign = np.array([1.0, -1.0, 1.0])
        cross_n = nx[:, j1] * ny[:, j2] - ny[:, j1] * nx[:, j2]
        self._det = sign * cross_n
        # det_x: replace the nx column by e; det_y: replace ny by e
        self._det_x = sign * (ee[:, j1] * ny[:, j2] - ny[:, j1] * ee[:, j2])
        self._det_y = sign * (nx[:, j1] * ee[:, j2] - ee[:, j1] * nx[:, j2])
        # det_z does not involve k at all
        self._det_z = (
            nx[:, 0] * (ny[:, 1] * ee[:, 2] - ee[:, 1] * ny[:, 2])
            - ny[:, 0] * (nx[:, 1] * ee[:, 2] - ee[:, 1] * nx[:, 2])
            + ee[:, 0] * (nx[:, 1] * ny[:, 2] - ny[:, 1] * nx[:, 2])
        )

    def solve(self, k: np.ndarray):
        """Solve for each row of ``k`` (shape (batch, m)); returns (z, cx, cy) arrays.

        ``z`` is NaN where no feasible vertex exists.
        """
        k = np.atleast_2d(k)
        kk = k[:, self.tri]  # (B, T, 3)
        det = np.einsum("btj,tj->bt", kk, self._det)
        ok = np.abs(det) > 1e-12
        safe = np.where(ok, det, 1.0)
        z = self._det_z / safe
        cx = np.einsum("btj,tj->bt", kk, self._det_x) / safe
        cy = np.einsum("btj,tj->bt", kk, self._det_y) / safe
        slack = (
            cx[..., None] * self.normals[:, 0]
            + cy[..., None] * self.normals[:, 1]
            + z[..., None] * k[:, None, :]
            - self.e
        )
        ok &= np.all(slack >= -self.feas_tol, axis=-1)
        zz = np.where(ok, z, -np.inf)
        best = np.argmax(zz, axis=1)
        rows = np.arange(len(best))
        zbest = zz[rows, best]
        found = np.isfinite(zbest)
        return (
            np.where(found, zbest, np.nan),
            np.where(found, cx[rows, best], np.nan),
            np.where(found, cy[rows, best], np.nan),
        )


class HomothetSolver:
    """Largest homothet of a fixed ``w x h`` rectangle in a fixed polygon, per angle."""

    def __init__(self, poly: ConvexPolygon, aspect: tuple[float, float]):
        w, h = aspect
        if not (w > 0 and h > 0):
            raise ValueError("aspect sides must be positive")
        self.poly = poly
        self.half = (w / 2.0, h / 2.0)
        n = poly.inward_normals
        self._phi = np.arctan2(n[:, 1], n[:, 0])
        self._lp = VertexLP(n, poly.offsets, feas_tol=1e-12 * max(poly.diameter(), 1.0))

    def binding_terms(self, angles) -> np.ndarray:
        """``min_k n_i . u_k`` over the rectangle corners, shape (n_angles, m)."""
        d = self._phi[None, :] - np.atleast_1d(np.asarray(angles, dtype=float))[:, None]
        return -self.half[0] * np.abs(np.cos(d)) - self.half[1] * np.abs(np.sin(d))

    def solve(self, angles):
        lam, cx, cy = self._lp.solve(self.binding_terms(angles))
        if np.any(~np.isfinite(lam)) or np.any(lam <= 0):
            raise InfeasibleInput("polygon admits no rectangle (degenerate polygon?)")
        return lam, np.column_stack([cx, cy])


def homothet_lambdas(poly: ConvexPolygon, aspect: tuple[float, float], angles):
    """Largest scale and a centre for a ``w x h`` rectangle at each of ``angles``.

    Returns (lambdas, centers) with shapes (n,) and (n, 2).
    """
    return HomothetSolver(poly, aspect).solve(angles)


def largest_homothet_lp(poly: ConvexPolygon, aspect: tuple[float, float], angle: float):
    """Maximise lambda so that a ``lambda*w x lambda*h`` rectangle at ``angle`` fits in ``poly``.

    Returns ``(lambda, center)``.
    """
    lam, centers = homothet_lambdas(poly, aspect, [angle])
    return float(lam[0]), centers[0]


def max_clearance_center(poly: ConvexPolygon, corner_offsets: np.ndarray):
    """Translate a rigid set of corner offsets to maximise their minimum edge clearance.

    Returns ``(clearance, center)``; clearance may be negative if nothing fits.
    """
    normals = poly.inward_normals
    g = np.min(np.asarray(corner_offsets) @ normals.T, axis=0)
    lp = VertexLP(normals, poly.offsets - g, feas_tol=1e-12 * max(poly.diameter(), 1.0))
    t, cx, cy = lp.solve(-np.ones((1, len(normals))))
    return float(t[0]), np.array([cx[0], cy[0]])
