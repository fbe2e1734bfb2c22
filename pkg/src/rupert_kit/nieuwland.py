"""Numerical Nieuwland constants for rectangular boxes.

A scaled copy ``lam * B`` passes through ``B`` by translation exactly when some
shadow of ``B`` holds the ``lam*a x lam*b`` rectangle, so the constant is the
largest such ``lam`` over all projection directions. The outer search runs over
a Fibonacci lattice on one octant of the sphere followed by a shrinking local
search; the inner problem (best rotation and position of the rectangle in a
fixed shadow) is an angle scan of exact LPs with golden-section polishing.

Results are certified lower bounds: every reported placement is re-verified.
There is no claim of global optimality.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousClassification, FaceParallelDirection
from .geom import HomothetSolver, RectPlacement, contains_rect
from .shadow import BoxDims, is_face_parallel, normalize_direction, orientation_from_direction, project_box

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
BACK_OFF = 1e-9


@dataclass(frozen=True)
class OptConfig:
    sphere_samples: int = 4000
    angle_samples: int = 360
    refine_iters: int = 40
    refine_shrink: float = 0.5
    seed: int = 0
    local_rounds: int = 60
    local_samples: int = 12

    def __post_init__(self) -> None:
        for name in ("sphere_samples", "angle_samples", "refine_iters", "local_rounds", "local_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 < self.refine_shrink < 1.0:
            raise ValueError("refine_shrink must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class OptResult:
    lambda_star: float
    direction: np.ndarray
    angle: float
    placement: RectPlacement
    evaluations: int
    history: list[tuple[np.ndarray, float]] = field(default_factory=list)
    skipped: int = 0
    dims: BoxDims | None = None

    def verify(self, back_off: float = BACK_OFF) -> bool:
        """Re-check the placement, shrunk by ``back_off``, in a freshly computed shadow."""
        shadow = project_box(self.dims, orientation_from_direction(self.direction))
        rect = self.placement.scaled(1.0 - back_off)
        return contains_rect(shadow.polygon, rect, "open", eps=0.0)


def golden_section_max(f, lo: float, hi: float, iters: int):
    """Maximise ``f`` on [lo, hi] by golden-section search; returns the best (x, f(x)) seen."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = max((fc, c), (fd, d))
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            best = max(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            best = max(best, (fd, d))
    return best[1], best[0]


def _shadow_polygon(dims: BoxDims, u: np.ndarray):
    if is_face_parallel(np.abs(u)):
        raise FaceParallelDirection(f"direction {u.tolist()} is (nearly) parallel to a box face")
    try:
        return project_box(dims, orientation_from_direction(u)).polygon
    except AmbiguousClassification as exc:
        raise FaceParallelDirection(str(exc)) from exc


def rotation_fit_factor(width: float, height: float, delta: float) -> float:
    """Scale at which a rectangle rotated by ``delta`` fits inside its unrotated self."""
    c, sn = math.cos(abs(delta)), math.sin(abs(delta))
    return min(width / (width * c + height * sn), height / (width * sn + height * c))


class _DirectionSearch:
    """Angle scan for one direction, with optional golden-section polishing."""

    def __init__(self, dims: BoxDims, u: np.ndarray, angle_samples: int):
        self.dims = dims
        self.u = u
        self.solver = HomothetSolver(_shadow_polygon(dims, u), (dims.a, dims.b))
        self.step = math.pi / angle_samples
        angles = np.arange(angle_samples) * self.step
        lams, centers = self.solver.solve(angles)
        i = int(np.argmax(lams))
        self.best = (float(lams[i]), float(angles[i]), centers[i])

    def upper_bound(self) -> float:
        """No angle beats this: every angle is within half a step of a scanned one."""
        s = rotation_fit_factor(self.dims.a, self.dims.b, self.step / 2.0)
        return self.best[0] / s * (1.0 + 1e-12)

    def refine(self, iters: int) -> None:
        if iters <= 0:
            return
        cache: dict[float, np.ndarray] = {}

        def lam_at(theta: float) -> float:
            lam, center = self.solver.solve([theta])
            cache[theta] = center[0]
            return float(lam[0])

        t0 = self.best[1]
        theta, lam = golden_section_max(lam_at, t0 - self.step, t0 + self.step, iters)
        if lam > self.best[0]:
            self.best = (lam, theta, cache[theta])

    def result(self) -> tuple[float, float, RectPlacement]:
        lam, theta, center = self.best
        theta %= math.pi
        return lam, theta, RectPlacement(center, theta, lam * self.dims.a, lam * self.dims.b)


def best_lambda_for_direction(
    dims: BoxDims,
    direction,
    angle_samples: int = OptConfig.angle_samples,
    refine_iters: int = OptConfig.refine_iters,
) -> tuple[float, float, RectPlacement]:
    """Largest ``lam`` such that the ``lam*a x lam*b`` rectangle fits the shadow along ``direction``.

    Scans ``angle_samples`` rectangle angles in [0, pi), solving the exact LP at each,
    then golden-section refines around the best. Returns ``(lam, angle, placement)``
    where the placement is the closed-containment optimum.
    """
    search = _DirectionSearch(dims, normalize_direction(direction), angle_samples)
    search.refine(refine_iters)
    return search.result()


def passes_through(dims: BoxDims, lam: float, direction) -> bool:
    """Whether ``lam * dims`` passes through ``dims`` along ``direction`` (strict inequality)."""
    best, _, _ = best_lambda_for_direction(dims, direction)
    return best > lam


def octant_fibonacci(n: int) -> np.ndarray:
    """About ``n`` Fibonacci-lattice directions with all components positive."""
    total = 8 * n
    i = np.arange(total) + 0.5
    z = 1.0 - 2.0 * i / total
    rad = np.sqrt(1.0 - z * z)
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    pts = np.column_stack([rad * np.cos(phi), rad * np.sin(phi), z])
    return pts[np.all(pts > 0, axis=1)]


def _scan(dims: BoxDims, u: np.ndarray, cfg: OptConfig):
    try:
        return _DirectionSearch(dims, u, cfg.angle_samples)
    except FaceParallelDirection:
        return None


def _scan_chunk(args):
    dims, dirs, cfg = args
    out = []
    for u in dirs:
        search = _scan(dims, u, cfg)
        out.append(None if search is None else (search.best, search.upper_bound()))
    return out


def _worker_count(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("RUPERT_KIT_THREADS", "1") or 1)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def _tangent_basis(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    e = np.zeros(3)
    e[int(np.argmin(np.abs(u)))] = 1.0
    t1 = e - np.dot(e, u) * u
    t1 /= np.linalg.norm(t1)
    return t1, np.cross(u, t1)


def nieuwland_constant(dims: BoxDims, cfg: OptConfig = OptConfig(), workers: int | None = 1) -> OptResult:
    """Search all directions for the largest passable scale of ``dims``.

    Deterministic for a fixed ``cfg`` regardless of ``workers``; ``workers=None``
    reads ``RUPERT_KIT_THREADS`` (0 means one per CPU).
    """
    # work on the box scaled to c = 1 so scaled boxes take bit-identical paths
    unit = dims.scaled(1.0 / dims.c)
    lattice = octant_fibonacci(cfg.sphere_samples)

    # phase 1: angle scans over the lattice (order-independent, may run in parallel)
    n_workers = _worker_count(workers)
    if n_workers > 1 and len(lattice) > 1:
        chunks = np.array_split(lattice, n_workers * 4)
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            scans = [r for part in pool.map(_scan_chunk, [(unit, c, cfg) for c in chunks]) for r in part]
    else:
        scans = _scan_chunk((unit, lattice, cfg))

    evaluations = sum(r is not None for r in scans)
    skipped = len(scans) - evaluations
    floor = max(r[0][0] for r in scans if r is not None) if evaluations else None
    if floor is None:
        raise FaceParallelDirection("every lattice direction was face-parallel")

    # phase 2: polish only directions whose scan bound reaches the best scan value
    best = None
    history: list[tuple[np.ndarray, float]] = []
    for u, r in zip(lattice, scans):
        if r is None or r[1] < floor:
            continue
        search = _DirectionSearch(unit, u, cfg.angle_samples)
        search.refine(cfg.refine_iters)
        res = search.result()
        # strict improvement only: ties keep the lowest lattice index
        if best is None or res[0] > best[1][0]:
            best = (u, res)
            history.append((u.copy(), res[0]))

    # phase 3: shrinking random search around the incumbent
    rng = np.random.default_rng(cfg.seed)
    radius = 2.0 * math.sqrt(math.pi / (2.0 * len(lattice)))
    for _ in range(cfg.local_rounds):
        u0 = best[0]
        t1, t2 = _tangent_basis(u0)
        steps = rng.uniform(-1.0, 1.0, size=(cfg.local_samples, 2)) * radius
        improved = False
        for s1, s2 in steps:
            v = np.abs(u0 + s1 * t1 + s2 * t2)
            v /= np.linalg.norm(v)
            search = _scan(unit, v, cfg)
            if search is None:
                skipped += 1
                continue
            evaluations += 1
            if search.upper_bound() <= best[1][0]:
                continue
            search.refine(cfg.refine_iters)
            res = search.result()
            if res[0] > best[1][0]:
                best = (v, res)
                history.append((v.copy(), res[0]))
                improved = True
        if not improved:
            radius *= cfg.refine_shrink

    u, (lam, angle, placement) = best
    k = dims.c
    placement = RectPlacement(placement.center * k, placement.angle, placement.width * k, placement.height * k)
    return OptResult(
        lambda_star=lam,
        direction=u,
        angle=angle,
        placement=placement,
        evaluations=evaluations,
        history=history,
        skipped=skipped,
        dims=dims,
    )
