"""Randomised property suites for the shadow, corner-square, fold and witness constructions.

Each suite returns a :class:`SuiteResult` holding named checks with the worst
measured value and the tolerance it was held to. Containment is re-checked
with :func:`hull_clearance_bruteforce`, which works from the raw projected box
corners and does not use the hull or polygon code.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cross_section import fold_case, fold_cross_section, rect_in_parallelogram, theorem2_witness
from .errors import RupertError
from .geom import random_orientation
from .nieuwland import best_lambda_for_direction
from .passage import corner_squares, theorem1_construction
from .shadow import (
    UNIT_CUBE,
    BoxDims,
    ShadowKind,
    cube_area_extent_identity,
    normal_sum_check,
    orientation_from_direction,
    project_box,
)

SUITES = ("lemma1", "lemma3", "lemma4", "theorem1", "theorem2")


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    trials: int
    seed: int
    checks: list[Check] = field(default_factory=list)
    counters: dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, measured: float, tolerance: float, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), float(measured), float(tolerance), detail))


def supporting_halfplanes(points, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Half-planes ``n . x >= c`` bounded by every line through two of ``points``
    that leaves all the points on one side. Their intersection is the hull.
    """
    pts = np.asarray(points, dtype=float)
    scale = max(1.0, float(np.max(np.abs(pts))))
    i, j = np.array(list(itertools.combinations(range(len(pts)), 2))).T
    d = pts[j] - pts[i]
    length = np.hypot(d[:, 0], d[:, 1])
    keep = length > tol * scale
    i, d, length = i[keep], d[keep], length[keep]
    n = np.column_stack([-d[:, 1], d[:, 0]]) / length[:, None]
    side = np.einsum("pk,qk->pq", n, pts) - np.einsum("pk,pk->p", n, pts[i])[:, None]
    up = np.all(side >= -tol * scale, axis=1)
    down = np.all(side <= tol * scale, axis=1)
    normals = np.concatenate([n[up], -n[down]])
    offsets = np.concatenate([np.einsum("pk,pk->p", n[up], pts[i][up]), -np.einsum("pk,pk->p", n[down], pts[i][down])])
    return normals, offsets


def hull_clearance_bruteforce(points, queries, tol: float = 1e-12) -> float:
    """Smallest distance from ``queries`` to the boundary of the hull of ``points``.

    Negative results mean some query lies outside.
    """
    normals, offsets = supporting_halfplanes(points, tol)
    q = np.atleast_2d(np.asarray(queries, dtype=float))
    return float(np.min(q @ normals.T - offsets))


def _random_direction(rng: np.random.Generator, min_component: float) -> np.ndarray:
    while True:
        u = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        if np.min(np.abs(u)) > min_component:
            return u


def _random_dims(rng: np.random.Generator) -> BoxDims:
    return BoxDims.sorted(rng.uniform(0.2, 3.0, 3))


def suite_lemma1(trials: int, seed: int) -> SuiteResult:
    res = SuiteResult("lemma1", trials, seed)
    rng = np.random.default_rng(seed)
    pqr_err = area_err = sym_err = 0.0
    min_excess = math.inf
    hexagons = rectangles = 0
    for _ in range(trials):
        orient = random_orientation(rng)
        pqr = normal_sum_check(orient)
        pqr_err = max(pqr_err, abs(float(np.sum(pqr**2)) - 1.0))
        area, extent = cube_area_extent_identity(orient)
        area_err = max(area_err, abs(area - extent))
        shadow = project_box(UNIT_CUBE, orient)
        if shadow.kind is ShadowKind.HEXAGON:
            hexagons += 1
            v = shadow.polygon.vertices
            sums = v[:3] + v[3:]
            sym_err = max(sym_err, float(np.max(np.abs(sums - sums.mean(axis=0)))))
            min_excess = min(min_excess, float(np.min(shadow.polygon.interior_angles())) - math.pi / 2)
        else:
            rectangles += 1
    res.counters.update(hexagons=hexagons, rectangles=rectangles)
    res.add("pqr_unit_sum", pqr_err < 1e-12, pqr_err, 1e-12)
    res.add("cube_area_equals_extent", area_err < 1e-9, area_err, 1e-9)
    res.add("hexagon_central_symmetry", sym_err < 1e-9, sym_err, 1e-9)
    res.add("hexagon_angles_obtuse", min_excess > 0, min_excess, 0.0, "min(angle) - pi/2")
    return res


def suite_lemma3(trials: int, seed: int) -> SuiteResult:
    res = SuiteResult("lemma3", trials, seed)
    rng = np.random.default_rng(seed)
    disagreements = 0
    min_pairs = 3
    offset_err = 0.0
    interior_misses = 0
    done = 0
    while done < trials:
        shadow = project_box(UNIT_CUBE, random_orientation(rng))
        if shadow.kind is not ShadowKind.HEXAGON:
            continue
        done += 1
        normals, offsets = supporting_halfplanes(orientation_corners_2d(shadow))
        squares = corner_squares(shadow)
        for sq in squares:
            clear = float(np.min(normals @ sq.D - offsets))
            if abs(sq.slack) > 1e-9 and (clear >= -1e-9) != sq.fits:
                disagreements += 1
            if sq.slack > 1e-9 and not clear > 0:
                interior_misses += 1
            offset_err = max(offset_err, float(np.max(np.abs(np.subtract(sq.offsets, sq.predicted_offsets())))))
        # opposite vertices share their square's fate, so count pairs
        min_pairs = min(min_pairs, sum(sq.fits for sq in squares) // 2)
    res.add("criterion_matches_bruteforce", disagreements == 0, disagreements, 0)
    res.add("at_least_two_pairs_fit", min_pairs >= 2, min_pairs, 2)
    res.add("offset_formulas", offset_err < 1e-9, offset_err, 1e-9)
    res.add("fourth_corner_interior", interior_misses == 0, interior_misses, 0)
    return res


def orientation_corners_2d(shadow) -> np.ndarray:
    """Raw projected box corners (all 8), independent of the hull."""
    return shadow.orientation.apply(shadow.dims.body_vertices())[:, :2]


def suite_lemma4(trials: int, seed: int) -> SuiteResult:
    res = SuiteResult("lemma4", trials, seed)
    rng = np.random.default_rng(seed)
    cases = {1: 0, 2: 0}
    worst = math.inf
    area_err = 0.0
    obtuse_fail = 0
    for _ in range(trials):
        a, b = sorted(rng.uniform(0.1, 3.0, 2))
        alpha = rng.uniform(1e-6, 1.45)
        theta = rng.uniform(0.0, math.pi)
        P = fold_cross_section((a, b), alpha, theta)
        area_err = max(area_err, abs(P.area() - a * b / math.cos(alpha)) / (a * b / math.cos(alpha)))
        if min(P.angle_at(2), P.angle_at(3)) <= math.pi / 2:
            obtuse_fail += 1
        cases[fold_case(P)] += 1
        rect = rect_in_parallelogram(P, (a, b))
        worst = min(worst, hull_clearance_bruteforce(P.vertices, rect.corners()) / b)
    need = min(100, max(1, trials // 100))
    res.counters.update(case1=cases[1], case2=cases[2])
    res.add("placement_inside", worst >= -1e-9, worst, -1e-9, "relative clearance")
    res.add("both_cases_hit", min(cases.values()) >= need, min(cases.values()), need)
    res.add("fold_area_scaling", area_err < 1e-9, area_err, 1e-9)
    res.add("obtuse_at_2_and_3", obtuse_fail == 0, obtuse_fail, 0)
    return res


def suite_theorem1(trials: int, seed: int) -> SuiteResult:
    res = SuiteResult("theorem1", trials, seed)
    rng = np.random.default_rng(seed)
    failures = 0
    min_clear = math.inf
    detail = ""
    for i in range(trials):
        dims = _random_dims(rng)
        u = _random_direction(rng, 1e-3)
        try:
            c = theorem1_construction(dims, u)
        except RupertError as exc:
            failures += 1
            detail = f"trial {i}: {type(exc).__name__}: {exc}"
            continue
        raw = orientation_from_direction(u).apply(dims.body_vertices())[:, :2]
        clear = hull_clearance_bruteforce(raw, c.placement.corners())
        sides = sorted((c.placement.width, c.placement.height))
        if abs(sides[0] - dims.a) > 1e-12 * dims.c or abs(sides[1] - dims.b) > 1e-12 * dims.c:
            failures += 1
            detail = f"trial {i}: wrong rectangle sides {sides}"
        min_clear = min(min_clear, clear)
    res.add("construction_succeeds", failures == 0, failures, 0, detail)
    res.add("positive_clearance", min_clear > 0, min_clear, 0.0)
    return res


def suite_theorem2(trials: int, seed: int) -> SuiteResult:
    res = SuiteResult("theorem2", trials, seed)
    rng = np.random.default_rng(seed)
    side_err = angle_err = shadow_err = 0.0
    min_box_clear = math.inf
    failures = 0
    cases = {1: 0, 2: 0}
    detail = ""
    for i in range(trials):
        dims = _random_dims(rng)
        u = _random_direction(rng, 1e-2)
        best, _, _ = best_lambda_for_direction(dims, u)
        lam = best * rng.uniform(0.3, 0.999)
        try:
            w = theorem2_witness(dims, lam, u)
        except RupertError as exc:
            failures += 1
            detail = f"trial {i}: {type(exc).__name__}: {exc}"
            continue
        cases[w.case] += 1
        r = w.rect3d
        sides = np.linalg.norm(np.roll(r, -1, axis=0) - r, axis=1)
        side_err = max(side_err, float(np.max(np.abs(np.sort(sides) - np.sort([lam * dims.a] * 2 + [lam * dims.b] * 2)))))
        for k in range(4):
            e1, e2 = r[(k + 1) % 4] - r[k], r[k - 1] - r[k]
            angle_err = max(angle_err, abs(float(np.dot(e1, e2))) / (np.linalg.norm(e1) * np.linalg.norm(e2)))
        shadow_err = max(shadow_err, float(np.max(np.abs(w.quad.points[:, :2] - w.shadow_rect.corners()))))
        min_box_clear = min(min_box_clear, w.box_clearance())
    res.counters.update(case1=cases[1], case2=cases[2])
    res.add("witness_succeeds", failures == 0, failures, 0, detail)
    res.add("side_lengths", side_err < 1e-9, side_err, 1e-9)
    res.add("right_angles", angle_err < 1e-9, angle_err, 1e-9, "max |cos|")
    res.add("quad_shadow_is_rectangle", shadow_err < 1e-9, shadow_err, 1e-9)
    res.add("strictly_inside_box", min_box_clear > 0, min_box_clear, 0.0)
    return res


_RUNNERS = {
    "lemma1": suite_lemma1,
    "lemma3": suite_lemma3,
    "lemma4": suite_lemma4,
    "theorem1": suite_theorem1,
    "theorem2": suite_theorem2,
}


def run_suite(name: str, trials: int, seed: int) -> list[SuiteResult]:
    if name == "all":
        return [_RUNNERS[s](trials, seed) for s in SUITES]
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    return [_RUNNERS[name](trials, seed)]
