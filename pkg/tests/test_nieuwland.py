import math

import numpy as np
import pytest

from conftest import grid_lambda_oracle
from rupert_kit.errors import FaceParallelDirection
from rupert_kit.geom import RectPlacement, contains_rect
from rupert_kit.nieuwland import (
    OptConfig,
    best_lambda_for_direction,
    golden_section_max,
    nieuwland_constant,
    octant_fibonacci,
    passes_through,
    rotation_fit_factor,
)
from rupert_kit.shadow import UNIT_CUBE, BoxDims, normalize_direction, project_box_along

CLASSICAL = 3 * math.sqrt(2) / 4
SMALL = OptConfig(sphere_samples=150, angle_samples=90, refine_iters=25, local_rounds=8, local_samples=6)


def test_golden_section_finds_peak():
    x, fx = golden_section_max(lambda t: -(t - 0.3) ** 2, 0.0, 1.0, 60)
    assert x == pytest.approx(0.3, abs=1e-9)
    assert fx == pytest.approx(0.0, abs=1e-15)


def test_rotation_fit_factor():
    assert rotation_fit_factor(1, 1, 0.0) == 1.0
    assert rotation_fit_factor(1, 1, math.pi / 4) == pytest.approx(1 / math.sqrt(2))
    # a rotated rectangle scaled by the factor fits inside the original
    w, h, d = 1.0, 2.5, 0.03
    k = rotation_fit_factor(w, h, d)
    box = project_box_along(BoxDims(w, h, 10.0), [0, 0, 1]).polygon
    assert contains_rect(box, RectPlacement((0, 0), d, k * w, k * h), "closed", tol=1e-12)


def test_octant_fibonacci():
    pts = octant_fibonacci(500)
    assert abs(len(pts) - 500) <= 10
    assert np.all(pts > 0)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)


class TestBestLambda:
    def test_cube_diagonal(self):
        lam, angle, placement = best_lambda_for_direction(UNIT_CUBE, [1, 1, 1])
        assert lam == pytest.approx((3 - math.sqrt(3)) * math.sqrt(2 / 3), abs=1e-9)
        poly = project_box_along(UNIT_CUBE, [1, 1, 1]).polygon
        assert contains_rect(poly, placement, "closed")
        # origin-centred brute-force oracle over a fine angle grid
        oracle = max(grid_lambda_oracle(poly, (1, 1), t, np.zeros((1, 2)))[0] for t in np.linspace(0, math.pi, 4001))
        assert lam == pytest.approx(oracle, abs=1e-6)

    def test_classical_direction(self):
        lam, _, _ = best_lambda_for_direction(UNIT_CUBE, [2, 2, 1])
        assert lam == pytest.approx(CLASSICAL, abs=1e-12)
        assert lam <= CLASSICAL + 1e-12

    def test_cube_at_least_one(self, rng):
        for _ in range(20):
            u = np.abs(rng.standard_normal(3)) + 1e-3
            assert best_lambda_for_direction(UNIT_CUBE, u)[0] >= 1 - 1e-9

    def test_face_parallel(self):
        with pytest.raises(FaceParallelDirection):
            best_lambda_for_direction(UNIT_CUBE, [1e-9, 0.0, 1.0])


class TestPassesThrough:
    def test_examples(self, rng):
        assert passes_through(UNIT_CUBE, 1.0, [1, 1, 1])
        for _ in range(5):
            u = normalize_direction(rng.standard_normal(3))
            assert not passes_through(UNIT_CUBE, 1.2, u if np.min(np.abs(u)) > 1e-3 else [1, 1, 1])
            dims = BoxDims.sorted(rng.uniform(0.2, 3, 3))
            assert passes_through(dims, 0.1, np.abs(u) + 1e-2)


class TestNieuwlandConstant:
    def test_small_run_is_verified(self):
        res = nieuwland_constant(UNIT_CUBE, SMALL)
        assert res.verify()
        assert 1.0 < res.lambda_star <= CLASSICAL + 1e-9
        assert res.history and res.history[-1][1] == res.lambda_star
        assert [lam for _, lam in res.history] == sorted(lam for _, lam in res.history)

    def test_scale_invariance(self):
        a = nieuwland_constant(UNIT_CUBE, SMALL)
        b = nieuwland_constant(UNIT_CUBE.scaled(2.0), SMALL)
        assert a.lambda_star == b.lambda_star
        assert np.array_equal(a.direction, b.direction)
        assert b.verify()

    def test_deterministic_across_workers(self):
        cfg = OptConfig(sphere_samples=60, angle_samples=60, refine_iters=10, local_rounds=3, local_samples=4, seed=3)
        a = nieuwland_constant(BoxDims(1, 2, 3), cfg, workers=1)
        b = nieuwland_constant(BoxDims(1, 2, 3), cfg, workers=2)
        assert a.lambda_star == b.lambda_star
        assert np.array_equal(a.direction, b.direction)
        assert a.evaluations == b.evaluations

    def test_elongated_box_is_strictly_rupert(self):
        res = nieuwland_constant(BoxDims(1, 1, 2), SMALL)
        assert res.lambda_star >= 1 + 1e-6
        assert res.verify()

    def test_config_validation(self):
        with pytest.raises(ValueError):
            OptConfig(sphere_samples=0)
        with pytest.raises(ValueError):
            OptConfig(refine_shrink=1.0)
