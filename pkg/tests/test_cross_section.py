import math

import numpy as np
import pytest

from rupert_kit.cross_section import (
    PlanarQuad3D,
    fold_case,
    fold_cross_section,
    fold_map,
    rect_in_parallelogram,
    rect_in_parallelogram_checked,
    theorem2_witness,
)
from rupert_kit.errors import DoesNotFit, NotACrossSection, SteepPlane
from rupert_kit.geom import contains_rect, convex_hull
from rupert_kit.shadow import UNIT_CUBE, BoxDims
from rupert_kit.verify import hull_clearance_bruteforce

DIAG = np.ones(3) / math.sqrt(3)


class TestFold:
    def test_identity_fold(self):
        P = fold_cross_section((1, 2), 0.0, 0.8)
        assert np.allclose(P.vertices, P.preimage)
        sides = sorted(np.linalg.norm(P.vertices[[1, 3, 3, 2]] - P.vertices[[0, 1, 2, 0]], axis=1))
        assert sides == pytest.approx([1, 1, 2, 2])

    def test_stretch(self):
        P = fold_cross_section((1, 1), math.pi / 3, 0.0)
        span = P.vertices.max(axis=0) - P.vertices.min(axis=0)
        assert span == pytest.approx([1.0, 2.0])
        assert P.area() == pytest.approx(2.0)

    def test_obtuse_at_2_and_3(self):
        P = fold_cross_section((1, 2), 0.7, 0.4)
        assert P.angle_at(2) > math.pi / 2
        assert P.angle_at(3) > math.pi / 2
        assert P.angle_at(1) + P.angle_at(2) == pytest.approx(math.pi)

    def test_fold_map(self):
        assert np.allclose(fold_map([[1.0, 1.0]], math.pi / 4), [[1.0, math.sqrt(2)]])

    def test_steep_plane(self):
        with pytest.raises(SteepPlane):
            fold_cross_section((1, 1), math.pi / 2, 0.0)


class TestRectInParallelogram:
    def test_flat(self):
        P = fold_cross_section((1, 2), 0.0, 0.3)
        rect = rect_in_parallelogram(P, (1, 2))
        assert (rect.width, rect.height) == (1.0, 2.0)
        assert rect.angle == pytest.approx(0.3)

    def test_axis_aligned_stretch(self):
        P = fold_cross_section((1, 1), math.pi / 4, 0.0)
        rect = rect_in_parallelogram_checked(P, (1, 1))
        assert (rect.width, rect.height) == pytest.approx((1.0, 1.0))

    def test_random_folds(self, rng):
        cases = {1: 0, 2: 0}
        for _ in range(500):
            a, b = sorted(rng.uniform(0.1, 3, 2))
            P = fold_cross_section((a, b), rng.uniform(1e-6, 1.4), rng.uniform(0, math.pi))
            cases[fold_case(P)] += 1
            rect = rect_in_parallelogram(P, (a, b))
            assert sorted((rect.width, rect.height)) == pytest.approx([a, b])
            assert hull_clearance_bruteforce(P.vertices, rect.corners()) >= -1e-9 * b
        assert cases[1] > 0 and cases[2] > 0

    def test_rejects_wrong_base(self):
        P = fold_cross_section((1, 2), 0.5, 0.3)
        with pytest.raises(NotACrossSection):
            rect_in_parallelogram(P, (1, 3))


class TestPlanarQuad:
    def test_parallelogram(self):
        q = PlanarQuad3D([[0, 0, 0], [1, 0, 0], [1, 1, 1], [0, 1, 1]])
        assert q.is_parallelogram() and q.is_planar()
        assert not PlanarQuad3D([[0, 0, 0], [1, 0, 0], [1, 1, 1], [0, 1, 0]]).is_planar()


def _square_sides(points):
    return np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)


class TestTheorem2Witness:
    def test_unit_square_diagonal(self):
        w = theorem2_witness(UNIT_CUBE, 1.0, DIAG)
        assert _square_sides(w.rect3d) == pytest.approx([1.0] * 4, abs=1e-9)
        assert w.box_clearance() > 0
        assert w.quad.is_parallelogram() and w.quad.is_planar()

    def test_half_scale(self, rng):
        for _ in range(5):
            u = np.abs(rng.standard_normal(3)) + 0.05
            w = theorem2_witness(UNIT_CUBE, 0.5, u)
            assert _square_sides(w.rect_body()) == pytest.approx([0.5] * 4, abs=1e-9)
            assert w.box_clearance() > 0

    def test_near_ceiling(self):
        w = theorem2_witness(UNIT_CUBE, 1.05, [2, 2, 1])
        body = w.rect_body()
        assert _square_sides(body) == pytest.approx([1.05] * 4, abs=1e-9)
        diag = body[2] - body[0], body[3] - body[1]
        assert np.dot(*diag) == pytest.approx(0.0, abs=1e-9)
        assert np.all(np.abs(body) < 0.5)

    def test_over_ceiling(self):
        with pytest.raises(DoesNotFit):
            theorem2_witness(UNIT_CUBE, 1.2, [2, 2, 1])

    def test_box(self):
        dims = BoxDims(1, 2, 3)
        w = theorem2_witness(dims, 1.0, [0.3, 0.5, 0.9])
        assert sorted(_square_sides(w.rect3d)) == pytest.approx([1, 1, 2, 2], abs=1e-9)
        assert w.box_clearance() > 0
        flat = rect_in_parallelogram(w.folded, w.folded.base)
        assert contains_rect(convex_hull(w.folded.vertices), flat, "closed")
