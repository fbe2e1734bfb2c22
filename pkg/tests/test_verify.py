import numpy as np
import pytest

from rupert_kit.verify import SUITES, hull_clearance_bruteforce, run_suite, supporting_halfplanes


def test_square_halfplanes():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    normals, offsets = supporting_halfplanes(pts)
    assert len(normals) == 4
    assert hull_clearance_bruteforce(pts, [(0.5, 0.5)]) == pytest.approx(0.5)
    assert hull_clearance_bruteforce(pts, [(1.1, 0.5)]) == pytest.approx(-0.1)


def test_collinear_points_do_not_add_lines(rng):
    pts = np.vstack([rng.uniform(-1, 1, (10, 2)), [[0, -5], [0, 5], [0, 0]]])
    q = rng.uniform(-0.5, 0.5, (20, 2))
    from rupert_kit.geom import convex_hull

    assert hull_clearance_bruteforce(pts, q) == pytest.approx(convex_hull(pts).clearance(q), abs=1e-12)


@pytest.mark.parametrize("suite", SUITES)
def test_suites_pass_small(suite):
    (res,) = run_suite(suite, 20, 5)
    assert res.passed, [c for c in res.checks if not c.passed]


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("lemma2", 1, 0)
