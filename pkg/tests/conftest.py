import math

import numpy as np
import pytest

from rupert_kit.geom import convex_hull


def regular_polygon(n, side=1.0, phase=0.0):
    radius = side / (2.0 * math.sin(math.pi / n))
    t = phase + 2.0 * math.pi * np.arange(n) / n
    return convex_hull(np.column_stack([radius * np.cos(t), radius * np.sin(t)]))


def unit_square():
    return convex_hull([(0, 0), (1, 0), (1, 1), (0, 1)])


def grid_lambda_oracle(poly, aspect, angle, center_grid):
    """Largest scale of the centred (w, h) rectangle over a grid of centres.

    For a fixed centre the best scale has a closed form, so only the centre is searched.
    """
    w, h = aspect
    c, s = math.cos(angle), math.sin(angle)
    u, v = np.array([c, s]), np.array([-s, c])
    offs = np.array([sx * w / 2 * u + sy * h / 2 * v for sx in (-1, 1) for sy in (-1, 1)])
    n, d = poly.inward_normals, poly.offsets
    slack = center_grid @ n.T - d  # (n_centres, n_edges)
    reach = -(offs @ n.T)  # (4, n_edges), how far each corner eats into the edge per unit scale
    with np.errstate(divide="ignore", invalid="ignore"):
        lim = np.where(reach[None] > 0, slack[:, None, :] / reach[None], np.inf)
    lam = lim.reshape(len(center_grid), -1).min(axis=1)
    lam[np.any(slack < 0, axis=1)] = -np.inf
    i = int(np.argmax(lam))
    return float(lam[i]), center_grid[i]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def _scale_at(poly, offs, center):
    # min of affine functions of the centre, hence concave everywhere
    n, d = poly.inward_normals, poly.offsets
    slack = n @ center - d
    reach = -(offs @ n.T)
    with np.errstate(divide="ignore"):
        return float(np.min(np.where(reach > 0, slack[None, :] / reach, np.inf)))


def _ternary_max(f, lo, hi, iters=60):
    for _ in range(iters):
        m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        if f(m1) < f(m2):
            lo = m1
        else:
            hi = m2
    x = 0.5 * (lo + hi)
    return x, f(x)


def ternary_lambda_oracle(poly, aspect, angle):
    """Best scale over all centres by nested ternary search (no LP involved)."""
    w, h = aspect
    c, s = math.cos(angle), math.sin(angle)
    u, v = np.array([c, s]), np.array([-s, c])
    offs = np.array([sx * w / 2 * u + sy * h / 2 * v for sx in (-1, 1) for sy in (-1, 1)])
    lo, hi = poly.vertices.min(axis=0), poly.vertices.max(axis=0)

    def best_over_y(x):
        return _ternary_max(lambda y: _scale_at(poly, offs, np.array([x, y])), lo[1], hi[1])[1]

    x, lam = _ternary_max(best_over_y, lo[0], hi[0])
    return lam
