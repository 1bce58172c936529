import math

import numpy as np
import pytest

from barbilliard import ConvexBody, DiskPoint, Triangle, build_tangent_map


def random_disk_points(rng, count, rmax=0.92):
    pts = []
    while len(pts) < count:
        x, y = rng.uniform(-rmax, rmax, 2)
        if x * x + y * y < rmax * rmax:
            pts.append(DiskPoint(float(x), float(y)))
    return pts


def random_triangle(rng, rmax=0.92, min_area=1e-3, min_side=5e-2):
    while True:
        p, q, r = random_disk_points(rng, 3, rmax)
        area2 = abs((q.x - p.x) * (r.y - q.y) - (q.y - p.y) * (r.x - q.x))
        sides = (p.euclid_to(q), q.euclid_to(r), r.euclid_to(p))
        if area2 > min_area and min(sides) > min_side:
            return Triangle(p, q, r)


def random_convex_polygon(rng, n=5, radius=0.6):
    angles = np.sort(rng.uniform(0, 1, n))
    if np.min(np.diff(np.concatenate([angles, [angles[0] + 1]]))) < 0.02:
        return random_convex_polygon(rng, n, radius)
    rr = rng.uniform(0.8 * radius, radius, n)
    pts = [
        DiskPoint(float(r * math.cos(2 * math.pi * a)), float(r * math.sin(2 * math.pi * a)))
        for a, r in zip(angles, rr)
    ]
    try:
        return ConvexBody.polygon(pts)
    except Exception:
        return random_convex_polygon(rng, n, radius)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def ex31_triangle():
    s3 = math.sqrt(3.0) / 4.0
    return Triangle(DiskPoint(-0.25, s3), DiskPoint(-0.25, -s3), DiskPoint(0.5, 0.0))


@pytest.fixture
def ex31_map(ex31_triangle):
    return build_tangent_map(ConvexBody.triangle(ex31_triangle))
