"""Shared fixtures and samplers for the test suite."""

import math
import random

import pytest

from minkbilliards import Ellipsoid, LineType, Vec3, mink_dot, trace
from minkbilliards.simulator import surface_normal

# trajectories approaching the tropic curve closer than this (relative
# |<n,n>| at a bounce) are excluded from "random admissible starts": the
# reflection is undefined on the curve itself and its conditioning degrades
# like the inverse of this margin.
TROPIC_MARGIN = 2e-3


@pytest.fixture()
def e421() -> Ellipsoid:
    return Ellipsoid(4.0, 2.0, 1.0)


def random_interior_point(rng: random.Random, ell: Ellipsoid, slack: float = 0.1) -> Vec3:
    while True:
        p = Vec3(rng.uniform(-1, 1) * math.sqrt(ell.a1),
                 rng.uniform(-1, 1) * math.sqrt(ell.a2),
                 rng.uniform(-1, 1) * math.sqrt(ell.a3))
        if ell.surface_residual(p) < -slack:
            return p


def random_direction(rng: random.Random, linetype: LineType) -> Vec3:
    while True:
        v = Vec3(rng.gauss(0, 1), rng.gauss(0, 1), rng.gauss(0, 1))
        q = mink_dot(v, v)
        if linetype is LineType.SPACELIKE and q > 0.1 * v.euclid_norm2():
            return v
        if linetype is LineType.TIMELIKE and q < -0.1 * v.euclid_norm2():
            return v
        if linetype is LineType.LIGHTLIKE:
            h = math.hypot(v.x1, v.x2)
            if h > 1e-9:
                return Vec3(v.x1, v.x2, math.copysign(h, v.x3))


def tropic_margin(traj) -> float:
    """Smallest relative |<n,n>| over the trajectory's bounce normals."""
    m = math.inf
    for b in traj.bounces:
        n = surface_normal(b.point, traj.ellipsoid)
        m = min(m, abs(mink_dot(n, n)) / n.euclid_norm2())
    return m


def admissible_trace(rng: random.Random, ell: Ellipsoid, linetype: LineType,
                     bounces: int, margin: float = TROPIC_MARGIN):
    """A random trace that stays clear of the tropic curve (resampling)."""
    for _ in range(200):
        p = random_interior_point(rng, ell)
        v = random_direction(rng, linetype)
        t = trace(p, v, ell, bounces)
        if t.error is None and len(t.bounces) == bounces and tropic_margin(t) >= margin:
            return t
    raise AssertionError("could not sample an admissible start")
