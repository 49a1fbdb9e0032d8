"""Instance builders and brute-force oracles shared by the tests."""
from __future__ import annotations

import math
import random
from functools import lru_cache

import numpy as np
from gmpy2 import mpq

from obsroute.errors import DegeneratePolygon
from obsroute.geom import ConvexPolygon, Point, polygons_disjoint, segment_hits_interior
from obsroute.visibility import Instance


def q64(v, d=64):
    return mpq(round(v * d), d)


def square(x, y, s=1):
    x, y, s = mpq(x), mpq(y), mpq(s)
    return ConvexPolygon([Point(x, y), Point(x + s, y), Point(x + s, y + s), Point(x, y + s)])


def rect(x0, y0, x1, y1):
    x0, y0, x1, y1 = (mpq(v) for v in (x0, y0, x1, y1))
    return ConvexPolygon([Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)])


def rand_poly(rng, cx, cy, r, k):
    """Hull of k random points on a circle, redrawn until it has area."""
    while True:
        angs = sorted(rng.uniform(0, 2 * math.pi) for _ in range(k))
        try:
            return ConvexPolygon.hull([(q64(cx + r * math.cos(a)), q64(cy + r * math.sin(a)))
                                       for a in angs])
        except DegeneratePolygon:
            continue


def rand_instance(rng, n, size=10):
    """n disjoint random convex polygons (3..6 vertices) in a size x size box."""
    obs = []
    while len(obs) < n:
        try:
            c = rand_poly(rng, rng.uniform(1.5, size - 1.5), rng.uniform(1.5, size - 1.5),
                          rng.uniform(0.4, 1.4), rng.randint(3, 6))
        except Exception:
            continue
        if all(polygons_disjoint(c, o) for o in obs):
            obs.append(c)
    return Instance((0, 0, size, size), tuple(obs))


def kgon(cx, cy, r, k, rot, d=256):
    return ConvexPolygon.hull([(q64(cx + r * math.cos(rot + 2 * math.pi * i / k), d),
                                q64(cy + r * math.sin(rot + 2 * math.pi * i / k), d)) for i in range(k)])


def dense_instance(rng, n, size):
    while True:
        obs, tries = [], 0
        while len(obs) < n and tries < 5000:
            tries += 1
            r = rng.uniform(0.5, 1.0)
            c = kgon(rng.uniform(r + 0.1, size - r - 0.1), rng.uniform(r + 0.1, size - r - 0.1),
                     r, rng.randint(3, 7), rng.uniform(0, 6.3))
            if all(polygons_disjoint(c, o) for o in obs):
                obs.append(c)
        if len(obs) == n:
            return Instance((0, 0, size, size), tuple(obs))


def _pocket(rng, S, flip):
    t = q64(rng.uniform(0.08, 0.14))
    a = q64(rng.uniform(1.2, 1.5))
    th = q64(rng.uniform(0.4, 0.6))
    g = q64(rng.uniform(0.08, 0.12))
    w1 = rect(t, a, a - g, a + th)                   # horizontal wall
    w2 = rect(a, t, a + th, a + th + q64(0.3))       # vertical wall, taller
    c = kgon(float(a) / 2, float(a) / 2, rng.uniform(0.2, 0.35), rng.randint(3, 6), rng.uniform(0, 6.3))
    obs = [w1, w2, c]
    if flip:
        obs = [o.map(lambda v: (S - v[0], S - v[1])) for o in obs]
    return obs


def pocket_instance(rng, S=6):
    """Two walled corner pockets each hiding a small polygon: no single
    point sees everything, so observation routes have positive length."""
    return Instance((0, 0, S, S), tuple(_pocket(rng, S, False) + _pocket(rng, S, True)))


def brute_sees(p, t, inst, k=400):
    """Segment tests against k+1 samples per target edge."""
    T = inst.obstacles[t]
    for a, b in T.edges():
        for s in range(k + 1):
            q = Point(a.x + (b.x - a.x) * mpq(s, k), a.y + (b.y - a.y) * mpq(s, k))
            if all(not segment_hits_interior(O, p, q) for O in inst.obstacles):
                return True
    return False


def triangle_scene() -> Instance:
    """A triangle, a small square below it and a tall rectangle to its right.

    The square's shadow closes behind it, so the triangle's visibility
    region has two holes: the triangle and the square with its shadow.
    """
    T = ConvexPolygon([(4, 4), (12, 4), (8, 10)])
    S = rect(mpq(15, 2), mpq(3, 2), mpq(17, 2), mpq(5, 2))
    R = rect(16, 2, 19, 12)
    return Instance((0, 0, 20, 14), (T, S, R))


def translate_family(rng, n, base=None, size=12):
    base = base or rand_poly(rng, 0, 0, 0.8, rng.randint(3, 6))
    obs = []
    tries = 0
    while len(obs) < n and tries < 2000:
        tries += 1
        dx, dy = q64(rng.uniform(1.5, size - 1.5)), q64(rng.uniform(1.5, size - 1.5))
        c = base.translate(dx, dy)
        if all(polygons_disjoint(c, o) for o in obs):
            obs.append(c)
    return Instance((0, 0, size, size), tuple(obs))


def seven_translates() -> Instance:
    """Seven translates of one triangle scattered around a centre."""
    base = ConvexPolygon([(0, 0), (1, 0), (mpq(1, 2), 1)])
    offs = [(2, 2), (6, 1), (10, 3), (1, 7), (5, 6), (9, 8), (4, 10)]
    return Instance((0, 0, 13, 13), tuple(base.translate(mpq(x), mpq(y)) for x, y in offs))


def star_triangles() -> Instance:
    """Five triangles pointing at a common centre; the centre sees all."""
    obs = []
    for k in range(5):
        a = 2 * math.pi * k / 5
        c, s = math.cos(a), math.sin(a)
        tip = (6 + 1.5 * c, 6 + 1.5 * s)
        l = (6 + 3.5 * c - 0.8 * s, 6 + 3.5 * s + 0.8 * c)
        r = (6 + 3.5 * c + 0.8 * s, 6 + 3.5 * s - 0.8 * c)
        obs.append(ConvexPolygon.hull([(q64(x), q64(y)) for x, y in (tip, l, r)]))
    return Instance((0, 0, 12, 12), tuple(obs))


def staggered_squares() -> Instance:
    """Two rows of squares separated by a horizontal corridor y in (1, 2)."""
    obs = [square(3 * k, 0) for k in range(3)] + [square(3 * k + 1, 2) for k in range(3)]
    return Instance((-2, -2, 11, 5), tuple(obs))


def grid_squares() -> Instance:
    """3 x 3 unit squares with gaps of 1/4."""
    obs = [square(1 + mpq(5, 4) * i, 1 + mpq(5, 4) * j) for i in range(3) for j in range(3)]
    return Instance((0, 0, 6, 6), tuple(obs))


@lru_cache(maxsize=None)
def orp_corpus() -> tuple:
    """30 fixed fat-polygon instances with n <= 6: 18 pocket instances (positive
    observation-route length) and 12 dense random ones."""
    out = []
    rng = random.Random(20240611)
    for _ in range(18):
        out.append(pocket_instance(rng))
    for k in range(12):
        out.append(dense_instance(rng, 3 + k % 4, 6))
    return tuple(out)


@lru_cache(maxsize=None)
def orp_results() -> tuple:
    """(instance, solve_orp route, oracle tour) for the corpus, computed once."""
    from obsroute.orp import discretized_opt_orp, solve_orp
    return tuple((inst, solve_orp(inst), discretized_opt_orp(inst)) for inst in orp_corpus())


def grid_points(box, N=200):
    """Cell centres of an N x N grid over the box, as floats."""
    x0, y0, x1, y1 = (float(v) for v in box)
    xs = x0 + (x1 - x0) * (np.arange(N) + 0.5) / N
    ys = y0 + (y1 - y0) * (np.arange(N) + 0.5) / N
    X, Y = np.meshgrid(xs, ys)
    return np.column_stack([X.ravel(), Y.ravel()])


def grid_disagreements(inst, target, V=None, N=200, band=1e-6, exact_sample=100, seed=0):
    """Grid points where sees() and membership in V disagree.

    The float kernel classifies every grid point; any point where it
    disagrees with the region, plus a random sample, is re-decided with the
    exact predicate.  Points within ``band`` of the region boundary are
    skipped.  Returns (bad points, number of exact checks).
    """
    from obsroute import kernels
    from obsroute.visibility import region_arrays, sees, sees_many, visibility_region
    V = V or visibility_region(target, inst)
    P = grid_points(inst.box, N)
    pts, offs, segs = region_arrays(V)
    member = kernels.points_in_rings(pts, offs, P)
    far = kernels.dist_to_segments(segs, P) > band
    code = sees_many(P, target, inst)
    rng = np.random.default_rng(seed)
    suspect = np.flatnonzero(far & ((code == 1) != member))
    extra = rng.choice(np.flatnonzero(far), size=min(exact_sample, int(far.sum())), replace=False)
    bad = []
    for k in sorted(set(suspect.tolist()) | set(extra.tolist())):
        p = Point(mpq(P[k, 0]), mpq(P[k, 1]))
        ok = inst.obstacle_containing(p) < 0 and sees(p, target, inst)
        if ok != V.contains(p):
            bad.append(p)
    return bad, len(suspect) + len(extra)


@lru_cache(maxsize=None)
def deletion_results() -> tuple:
    """Oracle length of every single-obstacle deletion, per corpus instance
    with a positive oracle value: tuple of (full length, [lengths])."""
    from obsroute.orp import discretized_opt_orp
    out = []
    for inst, _, O in orp_results():
        if O.length == 0:
            continue
        out.append((O.length, [discretized_opt_orp(inst.without(j)).length for j in range(inst.n)]))
    return tuple(out)
