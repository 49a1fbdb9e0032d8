from __future__ import annotations

import math
import random

import pytest
from gmpy2 import mpq

from obsroute.errors import InvalidParameters, RouteIntersectsInterior
from obsroute.ewrp import (RouteKind, WatchmanRoute, best_external_watchman, coverage_check,
                           doubled_chain_route, interior_angles, make_theorem5_polygon,
                           perimeter_route, visible_arc, visible_edges)
from obsroute.geom import Point, polyline_length, pt, segment_hits_interior

from instances import kgon, q64, rand_poly, square

EPS = mpq(1, 1000)
A = 2 / math.sqrt(3)


def _corpus():
    rng = random.Random(5)
    polys = [square(0, 0), kgon(0, 0, 1, 3, 0.3, d=10 ** 9), make_theorem5_polygon(5, EPS),
             make_theorem5_polygon(7, EPS)]
    polys += [rand_poly(rng, 0, 0, rng.uniform(0.5, 2), rng.randint(3, 8)) for _ in range(12)]
    return polys


def test_perimeter_examples():
    assert perimeter_route(square(0, 0)).length == pytest.approx(4)
    tri = kgon(0, 0, 1 / math.sqrt(3), 3, 0.1, d=10 ** 12)
    assert perimeter_route(tri).length == pytest.approx(3, rel=1e-9)


def test_pentagon_perimeter_formula():
    e = float(EPS)
    want = 2 * (A + (1 - e * e) + e * math.sqrt(1 + e * e))
    assert perimeter_route(make_theorem5_polygon(5, EPS)).length == pytest.approx(want, rel=1e-9)


def test_pentagon_doubled_chain_short():
    P = make_theorem5_polygon(5, EPS)
    best = best_external_watchman(P)
    assert best.kind == RouteKind.DOUBLED_CHAIN
    assert best.chain_length < 2 * (1 + float(EPS))
    assert best.length < 4 * (1 + float(EPS))
    assert coverage_check(best, P)


def test_square_no_doubled_chain_beats_perimeter():
    P = square(0, 0)
    for i in range(4):
        for j in range(4):
            r = doubled_chain_route(P, i, j)
            if r is not None and coverage_check(r, P, samples=0):
                assert r.length >= 4 - 1e-12
    best = best_external_watchman(P)
    assert best.kind == RouteKind.PERIMETER and best.length == pytest.approx(4)


def test_full_arc_chain_has_no_legs():
    P = kgon(0, 0, 1, 6, 0.2)
    n = len(P)
    r = doubled_chain_route(P, 0, n - 1)
    assert list(r.polyline) == list(P.vertices)
    assert coverage_check(r, P)
    # the open arc misses only the closing edge, which its end vertex sees
    assert r.length == pytest.approx(2 * polyline_length(P.vertices))


@pytest.mark.parametrize("P", _corpus())
def test_perimeter_always_covers(P):
    assert coverage_check(perimeter_route(P), P)


@pytest.mark.parametrize("P", _corpus())
def test_doubling_arithmetic(P):
    n = len(P)
    for i in range(n):
        for j in range(n):
            r = doubled_chain_route(P, i, j)
            if r is not None:
                assert r.length == pytest.approx(2 * r.chain_length, rel=1e-12)


def _exterior_point(rng, P, R=4.0):
    while True:
        p = pt(q64(rng.uniform(-R, R), 1024), q64(rng.uniform(-R, R), 1024))
        if P.locate(p) < 0:
            return p


@pytest.mark.parametrize("P", _corpus())
def test_single_point_never_covers(P):
    rng = random.Random(9)
    for _ in range(100):
        p = _exterior_point(rng, P)
        r = WatchmanRoute(RouteKind.PERIMETER, (p,), 0.0)
        assert not coverage_check(r, P)


def test_route_through_interior_rejected():
    P = square(0, 0)
    r = WatchmanRoute(RouteKind.PERIMETER, (pt(-1, mpq(1, 2)), pt(2, mpq(1, 2))), 6.0)
    with pytest.raises(RouteIntersectsInterior):
        coverage_check(r, P)


@pytest.mark.parametrize("k", range(20))
def test_visible_arc_dense_sampling(k):
    rng = random.Random(1000 + k)
    P = rand_poly(rng, 0, 0, rng.uniform(0.5, 2), rng.randint(3, 8))
    p = _exterior_point(rng, P)
    vis = visible_edges(p, P)
    a, b = visible_arc(p, P)
    n = len(P)
    assert {e % n for e in range(a, b)} == set(vis)
    vs = P.vertices
    per_edge = 10_000 // n
    for e in range(n):
        u, v = vs[e], vs[(e + 1) % n]
        for s in range(1, per_edge):
            t = mpq(s, per_edge)
            q = Point(u.x + (v.x - u.x) * t, u.y + (v.y - u.y) * t)
            assert (not segment_hits_interior(P, p, q)) == (e in vis)


def test_obtuse_family_angles():
    ang5 = interior_angles(make_theorem5_polygon(5, EPS))
    assert len(ang5) == 5 and all(90 < a < 180 for a in ang5)
    ang7 = interior_angles(make_theorem5_polygon(7, EPS))
    assert len(ang7) == 7 and all(a >= 120 - 0.1 for a in ang7)


def test_obtuse_heptagon_counterexample():
    P = make_theorem5_polygon(7, EPS)
    best = best_external_watchman(P)
    assert best.kind == RouteKind.DOUBLED_CHAIN
    assert best.length < P.perimeter
    assert coverage_check(best, P)


@pytest.mark.parametrize("n", [6, 8, 9])
def test_shaved_polygons_obtuse(n):
    P = make_theorem5_polygon(n, EPS)
    assert len(P) == n and all(a > 90 for a in interior_angles(P))


def test_invalid_parameters():
    with pytest.raises(InvalidParameters):
        make_theorem5_polygon(5, 0.3)
    with pytest.raises(InvalidParameters):
        make_theorem5_polygon(4, EPS)
    with pytest.raises(InvalidParameters):
        make_theorem5_polygon(5, 0)
