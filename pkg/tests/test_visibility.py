from __future__ import annotations

import math
import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from obsroute.errors import NotTranslateFamily, PointInsideObstacle
from obsroute.geom import Point, pt, ray_entry, segment_hits_interior, segment_intersection
from obsroute.visibility import (Instance, common_observation_point, filled_region_ring,
                                 instance_arrangement, is_translate_family, region_is_connected,
                                 sees, translate_intersection_simplification, visibility_region,
                                 visible_directions)

from instances import (brute_sees, grid_disagreements, q64, rand_instance, seven_translates,
                       square, staggered_squares, translate_family, triangle_scene)


def _free_point(rng, inst):
    x0, y0, x1, y1 = (float(v) for v in inst.box)
    while True:
        p = pt(q64(rng.uniform(x0, x1), 256), q64(rng.uniform(y0, y1), 256))
        if inst.obstacle_containing(p) < 0 and inst.in_box(p):
            return p


def _certify_visible(p, t, inst):
    """Exact witness: a sight line along the middle of a visible interval."""
    I = visible_directions(p, t, inst)
    T = inst.obstacles[t]
    for a, b in I.intervals:
        d = (a[0] + b[0], a[1] + b[1]) if a != b else a
        s = ray_entry(T, p, d)
        if s is None:
            continue
        q = Point(p.x + d[0] * s, p.y + d[1] * s)
        if all(not segment_hits_interior(O, p, q) for O in inst.obstacles):
            return True
    return False


VERTEX_C = 3        # measured maximum on this corpus is 1.5

ROW = Instance((-1, -1, 9, 2), (square(0, 0), square(3, 0), square(6, 0)))


def test_boundary_point_sees_itself():
    inst = triangle_scene()
    assert sees(pt(8, 4), 0, inst)
    assert sees(pt(4, 4), 0, inst)


def test_collinear_row_far_square_hidden():
    p = pt(-mpq(1, 2), mpq(1, 2))
    assert not sees(p, 2, ROW)
    assert not brute_sees(p, 2, ROW, k=2500)
    assert sees(p, 0, ROW)


def test_inside_raises():
    with pytest.raises(PointInsideObstacle):
        sees(pt(mpq(1, 2), mpq(1, 2)), 1, ROW)


@pytest.mark.parametrize("seed", range(6))
def test_sees_against_brute_force(seed):
    rng = random.Random(seed)
    inst = rand_instance(rng, rng.randint(2, 5))
    for _ in range(25):
        p = _free_point(rng, inst)
        for t in range(inst.n):
            if sees(p, t, inst):
                assert _certify_visible(p, t, inst)
            else:
                assert not brute_sees(p, t, inst, k=60)


def test_single_obstacle_region():
    inst = Instance((0, 0, 10, 10), (square(4, 4, 2),))
    V = visibility_region(0, inst)
    assert len(V.holes) == 1
    assert V.area == pytest.approx(96)


def test_triangle_scene_two_holes():
    inst = triangle_scene()
    V = visibility_region(0, inst)
    assert len(V.holes) == 2
    assert region_is_connected(0, inst)


def test_seven_translates_one_hole():
    inst = seven_translates()
    assert is_translate_family(inst)
    for i in range(inst.n):
        assert len(visibility_region(i, inst).holes) == 1


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 5))
def test_translate_family_one_hole(seed, n):
    inst = translate_family(random.Random(seed), n)
    for i in range(inst.n):
        assert len(visibility_region(i, inst).holes) == 1


@pytest.mark.parametrize("seed", range(8))
def test_region_structure(seed):
    rng = random.Random(100 + seed)
    inst = rand_instance(rng, rng.randint(1, 5))
    arr = instance_arrangement(inst).arr
    for i in range(inst.n):
        V = visibility_region(i, inst)
        assert region_is_connected(i, inst)
        assert 1 <= len(V.holes) <= inst.n ** 2
        assert V.vertex_count <= len(arr.vertices)
        assert V.vertex_count <= VERTEX_C * (inst.m + inst.n ** 2)
        C = inst.obstacles[i]
        for a, b in C.edges():
            assert V.contains(a)
            assert V.contains(Point((a.x + b.x) / 2, (a.y + b.y) / 2))


@pytest.mark.parametrize("seed", range(4))
def test_grid_classification(seed):
    rng = random.Random(200 + seed)
    inst = rand_instance(rng, rng.randint(2, 5))
    for i in range(inst.n):
        bad, _ = grid_disagreements(inst, i, N=120)
        assert bad == []


def test_staggered_corridor_observes_all():
    inst = staggered_squares()
    for x in (-1, 0, mpq(7, 3), 5, 10):
        assert all(sees(pt(x, mpq(3, 2)), i, inst) for i in range(inst.n))
    assert common_observation_point(inst) is not None


def test_common_point_examples():
    one = Instance((0, 0, 5, 5), (square(2, 2),))
    c = common_observation_point(one)
    assert c is not None and one.obstacle_containing(c) < 0
    far = Instance((0, 0, 40, 40), (square(2, 2), square(35, 30)))
    assert common_observation_point(far) is not None
    c = common_observation_point(triangle_scene())
    if c is not None:
        assert all(sees(c, i, triangle_scene()) for i in range(3))


def test_translate_simplification_agrees():
    for inst in [seven_translates()] + [translate_family(random.Random(s), 5) for s in range(4)]:
        a = common_observation_point(inst)
        b = translate_intersection_simplification(inst)
        assert (a is None) == (b is None)
        for c in (a, b):
            if c is not None:
                assert all(sees(c, i, inst) for i in range(inst.n))


def test_translate_simplification_rejects_mixed():
    with pytest.raises(NotTranslateFamily):
        translate_intersection_simplification(triangle_scene())


def _box_exit(o, d, box):
    x0, y0, x1, y1 = box
    ts = []
    if d[0] > 0:
        ts.append((x1 - o.x) / d[0])
    if d[0] < 0:
        ts.append((x0 - o.x) / d[0])
    if d[1] > 0:
        ts.append((y1 - o.y) / d[1])
    if d[1] < 0:
        ts.append((y0 - o.y) / d[1])
    t = min(ts)
    return Point(o.x + d[0] * t, o.y + d[1] * t)


def _ray_avoids(o, e, ring):
    n = len(ring)
    return all(segment_intersection(o, e, ring[k], ring[(k + 1) % n]) is None for k in range(n))


def _escape_ray(o, ring, box):
    targets = list(ring) + [Point(box[0], box[1]), Point(box[2], box[1]),
                            Point(box[2], box[3]), Point(box[0], box[3])]
    angs = sorted({math.atan2(float(v.y - o.y), float(v.x - o.x)) for v in targets})
    angs += [angs[0] + 2 * math.pi]
    for a, b in zip(angs, angs[1:]):
        m = (a + b) / 2
        d = (q64(math.cos(m), 1 << 30), q64(math.sin(m), 1 << 30))
        if d == (0, 0):
            continue
        if _ray_avoids(o, _box_exit(o, d, box), ring):
            return True
    return False


@pytest.mark.parametrize("seed", range(3))
def test_translate_ray_property(seed):
    rng = random.Random(300 + seed)
    inst = translate_family(rng, 4)
    ring = filled_region_ring(0, inst)
    V = visibility_region(0, inst)
    found = 0
    tries = 0
    while found < 100 and tries < 20000:
        tries += 1
        o = _free_point(rng, inst)
        if V.contains(o):
            continue
        found += 1
        assert _escape_ray(o, ring, inst.box)
    assert found == 100
