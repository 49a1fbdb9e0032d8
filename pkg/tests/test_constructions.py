from __future__ import annotations

import math
from functools import lru_cache

import pytest
from gmpy2 import mpq

from obsroute.constructions.grid_cluster import (GAP, cluster_squares, grid_cluster_instance,
                                                 local_tangent_vertex_check, rectilinear_tsp)
from obsroute.constructions.packing import (boundary_coverage, circles_every_obstacle, disk_packing,
                                            hull_route, sparse_lattice, strip_traversal_route,
                                            touch_route)
from obsroute.constructions.setcover import (SetSystem, check_witness, coordinate_magnitude,
                                             setcover_instance, structure_checks)
from obsroute.constructions.six_squares import (MAX_DIAMETER, six_square_instance, six_squares,
                                                verify_six_squares)
from obsroute.errors import InvalidSetSystem, PointsNotInGrid
from obsroute.geom import Point, polygons_disjoint
from obsroute.orp import validate_observation_route
from obsroute.tspn import RegionSet, exact_small_tspn, region_from_convex
from obsroute.visibility import Instance, sees


def _disjoint_and_inside(inst):
    # Instance() already validates; re-check independently on a rebuilt copy
    rebuilt = Instance(inst.box, inst.obstacles)
    obs = rebuilt.obstacles
    return all(polygons_disjoint(obs[i], obs[j]) for i in range(len(obs)) for j in range(i + 1, len(obs)))


# six squares ---------------------------------------------------------------


@lru_cache(maxsize=None)
def _six(delta):
    return six_squares(delta)


def test_six_squares_delta_one():
    inst = _six(1)
    rep = verify_six_squares(inst, delta=1)
    assert rep.ok(1)
    assert rep.diameter <= MAX_DIAMETER
    w = rep.witness
    assert all(sees(w, i, inst) for i in range(6))
    assert _disjoint_and_inside(inst)


def test_six_squares_seen_from_far_above_or_below():
    inst = _six(1)
    rep = verify_six_squares(inst)
    ys = [v.y for C in inst.obstacles for v in C.vertices]
    assert rep.witness.y > max(ys) or rep.witness.y < min(ys)


def test_six_squares_distance_is_finite():
    rep = verify_six_squares(six_square_instance(mpq(1, 11)))
    assert rep.nonempty and not rep.ok(20)


# grid clusters ---------------------------------------------------------------


def test_single_cluster_counts():
    art = grid_cluster_instance([(1, 1)], samples=2000)
    p = art.parameters
    assert p["w"] == mpq(1, 10) and p["s"] == p["w"] / 100
    assert art.instance.n == p["a"] * p["b"] + 25 * p["n"] == 26
    assert _disjoint_and_inside(art.instance)


def test_cluster_counts_three_points():
    S = [(0, 0), (2, 1), (1, 2)]
    art = grid_cluster_instance(S, verify=False)
    p = art.parameters
    assert p["w"] == mpq(1, 10 * 2 * 3)
    assert art.instance.n == 4 + 75
    assert all(len(c) == 25 for c in art.clusters.values())


def test_cluster_layout_gap():
    sq = cluster_squares(Point(mpq(0), mpq(0)), mpq(1))
    gaps = []
    for i in range(len(sq)):
        for j in range(i + 1, len(sq)):
            a, b = sq[i].bbox, sq[j].bbox
            dx = max(a[0] - b[2], b[0] - a[2])
            dy = max(a[1] - b[3], b[1] - a[3])
            gaps.append(max(dx, dy))
    assert min(gaps) == GAP


def test_local_tangent_vertices_hidden():
    nvert, leaks = local_tangent_vertex_check()
    assert nvert > 500 and not leaks


def test_points_not_in_grid():
    with pytest.raises(PointsNotInGrid):
        grid_cluster_instance([(mpq(1, 2), 0)], verify=False)
    with pytest.raises(PointsNotInGrid):
        grid_cluster_instance([(1, 1), (1, 1)], verify=False)


def test_rectilinear_tsp():
    assert rectilinear_tsp([Point(0, 0), Point(1, 0), Point(2, 0)])[0] == 4
    assert rectilinear_tsp([Point(0, 0), Point(3, 3)])[0] == 12


# set cover -------------------------------------------------------------------


@lru_cache(maxsize=None)
def _sc(spec="1;2", n=2):
    return setcover_instance(SetSystem.parse(n, spec))


def test_setcover_exact_and_bounded():
    art = _sc()
    for C in art.instance.obstacles:
        for v in C.vertices:
            assert type(v.x).__name__ == "mpq" and type(v.y).__name__ == "mpq"
    assert coordinate_magnitude(art.instance) <= art.parameters["bound"]


def test_setcover_structure():
    assert structure_checks(_sc()) == {"slopes_ok": True, "membership_ok": True}
    assert structure_checks(_sc("1,2;2"))["membership_ok"]


def test_setcover_witness_within_bound():
    rep = check_witness(_sc(), [1, 2])
    assert rep["valid"] and rep["within_bound"]
    assert rep["length"] <= 2 + 0.5


def test_setcover_uncovered_element_fails():
    rep = check_witness(_sc(), [1])
    assert not rep["valid"]
    assert any("no observation point" in f for f in rep["failures"])


def test_setcover_invalid_system():
    with pytest.raises(InvalidSetSystem):
        setcover_instance(SetSystem.parse(2, "1;3"))
    with pytest.raises(InvalidSetSystem):
        setcover_instance(SetSystem.parse(3, "1;2"))


# packings --------------------------------------------------------------------


@lru_cache(maxsize=None)
def _pack(side, seed=42):
    return disk_packing(side, seed=seed)


def test_packing_size_and_certificate():
    P = _pack(10)
    assert 13 <= P.n <= 32
    assert P.certified
    assert _disjoint_and_inside(P.instance)


def test_packing_tspn_lower_bound_on_six():
    P = _pack(10)
    obs = P.instance.obstacles[:6]
    rs = RegionSet([region_from_convex(C) for C in obs], P.instance.box)
    assert exact_small_tspn(rs).length >= math.pi * (6 - 4) / 4


def test_strip_routes_on_packing():
    inst = _pack(10).instance
    E = strip_traversal_route(inst, "ewrp")
    T = strip_traversal_route(inst, "tspn")
    assert circles_every_obstacle(E, inst)
    assert validate_observation_route(touch_route(inst)[1], inst).valid
    n = inst.n
    # recorded constants: EWRP strip length <= 12 n + 4 side
    assert E.length <= 12 * n + 4 * 10
    assert T.length >= math.pi * (n - 4) / 4
    assert E.length >= T.length


def test_strip_route_empty_box():
    inst = Instance((0, 0, 8, 8), ())
    T = strip_traversal_route(inst, "ewrp")
    # two strips: up, across, up, back, then down the left side
    assert T.length == pytest.approx(2 + 8 + 4 + 8 + 6)


def test_sparse_hull_route_constant():
    for q in (2, 3):
        inst = sparse_lattice(q)
        H = hull_route(inst)
        assert H.length <= 4
        assert boundary_coverage(H.vertices, inst) == 1.0
