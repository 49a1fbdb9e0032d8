"""Observation routes: region touring followed by boundary detours.

``solve_orp`` computes every visibility region, tours them, and reroutes each
tour edge that crosses an obstacle along the shorter boundary arc.  Touch
points stay on the tour, so each one still certifies that its obstacle is
seen.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .errors import InvariantViolation, PointInsideObstacle, TooManyObstacles
from .geom import (Point, boundary_geodesic, dist, on_segment, polyline_length,
                   segment_interior_chord)
from .tspn import (RegionSet, Tour, _farthest_sample, _tour_from_order, gtsp_tour,
                   refine_touch_points, tspn_tour)
from .visibility import (Instance, common_observation_point, instance_arrangement,
                         sees, sees_many, visibility_region, visible_faces)


@dataclass
class ObservationRoute:
    tour: Tour
    observed_from: dict
    detour_log: list = field(default_factory=list)
    detour_rounds: int = 0
    fatness: float = 1.0

    @property
    def length(self) -> float:
        return self.tour.length


@dataclass
class ValidationReport:
    avoids_interiors: bool
    covers_all: bool
    closed: bool
    length: float
    failures: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.avoids_interiors and self.covers_all and self.closed


def _crossings(a, b, inst: Instance):
    """Obstacle chords of segment ab, sorted along the segment."""
    out = []
    ax0, ax1 = min(a[0], b[0]), max(a[0], b[0])
    ay0, ay1 = min(a[1], b[1]), max(a[1], b[1])
    for k, C in enumerate(inst.obstacles):
        x0, y0, x1, y1 = C.bbox
        if x1 < ax0 or x0 > ax1 or y1 < ay0 or y0 > ay1:
            continue
        ch = segment_interior_chord(C, a, b)
        if ch is not None:
            out.append((ch[0], ch[1], k))
    out.sort()
    return out


def detour_transform(T: Tour, inst: Instance, max_rounds: int = 50) -> Tour:
    """Replace every obstacle chord of the tour by the shorter boundary arc."""
    verts = list(T.vertices)
    prov = list(T.provenance) if T.provenance else ["tspn"] * len(verts)
    log = list(T.detour_log)
    rounds = 0
    while len(verts) > 1 and rounds < max_rounds:
        changed = False
        nv = []
        np_ = []
        n = len(verts)
        for k in range(n):
            a, b = verts[k], verts[(k + 1) % n]
            nv.append(a)
            np_.append(prov[k])
            if a == b:
                continue
            for t0, t1, j in _crossings(a, b, inst):
                C = inst.obstacles[j]
                d = (b[0] - a[0], b[1] - a[1])
                p = Point(a[0] + d[0] * t0, a[1] + d[1] * t0)
                q = Point(a[0] + d[0] * t1, a[1] + d[1] * t1)
                path, plen = boundary_geodesic(C, p, q)
                log.append((j, dist(p, q), plen))
                for v in path:
                    if v != nv[-1]:
                        nv.append(v)
                        np_.append("detour")
                changed = True
        # drop consecutive duplicates, including the wrap-around
        clean_v, clean_p = [], []
        for v, s in zip(nv, np_):
            if clean_v and clean_v[-1] == v:
                if s == "tspn":
                    clean_p[-1] = "tspn"
                continue
            clean_v.append(v)
            clean_p.append(s)
        while len(clean_v) > 1 and clean_v[-1] == clean_v[0]:
            if clean_p[-1] == "tspn":
                clean_p[0] = "tspn"
            clean_v.pop()
            clean_p.pop()
        verts, prov = clean_v, clean_p
        rounds += 1
        if not changed:
            break
    length = polyline_length(verts, closed=True) if len(verts) > 1 else 0.0
    return Tour(verts, length, dict(T.witness), list(T.order), prov, log, rounds)


def _on_tour(p, verts) -> bool:
    n = len(verts)
    if n == 1:
        return verts[0] == p
    return any(on_segment(p, verts[k], verts[(k + 1) % n]) for k in range(n))


def validate_observation_route(route: ObservationRoute, inst: Instance) -> ValidationReport:
    verts = route.tour.vertices
    fails = []
    n = len(verts)
    avoid = n >= 1
    for k in range(n if n > 1 else 0):
        a, b = verts[k], verts[(k + 1) % n]
        if a != b and _crossings(a, b, inst):
            avoid = False
            fails.append(f"edge {k} crosses an obstacle interior")
    if n == 1 and inst.obstacle_containing(verts[0]) >= 0:
        avoid = False
        fails.append("route point inside an obstacle")
    cover = True
    for i in range(inst.n):
        w = route.observed_from.get(i)
        if w is None:
            cover = False
            fails.append(f"obstacle {i} has no observation point")
            continue
        if not _on_tour(w, verts):
            cover = False
            fails.append(f"observation point of obstacle {i} is not on the tour")
            continue
        try:
            ok = sees(w, i, inst)
        except PointInsideObstacle:
            ok = False
        if not ok:
            cover = False
            fails.append(f"obstacle {i} is not seen from its observation point")
    closed = n >= 1 and all(inst.in_box(v) for v in verts)
    if not closed:
        fails.append("route is empty or leaves the box")
    length = polyline_length(verts, closed=True) if n > 1 else 0.0
    if not math.isclose(length, route.tour.length, rel_tol=1e-9, abs_tol=1e-12):
        closed = False
        fails.append("stored length does not match the closed polyline")
    return ValidationReport(avoid, cover, closed, length, fails)


def _route_from_tour(T: Tour, inst: Instance) -> ObservationRoute:
    D = detour_transform(T, inst)
    for i, w in D.witness.items():
        if inst.obstacle_containing(w) >= 0:
            raise InvariantViolation(f"witness of obstacle {i} lies inside an obstacle")
    lam = min(C.metrics[2] for C in inst.obstacles)
    return ObservationRoute(D, dict(D.witness), list(D.detour_log),
                            D.detour_rounds, lam)


def solve_orp(inst: Instance, validate: bool = True) -> ObservationRoute:
    c = common_observation_point(inst)
    if c is not None:
        T = Tour([c], 0.0, {i: c for i in range(inst.n)}, list(range(inst.n)), ["tspn"])
    else:
        regions = [visibility_region(i, inst) for i in range(inst.n)]
        T = tspn_tour(RegionSet(regions, inst.box), check_common=False)
    route = _route_from_tour(T, inst)
    if validate:
        rep = validate_observation_route(route, inst)
        if not rep.valid:
            raise InvariantViolation("; ".join(rep.failures))
    return route


# ---------------------------------------------------------------------------
# discretised oracle


def orp_candidates(inst: Instance, grid: int = 16, cap: int = 24):
    """Per obstacle, exact points that see it.

    Candidates are free arrangement vertices, face samples and grid points.
    When a set exceeds ``cap`` the points seeing the most obstacles are kept
    first (ties broken by closeness to the obstacles), then a spread sample.
    """
    ia = instance_arrangement(inst)
    arr = ia.arr
    vis = [visible_faces(inst, i) for i in range(inst.n)]
    adj = [set() for _ in arr.vertices]
    for h, f in enumerate(arr.he_face):
        adj[arr.he_origin[h]].add(f)
    seen_by: dict = {}
    for v, p in enumerate(arr.vertices):
        if inst.obstacle_containing(p) >= 0:
            continue
        s = frozenset(i for i in range(inst.n) if adj[v] & vis[i])
        if s:
            seen_by[p] = s
    for f, c in ia.samples.items():
        if ia.face_obstacle[f] < 0:
            s = frozenset(i for i in range(inst.n) if f in vis[i])
            if s:
                seen_by[c] = s
    x0, y0, x1, y1 = inst.box
    pts = [Point(x0 + (x1 - x0) * mpq(2 * a + 1, 2 * grid), y0 + (y1 - y0) * mpq(2 * b + 1, 2 * grid))
           for a in range(grid) for b in range(grid)]
    P = np.array([p.to_float() for p in pts])
    hits = {}
    for i in range(inst.n):
        codes = sees_many(P, i, inst)
        for p, c in zip(pts, codes):
            if c == 1 and sees(p, i, inst):
                hits.setdefault(p, set()).add(i)
    for p, s in hits.items():
        seen_by[p] = seen_by.get(p, frozenset()) | frozenset(s)
    centre = np.mean([C.centroid.to_float() for C in inst.obstacles], axis=0)
    out = []
    for i in range(inst.n):
        S = sorted(p for p, s in seen_by.items() if i in s)
        if len(S) > cap:
            fl = np.array([p.to_float() for p in S])
            near = np.hypot(*(fl - centre).T)
            rank = sorted(range(len(S)), key=lambda k: (-len(seen_by[S[k]]), near[k], S[k]))
            keep = [S[k] for k in rank[: cap // 2]]
            rest = [S[k] for k in rank[cap // 2: 4 * cap]]
            keep += _farthest_sample(rest, cap - len(keep))
            S = sorted(set(keep))
        out.append(S)
    return out


def discretized_opt_orp(inst: Instance, grid: int = 16, cap: int = 24) -> Tour:
    if inst.n > 6:
        raise TooManyObstacles(f"oracle supports at most 6 obstacles, got {inst.n}")
    cands = orp_candidates(inst, grid, cap)
    order, picks, _ = gtsp_tour(cands)
    T0 = _tour_from_order(order, picks)
    if T0.length > 0:
        regions = [visibility_region(i, inst) for i in range(inst.n)]
        T0 = refine_touch_points(order, RegionSet(regions, inst.box), T0)
    return detour_transform(T0, inst)
