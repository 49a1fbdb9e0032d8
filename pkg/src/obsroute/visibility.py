"""Object visibility among disjoint convex obstacles inside a bounding box.

``sees`` is the exact predicate: the target's angular interval minus the
open shadows of nearer obstacles.  ``visibility_region`` builds an
arrangement that refines every visibility region of the instance (box,
obstacle edges, all pairwise common tangents) and keeps the faces whose
sample point sees the target.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Optional

import numpy as np

from . import kernels
from .arrangement import (Arrangement, build_arrangement, interior_point,
                          on_ring, winding_number)
from .errors import (InvalidInstance, NotTranslateFamily, PointInsideObstacle)
from .geom import (ConvexPolygon, Point, Q, common_tangents, cross, orient,
                   polygons_disjoint, ray_entry, signed_area2, tangent_points)


@dataclass(frozen=True)
class Instance:
    box: tuple          # (xmin, ymin, xmax, ymax) as mpq
    obstacles: tuple    # of ConvexPolygon

    def __post_init__(self):
        box = tuple(Q(v) for v in self.box)
        object.__setattr__(self, "box", box)
        obs = tuple(o if isinstance(o, ConvexPolygon) else ConvexPolygon(o)
                    for o in self.obstacles)
        object.__setattr__(self, "obstacles", obs)
        x0, y0, x1, y1 = box
        if not (x0 < x1 and y0 < y1):
            raise InvalidInstance("empty bounding box")
        for k, o in enumerate(obs):
            bx0, by0, bx1, by1 = o.bbox
            if not (x0 < bx0 and y0 < by0 and bx1 < x1 and by1 < y1):
                raise InvalidInstance(f"obstacle {k} is not strictly inside the box")
        for i in range(len(obs)):
            for j in range(i + 1, len(obs)):
                if not polygons_disjoint(obs[i], obs[j]):
                    raise InvalidInstance(f"obstacles {i} and {j} are not disjoint")

    @property
    def n(self) -> int:
        return len(self.obstacles)

    @property
    def m(self) -> int:
        return sum(len(o) for o in self.obstacles)

    def box_corners(self) -> list[Point]:
        x0, y0, x1, y1 = self.box
        return [Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)]

    def in_box(self, p) -> bool:
        x0, y0, x1, y1 = self.box
        return x0 <= p[0] <= x1 and y0 <= p[1] <= y1

    def obstacle_containing(self, p) -> int:
        """Index of the obstacle whose open interior contains p, else -1."""
        for k, o in enumerate(self.obstacles):
            bx0, by0, bx1, by1 = o.bbox
            if bx0 < p[0] < bx1 and by0 < p[1] < by1 and o.locate(p) > 0:
                return k
        return -1

    def is_free(self, p) -> bool:
        return self.in_box(p) and self.obstacle_containing(p) < 0

    def without(self, k: int) -> "Instance":
        return Instance(self.box, self.obstacles[:k] + self.obstacles[k + 1:])


# ---------------------------------------------------------------------------
# polygon with holes


@dataclass(frozen=True)
class PolygonWithHoles:
    outer: tuple        # CCW ring of Points
    holes: tuple        # CW rings

    @property
    def vertex_count(self) -> int:
        return len(self.outer) + sum(len(h) for h in self.holes)

    @property
    def rings(self):
        return (self.outer,) + tuple(self.holes)

    def locate(self, p) -> int:
        """+1 interior, 0 on boundary, -1 outside (closed region semantics)."""
        for r in self.rings:
            if on_ring(p, r):
                return 0
        if winding_number(p, self.outer) == 0:
            return -1
        for h in self.holes:
            if winding_number(p, h) != 0:
                return -1
        return 1

    def contains(self, p) -> bool:
        return self.locate(p) >= 0

    @cached_property
    def area(self) -> float:
        return float(sum(signed_area2(r) for r in self.rings)) / 2

    def float_rings(self):
        return [[(float(v.x), float(v.y)) for v in r] for r in self.rings]

    @cached_property
    def bbox(self):
        xs = [v.x for v in self.outer]
        ys = [v.y for v in self.outer]
        return (min(xs), min(ys), max(xs), max(ys))


# ---------------------------------------------------------------------------
# exact visibility predicate


def _in_arc(d, start, end) -> bool:
    # closed CCW arc of angle <= pi
    return (cross(start[0], start[1], d[0], d[1]) >= 0
            and cross(d[0], d[1], end[0], end[1]) >= 0)


def _blocking_arc(p, O: ConvexPolygon):
    """Open arc (a, b) of directions from p entering the interior of O."""
    loc = O.locate(p)
    if loc > 0:
        raise PointInsideObstacle(f"viewpoint {tuple(p)} is inside an obstacle")
    if loc < 0:
        left, right = tangent_points(p, O)
        return (right[0] - p[0], right[1] - p[1]), (left[0] - p[0], left[1] - p[1])
    vs = O.vertices
    n = len(vs)
    k = O.boundary_edge_of(p)
    if vs[k] == p:
        nxt, prv = vs[(k + 1) % n], vs[k - 1]
        return (nxt[0] - p[0], nxt[1] - p[1]), (prv[0] - p[0], prv[1] - p[1])
    a, b = vs[k], vs[(k + 1) % n]
    return (b[0] - p[0], b[1] - p[1]), (a[0] - p[0], a[1] - p[1])


def _remainder(intervals):
    """Pieces of [0, 1] not covered by (lo, lo_open, hi, hi_open) intervals.

    Returned as sorted closed (lo, hi) pairs; a single direction has lo == hi.
    """
    cuts = {Q(0), Q(1)}
    for lo, _, hi, _ in intervals:
        cuts.add(lo)
        cuts.add(hi)
    cuts = sorted(c for c in cuts if 0 <= c <= 1)

    def covered(s):
        for lo, lo_open, hi, hi_open in intervals:
            if (s > lo or (s == lo and not lo_open)) and (s < hi or (s == hi and not hi_open)):
                return True
        return False

    # alternate breakpoints and open gaps, left to right
    cells = []
    for k, c in enumerate(cuts):
        cells.append((c, c, covered(c)))
        if k + 1 < len(cuts):
            cells.append((c, cuts[k + 1], covered((c + cuts[k + 1]) / 2)))
    out = []
    for lo, hi, cov in cells:
        if cov:
            continue
        if out and out[-1][1] == lo:
            out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


@dataclass(frozen=True)
class AngularIntervalSet:
    """Directions from ``viewpoint`` along which the target is visible.

    Each interval is a CCW pair (start, end) of direction vectors; start == end
    marks a single grazing direction.
    """
    viewpoint: Point
    intervals: tuple

    def __bool__(self):
        return bool(self.intervals)

    def contains(self, d) -> bool:
        return any(_in_arc(d, a, b) for a, b in self.intervals)


def _target_cone(p, T):
    left, right = tangent_points(p, T)
    chord = (left[0] - right[0], left[1] - right[1])
    return left, right, chord


def visible_directions(p, target: int, inst: Instance) -> AngularIntervalSet:
    """Exact set of directions from p that reach the boundary of ``target``."""
    p = Point(Q(p[0]), Q(p[1]))
    if inst.obstacle_containing(p) >= 0:
        raise PointInsideObstacle(f"viewpoint {tuple(p)} is inside an obstacle")
    T = inst.obstacles[target]
    if T.locate(p) == 0:
        k = T.boundary_edge_of(p)
        vs = T.vertices
        a, b = vs[k], vs[(k + 1) % len(vs)]
        # from a boundary point the visible directions span the inward half-plane
        d = (b[0] - a[0], b[1] - a[1])
        return AngularIntervalSet(p, (((d[0], d[1]), (-d[0], -d[1])),))
    left, right, chord = _target_cone(p, T)
    rem = _remainder(_blocked_parameters(p, target, inst, left, right, chord))

    def d_of(s):
        return (right[0] + chord[0] * s - p[0], right[1] + chord[1] * s - p[1])

    return AngularIntervalSet(p, tuple((d_of(lo), d_of(hi)) for lo, hi in rem))


def _blocked_parameters(p, target, inst, left, right, chord, stop_when_covered=False):
    obs = inst.obstacles
    T = obs[target]
    r = (right[0] - p[0], right[1] - p[1])
    l = (left[0] - p[0], left[1] - p[1])
    pr = (p[0] - right[0], p[1] - right[1])

    def s_of(d):
        return cross(d[0], d[1], pr[0], pr[1]) / cross(d[0], d[1], chord[0], chord[1])

    blocked = []
    for j, O in enumerate(obs):
        if j == target:
            continue
        a, b = _blocking_arc(p, O)
        if _in_arc(a, r, l):
            start, s_open = a, True
        elif _in_arc(r, a, b):
            start, s_open = r, False
        else:
            continue
        if _in_arc(b, r, l):
            end, e_open = b, True
        elif _in_arc(l, a, b):
            end, e_open = l, False
        else:
            continue
        s0 = Q(0) if start is r else s_of(start)
        s1 = Q(1) if end is l else s_of(end)
        if s0 >= s1:
            continue
        sm = (s0 + s1) / 2
        d = (right[0] + chord[0] * sm - p[0], right[1] + chord[1] * sm - p[1])
        t_o = ray_entry(O, p, d)
        t_t = ray_entry(T, p, d)
        if t_o is not None and t_t is not None and t_o < t_t:
            blocked.append((s0, s_open, s1, e_open))
            if stop_when_covered and not _remainder(blocked):
                return blocked
    return blocked


def sees(p, target: int, inst: Instance) -> bool:
    """True iff some boundary point of obstacle ``target`` is visible from p."""
    p = Point(Q(p[0]), Q(p[1]))
    if inst.obstacle_containing(p) >= 0:
        raise PointInsideObstacle(f"viewpoint {tuple(p)} is inside an obstacle")
    T = inst.obstacles[target]
    if T.locate(p) == 0:
        return True
    left, right, chord = _target_cone(p, T)
    blocked = _blocked_parameters(p, target, inst, left, right, chord, stop_when_covered=True)
    return bool(_remainder(blocked))


# ---------------------------------------------------------------------------
# instance arrangement


def _clip_line_to_box(a, b, box):
    """Endpoints of the infinite line ab clipped to the closed box."""
    x0, y0, x1, y1 = box
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    lo = hi = None
    for p, q, lim_lo, lim_hi in ((a[0], dx, x0, x1), (a[1], dy, y0, y1)):
        if q == 0:
            if not (lim_lo <= p <= lim_hi):
                return None
            continue
        t0 = (lim_lo - p) / q
        t1 = (lim_hi - p) / q
        if t0 > t1:
            t0, t1 = t1, t0
        lo = t0 if lo is None or t0 > lo else lo
        hi = t1 if hi is None or t1 < hi else hi
    if lo is None or lo >= hi:
        return None
    return (Point(a[0] + dx * lo, a[1] + dy * lo), Point(a[0] + dx * hi, a[1] + dy * hi))


@dataclass
class InstanceArrangement:
    arr: Arrangement
    samples: dict           # face -> interior sample Point
    face_obstacle: dict     # face -> obstacle index whose interior holds it (-1 free)
    n_tangent_lines: int


@lru_cache(maxsize=64)
def tangent_segments(inst: Instance) -> tuple:
    segs = []
    obs = inst.obstacles
    for i in range(len(obs)):
        for j in range(i + 1, len(obs)):
            for t in common_tangents(obs[i], obs[j]):
                s = _clip_line_to_box(t.a, t.b, inst.box)
                if s is not None:
                    segs.append(s)
    return tuple(segs)


@lru_cache(maxsize=64)
def instance_arrangement(inst: Instance) -> InstanceArrangement:
    segs = []
    corners = inst.box_corners()
    for i in range(4):
        segs.append((corners[i], corners[(i + 1) % 4]))
    for o in inst.obstacles:
        segs.extend(o.edges())
        low = min(o.vertices, key=lambda v: (v.y, v.x))
        s = _clip_line_to_box(low, Point(low.x + 1, low.y), inst.box)
        segs.append(s)
    tang = tangent_segments(inst)
    segs.extend(tang)
    arr = build_arrangement(segs)
    samples = {}
    owner = {}
    for f in arr.bounded_faces():
        c = interior_point(arr.face_points(f))
        samples[f] = c
        owner[f] = inst.obstacle_containing(c)
    return InstanceArrangement(arr, samples, owner, len(tang))


@lru_cache(maxsize=256)
def visible_faces(inst: Instance, target: int) -> frozenset:
    ia = instance_arrangement(inst)
    return frozenset(f for f, c in ia.samples.items()
                     if ia.face_obstacle[f] < 0 and sees(c, target, inst))


# ---------------------------------------------------------------------------
# region extraction


def _merge_collinear(ring):
    out = list(ring)
    changed = True
    while changed and len(out) > 3:
        changed = False
        for i in range(len(out)):
            a, b, c = out[i - 1], out[i], out[(i + 1) % len(out)]
            if orient(a, b, c) == 0 and (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]) > 0:
                del out[i]
                changed = True
                break
    return out


def _split_repeats(ring):
    """Split a ring that revisits a vertex into simple loops."""
    stack = [list(ring)]
    done = []
    while stack:
        r = stack.pop()
        seen = {}
        split = None
        for i, v in enumerate(r):
            if v in seen:
                split = (seen[v], i)
                break
            seen[v] = i
        if split is None:
            done.append(r)
            continue
        i, j = split
        stack.append(r[i:j])
        stack.append(r[:i] + r[j:])
    return [r for r in done if len(r) >= 3]


def region_from_faces(arr: Arrangement, faces: frozenset):
    """Boundary rings of the closed union of ``faces`` (positive ones CCW)."""
    inside = faces
    used = set()
    rings = []
    for h0 in range(len(arr.he_origin)):
        if h0 in used or arr.he_face[h0] not in inside or arr.he_face[h0 ^ 1] in inside:
            continue
        ring = []
        h = h0
        while h not in used:
            used.add(h)
            ring.append(arr.vertices[arr.he_origin[h]])
            e = arr.he_next[h]
            while arr.he_face[e ^ 1] in inside:
                e = arr.he_next[e ^ 1]
            h = e
        rings.extend(_split_repeats(ring))
    outers = []
    holes = []
    for r in rings:
        r = _merge_collinear(r)
        a = signed_area2(r)
        (outers if a > 0 else holes).append(r)
    return outers, holes


def region_components(arr: Arrangement, faces: frozenset) -> int:
    """Number of edge-connected components among ``faces``."""
    parent = {f: f for f in faces}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for h in range(0, len(arr.he_origin), 2):
        f, g = arr.he_face[h], arr.he_face[h + 1]
        if f in parent and g in parent:
            rf, rg = find(f), find(g)
            if rf != rg:
                parent[rf] = rg
    return len({find(f) for f in faces})


def complement_hole_count(arr: Arrangement, faces: frozenset) -> int:
    """Bounded components of the complement of the closed face union."""
    others = frozenset(range(len(arr.faces))) - faces
    parent = {f: f for f in others}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for h in range(0, len(arr.he_origin), 2):
        f, g = arr.he_face[h], arr.he_face[h + 1]
        if f in parent and g in parent:
            rf, rg = find(f), find(g)
            if rf != rg:
                parent[rf] = rg
    roots = {find(f) for f in others}
    return len(roots) - 1   # drop the component holding the unbounded face


def visibility_region(target: int, inst: Instance) -> PolygonWithHoles:
    ia = instance_arrangement(inst)
    faces = visible_faces(inst, target)
    outers, holes = region_from_faces(ia.arr, faces)
    if len(outers) != 1:
        raise AssertionError(f"visibility region of {target} has {len(outers)} outer rings")
    return PolygonWithHoles(tuple(outers[0]), tuple(tuple(h) for h in holes))


def region_is_connected(target: int, inst: Instance) -> bool:
    ia = instance_arrangement(inst)
    return region_components(ia.arr, visible_faces(inst, target)) == 1


# ---------------------------------------------------------------------------
# single-point observability


def _candidate_points(inst: Instance):
    """Face samples, then edge midpoints, then vertices; each group sorted."""
    ia = instance_arrangement(inst)
    arr = ia.arr
    faces = sorted((c, f) for f, c in ia.samples.items() if ia.face_obstacle[f] < 0)
    mids = sorted(arr.edge_midpoint(e) for e in range(len(arr.edges)))
    verts = sorted(arr.vertices)
    return faces, mids, verts


def _closure_labels(inst: Instance):
    """Obstacles certified visible at each arrangement vertex and edge midpoint
    by an adjacent visible face (visibility is a closed condition)."""
    ia = instance_arrangement(inst)
    arr = ia.arr
    sets = [visible_faces(inst, i) for i in range(inst.n)]
    face_vis = {}
    for f in range(len(arr.faces)):
        face_vis[f] = frozenset(i for i in range(inst.n) if f in sets[i])
    at_vertex = [set() for _ in arr.vertices]
    at_edge = []
    for e in range(len(arr.edges)):
        s = face_vis[arr.he_face[2 * e]] | face_vis[arr.he_face[2 * e + 1]]
        at_edge.append(s)
        u, v = arr.edges[e]
        at_vertex[u] |= s
        at_vertex[v] |= s
    return face_vis, at_edge, at_vertex


def _sees_rest(c, known, inst: Instance) -> bool:
    return all(i in known or sees(c, i, inst) for i in range(inst.n))


def common_observation_point(inst: Instance) -> Optional[Point]:
    """A point from which every obstacle is seen, or None.

    Face samples are tried first, then edge midpoints, then arrangement
    vertices; lower-dimensional candidates catch grazing sight lines.
    """
    ia = instance_arrangement(inst)
    arr = ia.arr
    face_vis, at_edge, at_vertex = _closure_labels(inst)
    allk = frozenset(range(inst.n))
    for c, f in sorted((c, f) for f, c in ia.samples.items() if ia.face_obstacle[f] < 0):
        if face_vis[f] == allk:
            return c
    mids = sorted((arr.edge_midpoint(e), e) for e in range(len(arr.edges)))
    for c, e in mids:
        if inst.is_free(c) and _sees_rest(c, at_edge[e], inst):
            return c
    for c, v in sorted((p, v) for v, p in enumerate(arr.vertices)):
        if inst.is_free(c) and _sees_rest(c, at_vertex[v], inst):
            return c
    return None


def is_translate_family(inst: Instance) -> bool:
    base = inst.obstacles[0].vertices
    k0 = min(range(len(base)), key=lambda i: (base[i].y, base[i].x))
    ref = [base[(k0 + i) % len(base)] - base[k0] for i in range(len(base))]
    for o in inst.obstacles[1:]:
        vs = o.vertices
        if len(vs) != len(base):
            return False
        k = min(range(len(vs)), key=lambda i: (vs[i].y, vs[i].x))
        if [vs[(k + i) % len(vs)] - vs[k] for i in range(len(vs))] != ref:
            return False
    return True


def filled_region_ring(i: int, inst: Instance):
    """Outer ring of the simple polygon V_i united with C_i."""
    ia = instance_arrangement(inst)
    own = frozenset(f for f, o in ia.face_obstacle.items() if o == i)
    outers, holes = region_from_faces(ia.arr, visible_faces(inst, i) | own)
    if len(outers) != 1 or holes:
        raise AssertionError(
            f"V_{i} united with C_{i} is not simple ({len(outers)} outer, {len(holes)} holes)")
    return outers[0]


def translate_intersection_simplification(inst: Instance) -> Optional[Point]:
    """Decide single-point observability via the simple polygons V_i + C_i."""
    if not is_translate_family(inst):
        raise NotTranslateFamily("obstacles are not translates of one polygon")
    rings = [filled_region_ring(i, inst) for i in range(inst.n)]

    def inside_all(c):
        return all(on_ring(c, r) or winding_number(c, r) != 0 for r in rings)

    faces, mids, verts = _candidate_points(inst)
    for c in [c for c, _ in faces] + mids + verts:
        if inst.obstacle_containing(c) < 0 and inst.in_box(c) and inside_all(c):
            return c
    return None


# ---------------------------------------------------------------------------
# float64 batch helpers (compiled kernel when available)


def obstacle_arrays(inst: Instance):
    verts = np.array([v.to_float() for o in inst.obstacles for v in o.vertices], dtype=np.float64)
    offsets = np.cumsum([0] + [len(o) for o in inst.obstacles]).astype(np.int64)
    return verts, offsets


def sees_many(points, target: int, inst: Instance):
    """Float classification of many points: 1 sees, 0 hidden, -1 inside an obstacle."""
    verts, offsets = obstacle_arrays(inst)
    return kernels.sees_batch(verts, offsets, target, points)


def region_arrays(V: PolygonWithHoles):
    rings = V.float_rings()
    pts = np.array([q for r in rings for q in r], dtype=np.float64)
    offsets = np.cumsum([0] + [len(r) for r in rings]).astype(np.int64)
    segs = np.array([(*r[i], *r[(i + 1) % len(r)]) for r in rings for i in range(len(r))],
                    dtype=np.float64)
    return pts, offsets, segs
