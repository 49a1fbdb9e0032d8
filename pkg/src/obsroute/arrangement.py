"""Exact planar arrangement of segments (half-edge structure).

Every segment is split at all of its intersections, overlapping collinear
pieces are merged, and faces are traced with the usual "next = first
clockwise edge around the head vertex" rule.  Coordinates are exact rationals.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .geom import Point, orient, segment_intersection, signed_area2


def _half(dx, dy) -> int:
    # 0 for directions in [0, pi), 1 for [pi, 2 pi)
    return 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1


def angle_key_cmp(a, b) -> int:
    """Compare two nonzero direction vectors by polar angle in [0, 2 pi)."""
    ha = _half(*a)
    hb = _half(*b)
    if ha != hb:
        return -1 if ha < hb else 1
    c = a[0] * b[1] - a[1] * b[0]
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


class _AngleKey:
    __slots__ = ("d",)

    def __init__(self, d):
        self.d = d

    def __lt__(self, other):
        return angle_key_cmp(self.d, other.d) < 0


@dataclass
class Arrangement:
    vertices: list[Point]
    edges: list[tuple[int, int]]            # undirected, u < v by index
    he_origin: list[int] = field(default_factory=list)
    he_next: list[int] = field(default_factory=list)
    he_face: list[int] = field(default_factory=list)
    faces: list[list[int]] = field(default_factory=list)   # half-edge cycles
    face_area2: list = field(default_factory=list)
    outer_face: int = -1

    @staticmethod
    def twin(h: int) -> int:
        return h ^ 1

    def he_target(self, h: int) -> int:
        return self.he_origin[h ^ 1]

    def face_points(self, f: int) -> list[Point]:
        return [self.vertices[self.he_origin[h]] for h in self.faces[f]]

    def bounded_faces(self) -> list[int]:
        return [f for f in range(len(self.faces)) if f != self.outer_face]

    def edge_midpoint(self, e: int) -> Point:
        u, v = self.edges[e]
        a, b = self.vertices[u], self.vertices[v]
        return Point((a.x + b.x) / 2, (a.y + b.y) / 2)


def _bbox_overlap(s, t) -> bool:
    (a, b), (c, d) = s, t
    return not (max(a.x, b.x) < min(c.x, d.x) or max(c.x, d.x) < min(a.x, b.x)
                or max(a.y, b.y) < min(c.y, d.y) or max(c.y, d.y) < min(a.y, b.y))


def build_arrangement(segments) -> Arrangement:
    segs = [(Point(*a), Point(*b)) for a, b in segments if a != b]
    splits: list[set] = [{a, b} for a, b in segs]
    # sort by xmin for a simple sweep-style prune
    order = sorted(range(len(segs)), key=lambda i: min(segs[i][0].x, segs[i][1].x))
    xmax = {i: max(segs[i][0].x, segs[i][1].x) for i in range(len(segs))}
    for oi, i in enumerate(order):
        si = segs[i]
        for j in order[oi + 1:]:
            sj = segs[j]
            if min(sj[0].x, sj[1].x) > xmax[i]:
                break
            if not _bbox_overlap(si, sj):
                continue
            r = segment_intersection(si[0], si[1], sj[0], sj[1])
            if r is None:
                continue
            if isinstance(r, tuple) and not isinstance(r, Point):
                for p in r:
                    splits[i].add(p)
                    splits[j].add(p)
            else:
                splits[i].add(r)
                splits[j].add(r)

    vid: dict[Point, int] = {}
    vertices: list[Point] = []

    def vertex(p: Point) -> int:
        k = vid.get(p)
        if k is None:
            k = len(vertices)
            vid[p] = k
            vertices.append(p)
        return k

    edge_set: set[tuple[int, int]] = set()
    for (a, b), pts in zip(segs, splits):
        dx = b.x - a.x
        dy = b.y - a.y
        chain = sorted(pts, key=lambda p: (p.x - a.x) * dx + (p.y - a.y) * dy)
        for p, q in zip(chain, chain[1:]):
            if p == q:
                continue
            u, v = vertex(p), vertex(q)
            edge_set.add((u, v) if u < v else (v, u))
    edges = sorted(edge_set)
    arr = Arrangement(vertices=vertices, edges=edges)
    nh = 2 * len(edges)
    origin = [0] * nh
    for e, (u, v) in enumerate(edges):
        origin[2 * e] = u
        origin[2 * e + 1] = v
    out: list[list[int]] = [[] for _ in vertices]
    for h in range(nh):
        out[origin[h]].append(h)
    # sort outgoing half-edges CCW around each vertex
    pos_in_ring = [0] * nh
    for v, hs in enumerate(out):
        p = vertices[v]

        def key(h, p=p):
            q = vertices[origin[h ^ 1]]
            return _AngleKey((q.x - p.x, q.y - p.y))

        hs.sort(key=key)
        for k, h in enumerate(hs):
            pos_in_ring[h] = k
    nxt = [0] * nh
    for h in range(nh):
        t = h ^ 1            # half-edge from head back to tail
        v = origin[t]
        ring = out[v]
        k = pos_in_ring[t]
        nxt[h] = ring[k - 1]  # first clockwise from the reversed edge
    face = [-1] * nh
    faces: list[list[int]] = []
    areas = []
    for h0 in range(nh):
        if face[h0] != -1:
            continue
        f = len(faces)
        cyc = []
        h = h0
        while face[h] == -1:
            face[h] = f
            cyc.append(h)
            h = nxt[h]
        faces.append(cyc)
        areas.append(signed_area2([vertices[origin[x]] for x in cyc]))
    arr.he_origin = origin
    arr.he_next = nxt
    arr.he_face = face
    arr.faces = faces
    arr.face_area2 = areas
    neg = [f for f, a in enumerate(areas) if a < 0]
    if len(neg) != 1:
        raise AssertionError(f"arrangement is not connected ({len(neg)} outer cycles)")
    arr.outer_face = neg[0]
    return arr


def winding_number(p, ring) -> int:
    """Exact winding number of closed ring around p (p must not lie on it)."""
    wn = 0
    n = len(ring)
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        if a[1] <= p[1]:
            if b[1] > p[1] and orient(a, b, p) > 0:
                wn += 1
        elif b[1] <= p[1] and orient(a, b, p) < 0:
            wn -= 1
    return wn


def on_ring(p, ring) -> bool:
    n = len(ring)
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        if (orient(a, b, p) == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])):
            return True
    return False


def interior_point(ring) -> Point:
    """An exact point strictly inside a (weakly) simple CCW ring."""
    levels = sorted({v[1] for v in ring})
    n = len(ring)
    for y0, y1 in zip(levels, levels[1:]):
        ym = (y0 + y1) / 2
        xs = []
        for i in range(n):
            a = ring[i]
            b = ring[(i + 1) % n]
            if (a[1] - ym) * (b[1] - ym) < 0:
                t = (ym - a[1]) / (b[1] - a[1])
                xs.append(a[0] + (b[0] - a[0]) * t)
        xs.sort()
        for x0, x1 in zip(xs, xs[1:]):
            if x0 == x1:
                continue
            c = Point((x0 + x1) / 2, ym)
            if winding_number(c, ring) != 0:
                return c
    raise AssertionError("could not find an interior point of a face")
