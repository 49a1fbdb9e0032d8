"""Six unit squares whose common observation points are all far from the hull.

Two rows of three squares.  Within a row consecutive squares are separated
horizontally by eps and lifted by 2 eps; the upper row sits a small gap g
above the lower one.  The common-observation region is a thin wedge whose
distance to the hull grows like 1/eps, so eps = 1/k is searched over k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from gmpy2 import mpq

from ..geom import ConvexPolygon, Point, Q
from ..visibility import (Instance, _closure_labels, _sees_rest, instance_arrangement,
                          visible_faces)

MAX_DIAMETER = 4


def _square(x, y) -> ConvexPolygon:
    return ConvexPolygon([Point(x, y), Point(x + 1, y), Point(x + 1, y + 1), Point(x, y + 1)])


def six_square_family(eps) -> list:
    e = Q(eps)
    g = e / 10
    xs = [Q(0), 1 + e, 2 + 2 * e]
    lift = [Q(0), 2 * e, 4 * e]
    lower = [_square(x, u) for x, u in zip(xs, lift)]
    upper = [_square(x, 1 + g + u) for x, u in zip(xs, lift)]
    return upper + lower


def six_square_instance(eps) -> Instance:
    e = Q(eps)
    R = 2 / e + 14
    return Instance((-R, -R, R + 3, R + 3), tuple(six_square_family(e)))


def _hull(inst: Instance) -> ConvexPolygon:
    return ConvexPolygon.hull([v for C in inst.obstacles for v in C.vertices])


def _diameter2(P: ConvexPolygon):
    vs = P.vertices
    return max((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 for a in vs for b in vs)


def _point_seg_dist2(p, a, b):
    dx, dy = b[0] - a[0], b[1] - a[1]
    L = dx * dx + dy * dy
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L if L else Q(0)
    t = min(max(t, Q(0)), Q(1))
    qx, qy = a[0] + t * dx - p[0], a[1] + t * dy - p[1]
    return qx * qx + qy * qy


def _ring_dist2(ring, H: ConvexPolygon):
    """Exact squared distance from a polygon ring lying outside H to H."""
    if any(H.locate(p) >= 0 for p in ring):
        return Q(0)
    hv = H.vertices
    best = None
    for k in range(len(ring)):
        a, b = ring[k], ring[(k + 1) % len(ring)]
        for h in range(len(hv)):
            c, d = hv[h], hv[(h + 1) % len(hv)]
            for v in (_point_seg_dist2(a, c, d), _point_seg_dist2(b, c, d),
                      _point_seg_dist2(c, a, b), _point_seg_dist2(d, a, b)):
                if best is None or v < best:
                    best = v
    return best


@dataclass
class SixSquareReport:
    eps: mpq
    nonempty: bool
    min_dist: float
    min_dist2: mpq            # exact squared distance of the common region to the hull
    witness: Point | None
    diameter: float
    near_points_checked: int

    def ok(self, delta) -> bool:
        return self.nonempty and self.min_dist2 >= Q(delta) ** 2


def verify_six_squares(inst: Instance, delta=None) -> SixSquareReport:
    """Common-observation region of six squares and its distance to the hull.

    Full-dimensional common faces give the distance exactly.  When ``delta``
    is given, every arrangement vertex and edge midpoint closer than delta to
    the hull is also checked with the exact predicate, so grazing
    lower-dimensional common points cannot slip through.
    """
    ia = instance_arrangement(inst)
    arr = ia.arr
    sets = [visible_faces(inst, i) for i in range(inst.n)]
    common = frozenset.intersection(*sets)
    H = _hull(inst)
    best, witness = None, None
    for f in sorted(common):
        ring = arr.face_points(f)
        d2 = _ring_dist2(ring, H)
        if best is None or d2 < best:
            best, witness = d2, ia.samples[f]
    checked = 0
    if delta is not None:
        lim = Q(delta) ** 2
        face_vis, at_edge, at_vertex = _closure_labels(inst)
        cands = [(arr.edge_midpoint(e), at_edge[e]) for e in range(len(arr.edges))]
        cands += [(p, at_vertex[v]) for v, p in enumerate(arr.vertices)]
        for c, known in cands:
            d2 = Q(0) if H.locate(c) >= 0 else min(
                _point_seg_dist2(c, H.vertices[h], H.vertices[(h + 1) % len(H)])
                for h in range(len(H)))
            if d2 >= lim or not inst.is_free(c):
                continue
            checked += 1
            if _sees_rest(c, known, inst):
                if best is None or d2 < best:
                    best, witness = d2, c
    nonempty = best is not None
    return SixSquareReport(_eps_of(inst), nonempty,
                           math.sqrt(float(best)) if nonempty else math.inf,
                           best if nonempty else Q(-1), witness,
                           math.sqrt(float(_diameter2(H))), checked)


def _eps_of(inst: Instance):
    # horizontal gap between the first two upper squares
    return inst.obstacles[1].vertices[0][0] - 1


def _min_k() -> int:
    k = 1
    while True:
        k += 1
        H = _hull(six_square_instance(mpq(1, k)))
        if _diameter2(H) <= MAX_DIAMETER ** 2:
            return k


def six_squares(delta) -> Instance:
    """Six-square family whose common observation points are >= delta from the hull.

    eps = 1/k with the smallest k that keeps diam(conv F) <= 4 and passes the
    distance check; the distance is monotone in k, so k is found by doubling
    followed by bisection.
    """
    if not Q(delta) > 0:
        raise ValueError("delta must be positive")

    def good(k):
        inst = six_square_instance(mpq(1, k))
        return verify_six_squares(inst).ok(delta)

    lo = _min_k()
    if good(lo):
        k = lo
    else:
        hi = 2 * lo
        while not good(hi):
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if good(mid):
                hi = mid
            else:
                lo = mid
        k = hi
    inst = six_square_instance(mpq(1, k))
    if not verify_six_squares(inst, delta).ok(delta):
        raise AssertionError(f"eps = 1/{k} fails the lower-dimensional check")
    return inst
